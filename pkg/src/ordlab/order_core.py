"""Finite and streamed posets, the family catalog entry point, and exact oracles.

Elements are enumeration indices ``0, 1, 2, ...``; the id order is the
enumeration order that greedy procedures scan in.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from graphlib import CycleError as _GraphCycle
from graphlib import TopologicalSorter
from typing import Any, Callable, Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .errors import (
    CycleError,
    DomainExceeded,
    OracleLimitExceeded,
    OutOfRange,
    ParseError,
)

ORACLE_LIMIT = 2000
EXHAUSTIVE_LIMIT = 20


class Ordering(enum.Enum):
    BELOW = "Below"
    ABOVE = "Above"
    INCOMPARABLE = "Incomparable"
    EQUAL = "Equal"


class Kind(enum.Enum):
    CHAIN = "Chain"
    ANTICHAIN = "Antichain"
    NEITHER = "Neither"


@dataclass(frozen=True)
class FamilySpec:
    name: str
    params: dict = field(default_factory=dict)
    seed: int = 0

    def to_json(self) -> dict[str, Any]:
        return {"kind": "family", "name": self.name, "params": self.params, "seed": self.seed}

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> "FamilySpec":
        try:
            return cls(name=str(obj["name"]), params=dict(obj.get("params", {})), seed=int(obj.get("seed", 0)))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad family spec: {exc}") from None

    def __hash__(self) -> int:
        return hash(canonical_json(self.to_json()))


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


class Poset:
    """Common interface: a strict order on ids, possibly unbounded.

    Subclasses provide ``_less_block(rows, cols)``; matrices for prefixes
    are cached and handed out read-only.
    """

    size: int | None = None
    spec: FamilySpec | None = None
    meta: dict

    def __init__(self) -> None:
        self._cache = np.zeros((0, 0), dtype=bool)
        self.meta = {}

    # -- subclass hook
    def _less_block(self, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def window(self, n: int) -> int:
        return n if self.size is None else min(n, self.size)

    def _check_ids(self, ids: Iterable[int]) -> None:
        for i in ids:
            if i < 0 or (self.size is not None and i >= self.size):
                if isinstance(self, FinitePoset):
                    raise OutOfRange(f"id {i} outside [0, {self.size})")
                raise DomainExceeded(f"id {i} outside [0, {self.size})")

    def less_matrix(self, n: int) -> np.ndarray:
        """Strict relation on ids < n as a read-only boolean matrix."""
        if n < 0:
            raise ValueError("window must be non-negative")
        if n > 0:
            self._check_ids([n - 1])
        if n > self._cache.shape[0]:
            ids = np.arange(n)
            mat = np.ascontiguousarray(self._less_block(ids, ids), dtype=bool)
            mat.setflags(write=False)
            self._cache = mat
        return self._cache[:n, :n]

    def less_among(self, ids: Sequence[int]) -> np.ndarray:
        ids = np.asarray(ids, dtype=np.int64)
        if len(ids) == 0:
            return np.zeros((0, 0), dtype=bool)
        self._check_ids([int(ids.min()), int(ids.max())])
        top = int(ids.max()) + 1
        if top <= self._cache.shape[0]:
            return self._cache[np.ix_(ids, ids)]
        return np.asarray(self._less_block(ids, ids), dtype=bool)

    def less(self, a: int, b: int) -> bool:
        self._check_ids((a, b))
        top = max(a, b) + 1
        if top <= self._cache.shape[0]:
            return bool(self._cache[a, b])
        return bool(self._less_block(np.array([a]), np.array([b]))[0, 0])

    def compare(self, a: int, b: int) -> Ordering:
        if a == b:
            self._check_ids((a,))
            return Ordering.EQUAL
        if self.less(a, b):
            return Ordering.BELOW
        if self.less(b, a):
            return Ordering.ABOVE
        return Ordering.INCOMPARABLE

    def natural_chains(self, n: int) -> list[list[int]] | None:
        """Chain decomposition the family knows by construction, if any."""
        return None


class FinitePoset(Poset):
    """A strict partial order on ``range(n)`` given by its full relation matrix."""

    def __init__(self, strict_rel: np.ndarray, *, validate: bool = True, spec: FamilySpec | None = None):
        super().__init__()
        rel = np.array(strict_rel, dtype=bool)
        if rel.ndim != 2 or rel.shape[0] != rel.shape[1]:
            raise ParseError("relation must be a square matrix")
        if validate:
            if rel.diagonal().any():
                raise CycleError("relation is not irreflexive")
            if rel.shape[0] and ((rel.astype(np.float32) @ rel.astype(np.float32)) > 0)[~rel].any():
                raise ParseError("relation is not transitive")
        rel.setflags(write=False)
        self.rel = rel
        self.n = rel.shape[0]
        self.size = self.n
        self.spec = spec
        self._cache = rel

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[Sequence[int]]) -> "FinitePoset":
        """Transitive closure of the pairs a < b; cycles raise CycleError."""
        succ: dict[int, set[int]] = {i: set() for i in range(n)}
        for pair in pairs:
            if len(pair) != 2:
                raise ParseError(f"pair {pair!r} does not have two entries")
            a, b = int(pair[0]), int(pair[1])
            if not (0 <= a < n and 0 <= b < n):
                raise OutOfRange(f"pair {pair!r} outside [0, {n})")
            if a == b:
                raise CycleError(f"self-loop on {a}")
            succ[a].add(b)
        try:
            order = list(TopologicalSorter({v: succ[v] for v in range(n)}).static_order())
        except _GraphCycle as exc:
            raise CycleError(f"relation has a cycle through {exc.args[1]}") from None
        # static_order lists successors first, so reach sets are complete when used
        reach = np.zeros((n, n), dtype=bool)
        for v in order:
            for w in succ[v]:
                reach[v, w] = True
                reach[v] |= reach[w]
        return cls(reach, validate=False)

    @classmethod
    def chain(cls, n: int) -> "FinitePoset":
        return cls(np.triu(np.ones((n, n), dtype=bool), 1), validate=False)

    @classmethod
    def antichain(cls, n: int) -> "FinitePoset":
        return cls(np.zeros((n, n), dtype=bool), validate=False)

    @classmethod
    def disjoint_union(cls, parts: Sequence["FinitePoset"]) -> "FinitePoset":
        n = sum(p.n for p in parts)
        rel = np.zeros((n, n), dtype=bool)
        off = 0
        for p in parts:
            rel[off:off + p.n, off:off + p.n] = p.rel
            off += p.n
        return cls(rel, validate=False)

    def _less_block(self, rows, cols):
        return self.rel[np.ix_(rows, cols)]

    def cover_pairs(self) -> list[list[int]]:
        rel = self.rel
        if self.n == 0:
            return []
        two_step = (rel.astype(np.float32) @ rel.astype(np.float32)) > 0
        cov = rel & ~two_step
        return [[int(a), int(b)] for a, b in zip(*np.nonzero(cov))]

    def induced(self, ids: Sequence[int]) -> "FinitePoset":
        return FinitePoset(self.less_among(ids), validate=False)


class StreamedPoset(Poset):
    """A poset presented by an id enumeration and a vectorised order rule."""

    def __init__(
        self,
        spec: FamilySpec,
        block: Callable[[np.ndarray, np.ndarray], np.ndarray],
        *,
        size: int | None = None,
        chains: Callable[[int], list[list[int]]] | None = None,
        meta: dict | None = None,
    ):
        super().__init__()
        self.spec = spec
        self._block = block
        self.size = size
        self._chains = chains
        self.meta = dict(meta or {})

    def _less_block(self, rows, cols):
        return self._block(np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64))

    def natural_chains(self, n: int) -> list[list[int]] | None:
        if self._chains is None:
            return None
        return self._chains(self.window(n))


PosetHandle = Poset


def compare(p: Poset, a: int, b: int) -> Ordering:
    return p.compare(a, b)


def truncate(p: Poset, n: int) -> FinitePoset:
    n = p.window(n)
    return FinitePoset(p.less_matrix(n), validate=False)


def classify_set(p: Poset, s: Iterable[int]) -> Kind:
    """Chain iff pairwise comparable, Antichain iff pairwise incomparable.

    The empty set and singletons report Chain.
    """
    ids = sorted(set(int(x) for x in s))
    if len(ids) <= 1:
        if ids:
            p._check_ids(ids)
        return Kind.CHAIN
    sub = p.less_among(ids)
    comp = sub | sub.T
    off = ~np.eye(len(ids), dtype=bool)
    if comp[off].all():
        return Kind.CHAIN
    if not comp.any():
        return Kind.ANTICHAIN
    return Kind.NEITHER


def _as_matrix(p: Poset | np.ndarray) -> np.ndarray:
    if isinstance(p, np.ndarray):
        return p.astype(bool)
    if p.size is None:
        raise OracleLimitExceeded("width of an unbounded poset; truncate first")
    return p.less_matrix(p.size)


def max_matching_size(rel: np.ndarray) -> int:
    if rel.shape[0] == 0 or not rel.any():
        return 0
    mate = maximum_bipartite_matching(csr_matrix(rel.astype(np.uint8)), perm_type="column")
    return int((mate >= 0).sum())


def width_exact(p: Poset | np.ndarray, limit: int = ORACLE_LIMIT) -> int:
    """Maximum antichain size by matching duality (n minus a maximum matching)."""
    rel = _as_matrix(p)
    n = rel.shape[0]
    if n > limit:
        raise OracleLimitExceeded(f"{n} elements exceed the oracle limit {limit}")
    return n - max_matching_size(rel)


def width_exhaustive(p: Poset | np.ndarray, limit: int = EXHAUSTIVE_LIMIT) -> int:
    """Maximum antichain size by branch-and-bound search; independent of matching."""
    rel = _as_matrix(p)
    n = rel.shape[0]
    if n > limit:
        raise OracleLimitExceeded(f"{n} elements exceed the exhaustive limit {limit}")
    comp = rel | rel.T
    nbr = [sum(1 << int(j) for j in np.flatnonzero(comp[i])) for i in range(n)]
    best = 0

    def grow(cand: int, size: int) -> None:
        nonlocal best
        if cand == 0:
            best = max(best, size)
            return
        if size + bin(cand).count("1") <= best:
            return
        v = cand.bit_length() - 1
        grow(cand & ~(1 << v) & ~nbr[v], size + 1)
        grow(cand & ~(1 << v), size)

    grow((1 << n) - 1, 0)
    return best


def maximum_antichain(rel: np.ndarray) -> list[int]:
    """A maximum antichain, read off a maximum matching through Koenig's theorem."""
    rel = rel.astype(bool)
    n = rel.shape[0]
    if n == 0:
        return []
    mate_l = np.full(n, -1, dtype=np.int64)
    if rel.any():
        mate_l = np.asarray(maximum_bipartite_matching(csr_matrix(rel.astype(np.uint8)), perm_type="column"))
    mate_r = np.full(n, -1, dtype=np.int64)
    for u, v in enumerate(mate_l):
        if v >= 0:
            mate_r[v] = u
    seen_l = np.zeros(n, dtype=bool)
    seen_r = np.zeros(n, dtype=bool)
    stack = [u for u in range(n) if mate_l[u] < 0]
    seen_l[stack] = True
    while stack:
        u = stack.pop()
        for v in np.flatnonzero(rel[u] & ~seen_r):
            seen_r[v] = True
            w = mate_r[v]
            if w >= 0 and not seen_l[w]:
                seen_l[w] = True
                stack.append(int(w))
    return [x for x in range(n) if seen_l[x] and not seen_r[x]]


def longest_chain(rel: np.ndarray) -> list[int]:
    """A longest chain of a finite strict order, listed bottom-up."""
    rel = rel.astype(bool)
    n = rel.shape[0]
    if n == 0:
        return []
    order = np.argsort(rel.sum(axis=0), kind="stable")  # down-set sizes grow along <
    length = np.zeros(n, dtype=np.int64)
    prev = np.full(n, -1, dtype=np.int64)
    for y in order:
        below = np.flatnonzero(rel[:, y])
        if len(below):
            best = below[np.argmax(length[below])]
            length[y] = length[best] + 1
            prev[y] = best
        else:
            length[y] = 1
    y = int(np.argmax(length))
    out = []
    while y >= 0:
        out.append(y)
        y = int(prev[y])
    return out[::-1]


def generate(spec: FamilySpec) -> Poset:
    from .families import build

    return build(spec)


# -- codec ---------------------------------------------------------------

def poset_to_json(p: Poset) -> dict[str, Any]:
    if p.spec is not None:
        return p.spec.to_json()
    if isinstance(p, FinitePoset):
        return {"kind": "finite", "n": p.n, "pairs": p.cover_pairs()}
    raise ParseError("poset has no serialisable description")


def poset_from_json(obj: Any) -> Poset:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ParseError("poset file must be an object with a 'kind' key")
    if obj["kind"] == "finite":
        n = obj.get("n")
        pairs = obj.get("pairs", [])
        if not isinstance(n, int) or n < 0 or not isinstance(pairs, list):
            raise ParseError("finite poset needs an integer 'n' and a list 'pairs'")
        return FinitePoset.from_pairs(n, pairs)
    if obj["kind"] == "family":
        return generate(FamilySpec.from_json(obj))
    raise ParseError(f"unknown poset kind {obj['kind']!r}")


def dumps_poset(p: Poset) -> str:
    return canonical_json(poset_to_json(p)) + "\n"


def loads_poset(text: str) -> Poset:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    return poset_from_json(obj)


def codec_roundtrip(p: Poset) -> Poset:
    return loads_poset(dumps_poset(p))
