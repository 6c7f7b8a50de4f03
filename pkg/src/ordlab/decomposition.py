"""Online and offline chain decompositions, plus the chain/antichain extractors built on them."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from . import kernels
from .errors import (
    EmptyInput,
    HeightPromiseViolated,
    NotAChain,
    OracleLimitExceeded,
    WidthPromiseViolated,
)
from .order_core import ORACLE_LIMIT, Kind, Poset, classify_set, longest_chain, maximum_antichain


def kierstead_bound(k: int) -> int:
    """(5^k - 1) / 4: chains the layered online partitioner may open for width k."""
    return (5 ** k - 1) // 4


@dataclass
class ChainAssignment:
    """Element -> chain index, with chains numbered in order of creation."""

    chain_of: list[int]
    k_bound: int
    layer_of: list[int] = field(default_factory=list)

    @property
    def n_chains(self) -> int:
        return max(self.chain_of, default=-1) + 1

    @property
    def chains(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.n_chains)]
        for x, c in enumerate(self.chain_of):
            out[c].append(x)
        return out

    def to_json(self) -> dict:
        return {"k_bound": self.k_bound, "chains": self.chains}

    @classmethod
    def from_chains(cls, chains: Sequence[Sequence[int]], k_bound: int) -> "ChainAssignment":
        n = sum(len(c) for c in chains)
        chain_of = [-1] * n
        for idx, c in enumerate(chains):
            for x in c:
                chain_of[x] = idx
        return cls(chain_of=chain_of, k_bound=k_bound)


class OnlineStrategy(Protocol):
    def __call__(self, less: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray, int, int]: ...


def layered_first_fit(less: np.ndarray, k: int):
    """Default strategy: the layered reduction with First-Fit inside each layer."""
    return kernels.online_layers(np.ascontiguousarray(less, dtype=np.uint8), k)


def online_partition(p: Poset, k: int, n: int, strategy: OnlineStrategy = layered_first_fit) -> ChainAssignment:
    """Assign ids 0..n-1 to chains one at a time, never revisiting a decision.

    Element x goes to the least layer i whose union with the earlier layers
    (plus x) still has width at most i; inside a layer it joins the first
    chain it is comparable with throughout.  If x fits no layer up to k the
    width promise is broken and a (k+1)-antichain through x is reported.
    """
    if k < 1:
        raise ValueError("width bound must be positive")
    n = p.window(n)
    less = p.less_matrix(n)
    chain_of, layer_of, _, stopped = strategy(less, k)
    if stopped >= 0:
        x = int(stopped)
        prior = np.flatnonzero(~(less[x, :x] | less[:x, x]))
        sub = maximum_antichain(less[np.ix_(prior, prior)])
        witness = sorted([int(prior[i]) for i in sub][:k] + [x])
        raise WidthPromiseViolated(f"width exceeds {k} at element {x}", witness)
    return ChainAssignment(chain_of=[int(c) for c in chain_of], k_bound=kierstead_bound(k),
                           layer_of=[int(v) for v in layer_of])


def dilworth_offline(p: Poset | np.ndarray, limit: int = ORACLE_LIMIT) -> ChainAssignment:
    """Minimum chain cover: each matched pair u<v becomes a chain link u -> v."""
    less = p if isinstance(p, np.ndarray) else p.less_matrix(p.window(limit + 1))
    n = less.shape[0]
    if n > limit:
        raise OracleLimitExceeded(f"{n} elements exceed the oracle limit {limit}")
    nxt = np.full(n, -1, dtype=np.int64)
    if n and less.any():
        nxt = np.asarray(maximum_bipartite_matching(csr_matrix(less.astype(np.uint8)), perm_type="column"))
    has_pred = np.zeros(n, dtype=bool)
    has_pred[nxt[nxt >= 0]] = True
    chains = []
    for start in range(n):
        if has_pred[start]:
            continue
        chain, x = [], start
        while x >= 0:
            chain.append(int(x))
            x = int(nxt[x])
        chains.append(chain)
    chains.sort(key=min)
    return ChainAssignment.from_chains([sorted(c) for c in chains], k_bound=len(chains))


def chain_from_width(p: Poset, k: int, n: int) -> list[int]:
    """Largest class of the online partition; pigeonhole gives length >= n / chains used."""
    assign = online_partition(p, k, n)
    chains = assign.chains
    best = max(chains, key=len, default=[])
    used = max(assign.n_chains, 1)
    window = len(assign.chain_of)
    if len(best) * used < window:  # pigeonhole, checked on the actual count
        raise AssertionError("pigeonhole bound failed; partition is inconsistent")
    return best


def antichain_from_height(p: Poset, k: int, n: int) -> list[int]:
    """Colour x by the longest chains among earlier ids strictly below and above it.

    Two comparable elements of one colour would extend one of those chains,
    so every colour class is an antichain; there are at most k*k colours.
    """
    n = p.window(n)
    less = p.less_matrix(n)
    top = longest_chain(less)
    if len(top) > k:
        raise HeightPromiseViolated(f"chain of length {len(top)} exceeds {k}", top[: k + 1])
    if n == 0:
        return []
    topo = np.argsort(less.sum(axis=0), kind="stable").astype(np.int64)
    below, above = kernels.id_bounded_heights(np.ascontiguousarray(less, dtype=np.uint8), topo)
    classes: dict[tuple[int, int], list[int]] = {}
    for x in range(n):
        classes.setdefault((int(below[x]), int(above[x])), []).append(x)
    return max(classes.values(), key=lambda c: (len(c), -c[0]))


def colour_classes(p: Poset, n: int) -> dict[tuple[int, int], list[int]]:
    """The full colouring used by antichain_from_height (exposed for checks)."""
    n = p.window(n)
    less = p.less_matrix(n)
    topo = np.argsort(less.sum(axis=0), kind="stable").astype(np.int64)
    below, above = kernels.id_bounded_heights(np.ascontiguousarray(less, dtype=np.uint8), topo)
    classes: dict[tuple[int, int], list[int]] = {}
    for x in range(n):
        classes.setdefault((int(below[x]), int(above[x])), []).append(x)
    return classes


@dataclass(frozen=True)
class Monotone:
    elements: list[int]
    direction: str  # "ascending" or "descending"


def _greedy(less: np.ndarray, ids: list[int], ascending: bool) -> list[int]:
    # rel[a, b]: b may follow a in the run
    sub = less[np.ix_(ids, ids)]
    rel = sub if ascending else sub.T
    score = rel.sum(axis=1)  # successors (resp. predecessors) inside the chain
    m = len(ids)
    cur = int(np.argmax(score))  # ties go to the lowest id
    run = [cur]
    while True:
        later = np.flatnonzero(rel[cur, cur + 1:]) + cur + 1
        if len(later) == 0:
            break
        cur = int(later[np.argmax(score[later])])
        run.append(cur)
    assert all(0 <= i < m for i in run)
    return [ids[i] for i in run]


def monotone_extract(p: Poset, chain: Sequence[int], direction: str | None = None) -> Monotone:
    """An id-increasing, order-monotone subsequence of a chain.

    The ascending run starts at the element with the most successors in the
    chain and repeatedly moves to the later element above it that has the
    most successors; the descending run is the mirror image.  Without a
    hint the longer run wins, ascending on ties.
    """
    ids = sorted(set(int(x) for x in chain))
    if not ids:
        raise EmptyInput("monotone_extract needs a non-empty chain")
    if classify_set(p, ids) is not Kind.CHAIN:
        raise NotAChain("input is not a chain")
    less = p.less_matrix(ids[-1] + 1)
    asc = _greedy(less, ids, True)
    desc = _greedy(less, ids, False)
    if direction == "ascending" or (direction is None and len(asc) >= len(desc)):
        return Monotone(asc, "ascending")
    if direction not in (None, "descending"):
        raise ValueError(f"unknown direction {direction!r}")
    return Monotone(desc, "descending")
