"""Maximal chains, finite ideal decompositions, and trees of finite sequences."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import AntichainBoundExceeded, NoDeepPath, NotAChain, ParseError
from .order_core import FinitePoset, Kind, Ordering, Poset, classify_set, maximum_antichain

Path = tuple[int, ...]


# -- maximal chains -----------------------------------------------------------

def _greedy(less: np.ndarray, order: Iterable[int], mode: str, start: Sequence[int] = ()) -> list[int]:
    if mode not in ("chain", "antichain"):
        raise ValueError(f"mode must be 'chain' or 'antichain', not {mode!r}")
    comp = less | less.T
    members = list(start)
    for x in order:
        if x in members:
            continue
        row = comp[x, members] if members else np.ones(0, dtype=bool)
        if (mode == "chain" and row.all()) or (mode == "antichain" and not row.any()):
            members.append(int(x))
    return members


def greedy_maximal_chain(p: Poset, n: int, mode: str = "chain") -> list[int]:
    """Scan ids upward, keeping each one comparable (or incomparable) with everything kept so far."""
    n = p.window(n)
    return sorted(_greedy(p.less_matrix(n), range(n), mode))


def is_window_maximal(less: np.ndarray, members: Sequence[int], mode: str = "chain") -> bool:
    comp = less | less.T
    ms = set(members)
    for x in range(less.shape[0]):
        if x in ms:
            continue
        row = comp[x, list(members)]
        if (mode == "chain" and row.all()) or (mode == "antichain" and not row.any()):
            return False
    return True


def extend_chain_maximal(p: Poset, chain: Sequence[int], n: int) -> list[int]:
    """Add the elements comparable with all of ``chain``, greedily, until nothing else fits."""
    n = p.window(n)
    chain = sorted(set(int(x) for x in chain))
    if chain and max(chain) >= n:
        raise NotAChain("chain leaves the window")
    if classify_set(p, chain) not in (Kind.CHAIN,) and len(chain) > 1:
        raise NotAChain("input is not a chain")
    less = p.less_matrix(n)
    comp = less | less.T
    if chain:
        q = np.flatnonzero(comp[:, chain].all(axis=1))
    else:
        q = np.arange(n)
    out = sorted(_greedy(less, [int(x) for x in q], "chain", chain))
    assert is_window_maximal(less, out)
    return out


@dataclass(frozen=True)
class WindowChain:
    elements: list[int]
    lookahead: int
    margin_ok: bool  # members with ids below n - 2*lookahead all have a successor in the output


def maxless_chain(p: Poset, n: int, lookahead: int = 32) -> WindowChain:
    """Greedy maximal chain among elements with an ascending run above them longer than ``lookahead``."""
    n = p.window(n)
    less = p.less_matrix(n)
    runs = kernels.monotone_runs(np.ascontiguousarray(less, dtype=np.uint8), 0)
    q = [int(x) for x in np.flatnonzero(np.asarray(runs) > lookahead)]
    out = sorted(_greedy(less, q, "chain"))
    ok = True
    if out:
        a = np.asarray(out)
        has_succ = less[np.ix_(a, a)].any(axis=1)
        inner = a < n - 2 * lookahead
        ok = bool(has_succ[inner].all())
    return WindowChain(out, lookahead, ok)


# -- ideals -------------------------------------------------------------------

def is_ideal(p: Poset | np.ndarray, s: Iterable[int]) -> bool:
    """Downward closed and directed (every two members have a common upper bound inside)."""
    s = sorted(set(int(x) for x in s))
    if not s:
        return True
    if isinstance(p, np.ndarray):
        less = p
    elif isinstance(p, FinitePoset):
        less = p.rel
    else:  # streamed: judged on the window ending at the largest member
        less = p.less_matrix(max(s) + 1)
    if (less[:, s].any(axis=1) & ~np.isin(np.arange(less.shape[0]), s)).any():
        return False
    a = np.asarray(s)
    le = less[np.ix_(a, a)] | np.eye(len(a), dtype=bool)
    # a, b directed: some r with a <= r and b <= r
    for i, j in itertools.combinations(range(len(a)), 2):
        if not (le[i] & le[j]).any():
            return False
    return True


@dataclass(frozen=True)
class IdealFamily:
    ideals: list[list[int]]

    def check(self, less: np.ndarray, universe: Sequence[int] | None = None) -> None:
        universe = sorted(range(less.shape[0]) if universe is None else universe)
        covered = set().union(*map(set, self.ideals)) if self.ideals else set()
        if covered != set(universe):
            raise AssertionError("ideals do not cover the poset")
        for i, ideal in enumerate(self.ideals):
            if not is_ideal(less, ideal):
                raise AssertionError(f"member {i} is not an ideal")
            rest = set().union(*(set(o) for j, o in enumerate(self.ideals) if j != i))
            if set(ideal) <= rest:
                raise AssertionError(f"member {i} is covered by the others")


def essential_ideal_decomposition(p: FinitePoset | np.ndarray, bound: int | None = None) -> IdealFamily:
    """Cover by principal down-sets, pruned smallest-first while the cover survives.

    In a finite poset every ideal has a top, so what remains is one
    down-set per maximal element, each owning that element.
    """
    less = p if isinstance(p, np.ndarray) else p.rel
    n = less.shape[0]
    if bound is not None:
        anti = maximum_antichain(less)
        if len(anti) > bound:
            raise AntichainBoundExceeded(f"antichain of size {len(anti)} exceeds {bound}", sorted(anti))
    downs = [frozenset(np.flatnonzero(less[:, x]).tolist() + [x]) for x in range(n)]
    family = sorted(set(downs), key=lambda d: (len(d), sorted(d)))
    count = {x: 0 for x in range(n)}
    for d in family:
        for x in d:
            count[x] += 1
    kept = []
    for i, d in enumerate(family):
        if all(count[x] > 1 for x in d):
            for x in d:
                count[x] -= 1
        else:
            kept.append(d)
    out = IdealFamily(sorted((sorted(d) for d in kept), key=lambda d: (max(d), d)))
    out.check(less)
    return out


# -- trees of finite sequences ---------------------------------------------

def kb_compare(s: Sequence[int], t: Sequence[int]) -> Ordering:
    """Kleene-Brouwer: s is below t when s properly extends t or branches off to its left."""
    s, t = tuple(s), tuple(t)
    if s == t:
        return Ordering.EQUAL
    for a, b in zip(s, t):
        if a != b:
            return Ordering.BELOW if a < b else Ordering.ABOVE
    return Ordering.BELOW if len(s) > len(t) else Ordering.ABOVE


@dataclass(frozen=True)
class FiniteTree:
    nodes: frozenset[Path]

    @classmethod
    def of(cls, nodes: Iterable[Sequence[int]], close: bool = True) -> "FiniteTree":
        ns = {tuple(int(v) for v in n) for n in nodes}
        if close:
            ns |= {n[:i] for n in ns for i in range(len(n))}
            ns.add(())
        t = cls(frozenset(ns))
        t.check()
        return t

    def check(self) -> None:
        for n in self.nodes:
            if n and n[:-1] not in self.nodes:
                raise ParseError(f"node {list(n)} has no parent in the tree")
            if any(v < 0 for v in n):
                raise ParseError(f"node {list(n)} has a negative entry")

    def children(self, node: Path) -> list[Path]:
        return sorted((c for c in self._kids().get(node, ())), key=lambda c: c[-1])

    def _kids(self) -> dict[Path, list[Path]]:
        cache = self.__dict__.get("_kid_cache")
        if cache is None:
            cache = {}
            for n in self.nodes:
                if n:
                    cache.setdefault(n[:-1], []).append(n)
            object.__setattr__(self, "_kid_cache", cache)
        return cache

    @property
    def depth(self) -> int:
        return max((len(n) for n in self.nodes), default=0)

    def to_json(self) -> dict:
        return {"nodes": [list(n) for n in sorted(self.nodes, key=lambda n: (len(n), n))]}

    @classmethod
    def from_json(cls, obj: dict) -> "FiniteTree":
        if not isinstance(obj, dict) or not isinstance(obj.get("nodes"), list):
            raise ParseError("tree file must be an object with a 'nodes' list")
        return cls.of(obj["nodes"])


def leftmost_path(tree: FiniteTree, depth: int) -> Path:
    """Lexicographically least path of the given length, built one least extendable entry at a time."""
    # extendable[n]: n has an extension of length depth inside the tree
    extendable: dict[Path, bool] = {}
    for n in sorted(tree.nodes, key=len, reverse=True):
        extendable[n] = len(n) == depth or (len(n) < depth and any(extendable.get(c, False) for c in tree.children(n)))
    if not extendable.get((), False):
        raise NoDeepPath(f"tree has no node at depth {depth}")
    path: Path = ()
    while len(path) < depth:
        path = next(c for c in tree.children(path) if extendable[c])
    return path


def random_tree(rng: np.random.Generator, max_nodes: int = 4000, branching: int = 4,
                depth: int = 10, keep: float = 0.45) -> FiniteTree:
    """Random pruned tree: each node gets a binomial number of distinct labels from [0, 2*branching)."""
    nodes: list[Path] = [()]
    frontier: list[Path] = [()]
    while frontier and len(nodes) < max_nodes:
        nxt = []
        for n in frontier:
            if len(n) >= depth:
                continue
            k = int(rng.binomial(branching, keep))
            for lab in sorted(rng.choice(2 * branching, size=k, replace=False).tolist()):
                if len(nodes) >= max_nodes:
                    break
                nodes.append(n + (int(lab),))
                nxt.append(n + (int(lab),))
        frontier = nxt
    return FiniteTree.of(nodes)


def discrete_descent_tree(p: FinitePoset | np.ndarray, root: int, max_nodes: int = 100_000) -> FiniteTree:
    """Descending sequences from ``root`` in which each step goes to an immediate predecessor."""
    less = p if isinstance(p, np.ndarray) else p.rel
    # cover[x, y]: y < x with nothing strictly between
    between = (less.astype(np.uint8) @ less.astype(np.uint8)) > 0
    cover = less.T & ~between.T
    nodes: list[Path] = [(), (root,)]
    stack: list[Path] = [(root,)]
    while stack:
        node = stack.pop()
        kids = np.flatnonzero(cover[node[-1]])
        assert len(kids) < 2 or not (less[np.ix_(kids, kids)]).any(), "lower covers must be an antichain"
        for y in kids:
            c = node + (int(y),)
            nodes.append(c)
            stack.append(c)
            if len(nodes) > max_nodes:
                raise OverflowError(f"descent tree exceeds {max_nodes} nodes")
    return FiniteTree.of(nodes, close=False)
