"""Tower extraction for posets with a finite chain decomposition.

A labeled tree of ladder terms is grown from the seed: every node carries
a sequence inside the chain named by its label, and a child labeled i
climbs into chain i above its parent's sequence.  A node counts as alive
when its sequence is Found on a fixed share of its parent's indices.
Either some alive node below the last level has no alive child (then a
tail of its sequence is returned) or every alive branch reaches the last
level, and the tree helper picks a node whose label recurs below each child.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..errors import HypothesisViolated, SeedNotAscending
from ..homogeneity import (
    Base,
    Evaluator,
    Ladder,
    alive_prefix,
    certify_matrix,
    dominates_forall_exists,
    least_passing_tail,
)
from ..order_core import Poset
from .common import Extraction, Params, orient, sort_chain
from .trees import LabeledTree, Node, tree_helper


class _Tower:
    def __init__(self, less: np.ndarray, chains: list[list[int]], seed: Sequence[int], params: Params):
        self.less = less
        self.chains = chains
        self.k = len(chains)
        self.params = params
        self.ev = Evaluator(less, chains, budget_base=params.budget)
        self.terms: dict[Node, object] = {(0,): Base(tuple(seed))}
        self._alive: dict[Node, bool] = {}

    def seq(self, node: Node) -> list[int]:
        if node not in self.terms:
            self.terms[node] = Ladder(self.terms[node[:-1]], node[-1])
        return self.ev.sequence(self.terms[node])

    def alive(self, node: Node) -> bool:
        if node not in self._alive:
            if len(node) == 1:
                self._alive[node] = len(self.seq(node)) > 0
            else:
                parent = node[:-1]
                need = alive_prefix(len(self.seq(parent)), self.params.ratio)
                self._alive[node] = self.alive(parent) and len(self.seq(node)) >= need
        return self._alive[node]

    def alive_children(self, node: Node) -> list[Node]:
        return [node + (i,) for i in range(self.k) if i != node[-1] and self.alive(node + (i,))]

    def first_stuck(self, node: Node) -> Node | None:
        """Depth-first, lowest label first: an alive node above the last level without alive children."""
        if len(node) - 1 == self.k:
            return None
        kids = self.alive_children(node)
        if not kids:
            return node
        for c in kids:
            hit = self.first_stuck(c)
            if hit is not None:
                return hit
        return None

    def alive_tree(self) -> LabeledTree:
        nodes, stack = [], [(0,)]
        while stack:
            n = stack.pop()
            nodes.append(n)
            if len(n) - 1 < self.k:
                stack.extend(self.alive_children(n))
        return LabeledTree.of(nodes, self.k)


def _threshold(less: np.ndarray, chain: Sequence[int], xs: Sequence[int]) -> int:
    """Least m such that no element of ``chain`` above x_m is incomparable with a listed x."""
    if not len(xs) or not len(chain):
        return 0
    xs = np.asarray(xs)
    c = np.asarray(chain)
    le = less[np.ix_(xs, c)] | (xs[:, None] == c[None, :])  # x_n <= p
    has = le.any(axis=0)
    hi = np.where(has, len(xs) - 1 - np.argmax(le[::-1], axis=0), -1)
    ge = less[np.ix_(c, xs)] | (c[:, None] == xs[None, :])  # p <= x_n
    incomparable = ~(le.T | ge).all(axis=1)
    bad = incomparable & (hi >= 0)
    return int(hi[bad].max()) + 1 if bad.any() else 0


def extract_tower(p: Poset, chains: Sequence[Sequence[int]], seed: Sequence[int],
                  params: Params | None = None, reading: str = "inf") -> Extraction:
    params = params or Params()
    window = p.window(params.window)
    base_less = p.less_matrix(window)
    seed = [int(x) for x in seed]
    if not seed:
        raise SeedNotAscending("empty seed")
    if max(seed) >= window:
        raise SeedNotAscending("seed leaves the window")
    less, dual = orient(base_less, seed)
    chains = [[x for x in c if x < window] for c in chains]
    home = [i for i, c in enumerate(chains) if seed[0] in c]
    if not home or not set(seed) <= set(chains[home[0]]):
        raise SeedNotAscending("seed does not lie inside a single chain")
    order = [home[0]] + [i for i in range(len(chains)) if i != home[0]]
    relabeled = [sorted(chains[i], key=lambda x: x) for i in order]
    transcript: dict = {"strategy": "tower", "k": len(chains), "dual": dual, "relabel": order,
                        "seed": seed, "ratio": params.ratio}

    def finish(elements: list[int], extra: dict) -> Extraction:
        cert = certify_matrix(less, elements, params.m, reading)
        transcript.update(extra)
        transcript["certificate"] = cert.to_json()
        return Extraction(list(elements), not dual, cert, transcript)

    if len(chains) == 1:
        t, _ = least_passing_tail(less, seed, params.m, reading)
        return finish(seed[t:], {"case": "single-chain", "node": [0], "tail": t})

    tower = _Tower(less, relabeled, seed, params)
    stuck = tower.first_stuck((0,))
    transcript["lengths"] = {"/".join(map(str, n)): len(tower.seq(n)) for n in sorted(tower.terms)}
    if stuck is not None:
        seq = tower.seq(stuck)
        t, _ = least_passing_tail(less, seq, params.m, reading)
        return finish(seq[t:], {"case": 1, "node": [order[i] for i in stuck], "tail": t})

    tree = tower.alive_tree()
    try:
        sigma = tree_helper(tree)
    except HypothesisViolated as exc:  # cannot happen when every alive branch is full height
        raise AssertionError(f"alive tree breaks the tree helper's hypotheses: {exc}") from None
    label = sigma[-1]
    xs = tower.seq(sigma)
    kids = tree.children(sigma)
    etas = [next(d for d in tree.descendants(c) if d[-1] == label) for c in kids]
    eta_seqs = [tower.seq(e) for e in etas]
    span = min(len(s) for s in eta_seqs)
    ys = []
    for n in range(span):
        vals = [s[n] for s in eta_seqs]
        ys.append(max(vals, key=lambda v: int(less[np.asarray(vals), v].sum())))
    present = {c[-1] for c in kids} | {label}
    excluded = [i for i in range(len(chains)) if i not in present]
    m_thr = max([_threshold(less, relabeled[i], xs) for i in excluded], default=0)
    m_thr = min(m_thr, max(len(xs) - 1, 0))
    y_start = None
    if dominates_forall_exists(less, ys, xs):
        body = xs[m_thr:]
    else:
        y_start = next(n for n, y in enumerate(ys) if less[xs[-1], y])
        body = sort_chain(less, list(xs[m_thr:]) + list(ys[y_start:]))
    t, _ = least_passing_tail(less, body, params.m, reading)
    claims = _claims(less, relabeled, xs, ys, kids, excluded, m_thr, params.m, params.lookahead)
    return finish(body[t:], {
        "case": 2, "node": [order[i] for i in sigma], "X": xs, "Y": ys,
        "eta": [[order[i] for i in e] for e in etas], "m": m_thr, "n": y_start, "tail": t,
        "excluded": [order[i] for i in excluded], **claims,
    })


def _claims(less, chains, xs, ys, kids, excluded, m_thr, m_count, margin) -> dict:
    """Window checks recorded for case 2.

    claim1: every member of a child's chain lies above all of X or below
    some Y; only members below ``window - margin`` are checked, since those
    at the very end of the window have not yet been overtaken by a listed Y.
    claim2: no element of an excluded chain is Violating against the X tail.
    """
    xs_a, ys_a = np.asarray(xs), np.asarray(ys)
    limit = less.shape[0] - margin
    claim1 = True
    for c in kids:
        for q in chains[c[-1]]:
            if q >= limit:
                break
            above_all = bool(less[xs_a, q].all()) if len(xs_a) else True
            below_some = bool(less[q, ys_a].any()) if len(ys_a) else False
            if not (above_all or below_some):
                claim1 = False
                break
    tail = xs[m_thr:]
    claim2 = True
    if tail and excluded:
        cert = certify_matrix(less, tail, m_count, "inf")
        for i in excluded:
            if any(cert.verdicts[q] == "violating" for q in chains[i]):
                claim2 = False
    return {"claim1": claim1, "claim1_margin": margin, "claim2": claim2}
