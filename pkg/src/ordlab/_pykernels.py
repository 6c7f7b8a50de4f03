"""Pure Python/numpy twins of the compiled kernels in ``_kernels.pyx``.

Return values match the compiled versions exactly, except that
``max_matching`` may pick a different maximum matching of the same size.
"""

from __future__ import annotations

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching


def _matching_size(sub: np.ndarray) -> int:
    if sub.shape[0] == 0 or not sub.any():
        return 0
    mate = maximum_bipartite_matching(csr_matrix(sub), perm_type="column")
    return int((mate >= 0).sum())


def max_matching(less: np.ndarray) -> np.ndarray:
    n = less.shape[0]
    if n == 0:
        return np.empty(0, dtype=np.int64)
    # row u matched to column mate[u]; convert to "mate of each right vertex"
    mate_l = maximum_bipartite_matching(csr_matrix(less.astype(np.uint8)), perm_type="column")
    mate_r = np.full(n, -1, dtype=np.int64)
    for u, v in enumerate(mate_l):
        if v >= 0:
            mate_r[v] = u
    return mate_r


def online_layers(less: np.ndarray, k: int):
    n = less.shape[0]
    less = less.astype(bool)
    comp = less | less.T
    chain_of = np.full(n, -1, dtype=np.int64)
    layer_of = np.full(n, -1, dtype=np.int64)
    chain_layer: list[int] = []
    chain_members: list[list[int]] = []
    for x in range(n):
        placed = False
        inc_prev = ~comp[x, :x]
        for i in range(1, k + 1):
            cand = np.flatnonzero(inc_prev & (layer_of[:x] <= i))
            sub = less[np.ix_(cand, cand)]
            if len(cand) - _matching_size(sub) > i - 1:
                continue
            layer_of[x] = i
            for c, members in enumerate(chain_members):
                if chain_layer[c] == i and comp[x, members].all():
                    chain_of[x] = c
                    break
            if chain_of[x] < 0:
                chain_of[x] = len(chain_members)
                chain_layer.append(i)
                chain_members.append([])
            chain_members[chain_of[x]].append(x)
            placed = True
            break
        if not placed:
            return chain_of, layer_of, len(chain_members), x
    return chain_of, layer_of, len(chain_members), -1


def id_bounded_heights(less: np.ndarray, topo: np.ndarray):
    n = less.shape[0]
    less = less.astype(bool)
    below = np.zeros(n, dtype=np.int64)
    above = np.zeros(n, dtype=np.int64)
    topo = np.asarray(topo, dtype=np.int64)
    for x in range(n):
        order = [int(y) for y in topo if y < x]
        dp = np.zeros(n, dtype=np.int64)
        for y in order:
            preds = less[:x, y]
            dp[y] = 1 + (dp[:x][preds].max() if preds.any() else 0)
        mask = less[:x, x]
        if mask.any():
            below[x] = dp[:x][mask].max()
        dp = np.zeros(n, dtype=np.int64)
        for y in reversed(order):
            succ = less[y, :x]
            dp[y] = 1 + (dp[:x][succ].max() if succ.any() else 0)
        mask = less[x, :x]
        if mask.any():
            above[x] = dp[:x][mask].max()
    return below, above


def monotone_runs(less: np.ndarray, descending: int):
    n = less.shape[0]
    rel = less.T if descending else less
    rel = rel.astype(bool)
    run = np.ones(n, dtype=np.int64)
    for x in range(n - 2, -1, -1):
        nxt = rel[x, x + 1:]
        if nxt.any():
            run[x] = run[x + 1:][nxt].max() + 1
    return run
