# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops.  Every function here has a twin in ``_pykernels``."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef int _augment(const unsigned char[:, :] less, long[:] cand, int nc,
                  int u, long[:] mate_r, unsigned char[:] seen):
    # Kuhn search from left vertex cand[u] over right vertices cand[0..nc)
    cdef int v
    cdef long a = cand[u]
    for v in range(nc):
        if seen[v] or not less[a, cand[v]]:
            continue
        seen[v] = 1
        if mate_r[v] < 0 or _augment(less, cand, nc, mate_r[v], mate_r, seen):
            mate_r[v] = u
            return 1
    return 0


cdef int _matching_size(const unsigned char[:, :] less, long[:] cand, int nc,
                        long[:] mate_r, long[:] mate_l, unsigned char[:] seen):
    cdef int u, v, size = 0
    cdef long a
    for v in range(nc):
        mate_r[v] = -1
    for u in range(nc):
        mate_l[u] = -1
    # greedy pass first; id-aligned chains are matched almost entirely here
    for u in range(nc):
        a = cand[u]
        for v in range(nc):
            if mate_r[v] < 0 and less[a, cand[v]]:
                mate_r[v] = u
                mate_l[u] = v
                size += 1
                break
    for u in range(nc):
        if mate_l[u] >= 0:
            continue
        for v in range(nc):
            seen[v] = 0
        if _augment(less, cand, nc, u, mate_r, seen):
            size += 1
    return size


def max_matching(const unsigned char[:, :] less):
    """Maximum matching of the strict-order bipartite graph; returns mate of each right vertex."""
    cdef int n = less.shape[0]
    cdef long[:] cand = np.arange(n, dtype=np.int64)
    cdef long[:] mate_r = np.empty(n, dtype=np.int64)
    cdef long[:] mate_l = np.empty(n, dtype=np.int64)
    cdef unsigned char[:] seen = np.zeros(n, dtype=np.uint8)
    _matching_size(less, cand, n, mate_r, mate_l, seen)
    return np.asarray(mate_r)


def online_layers(const unsigned char[:, :] less, int k):
    """Layered online chain partition.

    Element x joins the least layer i with width(layers 1..i plus x) <= i,
    then the first chain of that layer comparable with all of its members.
    Returns (chain_of, layer_of, n_chains, stopped_at) where stopped_at is
    -1 unless some x fits no layer <= k.
    """
    cdef int n = less.shape[0]
    cdef long[:] chain_of = np.full(n, -1, dtype=np.int64)
    cdef long[:] layer_of = np.full(n, -1, dtype=np.int64)
    cdef long[:] chain_layer = np.full(n + 1, -1, dtype=np.int64)
    cdef long[:] chain_last = np.full(n + 1, -1, dtype=np.int64)
    cdef long[:] prev_member = np.full(n, -1, dtype=np.int64)
    cdef long[:] cand = np.empty(n, dtype=np.int64)
    cdef long[:] mate_r = np.empty(n, dtype=np.int64)
    cdef long[:] mate_l = np.empty(n, dtype=np.int64)
    cdef unsigned char[:] seen = np.zeros(n, dtype=np.uint8)
    cdef int x, y, i, nc, c, n_chains = 0, placed, ok
    cdef long m
    for x in range(n):
        placed = 0
        for i in range(1, k + 1):
            nc = 0
            for y in range(x):
                if layer_of[y] <= i and not less[x, y] and not less[y, x]:
                    cand[nc] = y
                    nc += 1
            if nc - _matching_size(less, cand, nc, mate_r, mate_l, seen) > i - 1:
                continue
            layer_of[x] = i
            for c in range(n_chains):
                if chain_layer[c] != i:
                    continue
                ok = 1
                m = chain_last[c]
                while m >= 0:
                    if not less[x, m] and not less[m, x]:
                        ok = 0
                        break
                    m = prev_member[m]
                if ok:
                    chain_of[x] = c
                    break
            if chain_of[x] < 0:
                chain_of[x] = n_chains
                chain_layer[n_chains] = i
                n_chains += 1
            c = chain_of[x]
            prev_member[x] = chain_last[c]
            chain_last[c] = x
            placed = 1
            break
        if not placed:
            return np.asarray(chain_of), np.asarray(layer_of), n_chains, x
    return np.asarray(chain_of), np.asarray(layer_of), n_chains, -1


def id_bounded_heights(const unsigned char[:, :] less, long[:] topo):
    """For each x: longest chain among ids < x strictly below x, and strictly above x."""
    cdef int n = less.shape[0]
    cdef long[:] below = np.zeros(n, dtype=np.int64)
    cdef long[:] above = np.zeros(n, dtype=np.int64)
    cdef long[:] dp = np.zeros(n, dtype=np.int64)
    cdef int x, a, b, ya, yb, best
    for x in range(n):
        # chains ending at y, using ids < x only, in topological order
        for a in range(n):
            ya = topo[a]
            if ya >= x:
                continue
            best = 0
            for b in range(a):
                yb = topo[b]
                if yb < x and less[yb, ya] and dp[yb] > best:
                    best = dp[yb]
            dp[ya] = best + 1
            if less[ya, x] and dp[ya] > below[x]:
                below[x] = dp[ya]
        for a in range(n - 1, -1, -1):
            ya = topo[a]
            if ya >= x:
                continue
            best = 0
            for b in range(n - 1, a, -1):
                yb = topo[b]
                if yb < x and less[ya, yb] and dp[yb] > best:
                    best = dp[yb]
            dp[ya] = best + 1
            if less[x, ya] and dp[ya] > above[x]:
                above[x] = dp[ya]
    return np.asarray(below), np.asarray(above)


def monotone_runs(const unsigned char[:, :] less, int descending):
    """run[x] = longest id-increasing sequence starting at x that keeps going down (or up)."""
    cdef int n = less.shape[0]
    cdef long[:] run = np.ones(n, dtype=np.int64)
    cdef int x, y
    for x in range(n - 1, -1, -1):
        for y in range(x + 1, n):
            if descending:
                if less[y, x] and run[y] + 1 > run[x]:
                    run[x] = run[y] + 1
            else:
                if less[x, y] and run[y] + 1 > run[x]:
                    run[x] = run[y] + 1
    return np.asarray(run)
