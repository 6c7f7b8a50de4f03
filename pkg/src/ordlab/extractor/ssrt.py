"""Homogeneous sets for stable colourings of pairs, and the two-chain extractor built on them."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..decomposition import monotone_extract
from ..errors import NotTwoChains, StabilityViolated, WindowTooSmall
from ..homogeneity import certify_matrix, least_passing_tail
from ..order_core import FinitePoset, Poset
from .common import Extraction, Params, sort_chain


@dataclass
class ColoringTable:
    """c[x, y] for x < y < N; entries on and below the diagonal are -1."""

    c: np.ndarray
    stability: int

    @property
    def size(self) -> int:
        return self.c.shape[0]

    @classmethod
    def from_function(cls, n: int, fn, stability: int) -> "ColoringTable":
        c = np.full((n, n), -1, dtype=np.int16)
        for x in range(n):
            for y in range(x + 1, n):
                c[x, y] = fn(x, y)
        return cls(c, stability)

    def changes(self) -> np.ndarray:
        n = self.size
        out = np.zeros(n, dtype=np.int64)
        if n > 2:
            diff = self.c[:, 2:] != self.c[:, 1:-1]
            cols = np.arange(2, n)
            valid = cols[None, :] > np.arange(n)[:, None] + 1
            out = (diff & valid).sum(axis=1)
        return out

    def last_change(self) -> np.ndarray:
        """Least y such that row x is constant on [y, N)."""
        n = self.size
        out = np.arange(n) + 1
        for x in range(n - 2):
            row = self.c[x, x + 1:]
            d = np.flatnonzero(row[1:] != row[:-1])
            if len(d):
                out[x] = x + 2 + int(d[-1])
        return out

    def check(self) -> None:
        ch = self.changes()
        bad = np.flatnonzero(ch > self.stability)
        if len(bad):
            x = int(bad[0])
            raise StabilityViolated(x, int(ch[x]))

    def is_homogeneous(self, h: Sequence[int]) -> bool:
        h = sorted(h)
        if len(h) < 2:
            return True
        idx = np.asarray(h)
        vals = self.c[np.ix_(idx, idx)][np.triu_indices(len(h), 1)]
        return bool((vals == vals[0]).all())


def random_stable_coloring(n: int, colors: int, rng: np.random.Generator,
                           stability: int = 2, mean_gap: float = 5.0) -> ColoringTable:
    """Each row starts on a random colour and switches at most ``stability`` times, at geometric gaps."""
    c = np.full((n, n), -1, dtype=np.int16)
    for x in range(n - 1):
        col = int(rng.integers(colors))
        flips = int(rng.integers(stability + 1))
        points = x + 1 + np.cumsum(rng.geometric(1.0 / mean_gap, size=flips))
        c[x, x + 1:] = col
        for pt in points:
            if pt >= n:
                break
            col = int((col + rng.integers(1, colors)) % colors)
            c[x, pt:] = col
    return ColoringTable(c, stability)


@dataclass
class SSRTResult:
    elements: list[int]
    color: int
    level: int  # the change count i singled out
    cutoff: int  # last row with more than i changes, or -1


def ssrt_extract(table: ColoringTable, support: int | None = None) -> SSRTResult:
    """Greedy homogeneous set read off the rows' final colours.

    Rows beyond the cutoff change colour at most i times, so each has a
    last change y_x after which c(x, .) is its limit colour; picking x_s
    past every earlier pick's y_x makes all pairs carry that colour.
    """
    table.check()
    n = table.size
    if n == 0:
        raise WindowTooSmall("empty colouring")
    ch = table.changes()
    support = support or max(1, n // 10)
    level = 0
    while (ch >= level + 1).sum() >= support:
        level += 1
    over = np.flatnonzero(ch > level)
    cutoff = int(over[-1]) if len(over) else -1
    last = table.last_change()
    limit = np.full(n, -1, dtype=np.int64)
    limit[: n - 1] = table.c[np.arange(n - 1), n - 1]
    colours = sorted(set(int(v) for v in limit[: n - 1])) or [0]
    best: list[int] = []
    best_col = colours[0]
    for col in colours:
        picks: list[int] = []
        reach = 0
        for x in range(cutoff + 1, n):
            if x < reach:
                continue
            if x == n - 1 or limit[x] == col:
                picks.append(x)
                reach = max(reach, int(last[x]))
        if len(picks) > len(best):
            best, best_col = picks, col
    assert table.is_homogeneous(best)
    return SSRTResult(best, best_col, level, cutoff)


# -- two-chain extraction -----------------------------------------------------

def cd2_coloring(comp: np.ndarray) -> ColoringTable:
    """comp[n, i]: p_n comparable with q_i.  Colours 0/1/2 as in the case split."""
    n = comp.shape[0]
    c = np.full((n, n), -1, dtype=np.int16)
    idx = np.arange(n)
    for x in range(n):
        row = comp[x, :n]
        early = row[: x + 1].any()
        later = np.cumsum(row[x + 1:]) > 0  # some i in (x, y] comparable
        ys = idx[x + 1:]
        c[x, ys] = np.where(later, 1, 2 if early else 0)
    return ColoringTable(c, 2)


def _cofincop(less: np.ndarray, d0: list[int], d1: list[int]) -> list[int]:
    """Largest class of d0 by comparability pattern against d1 (lowest pattern on ties)."""
    if not d1:
        return d0
    a, b = np.asarray(d0), np.asarray(d1)
    comp = less[np.ix_(a, b)] | less[np.ix_(b, a)].T
    keys = [tuple(r) for r in comp.astype(int)]
    groups: dict[tuple, list[int]] = {}
    for e, k in zip(d0, keys):
        groups.setdefault(k, []).append(e)
    return max(groups.items(), key=lambda kv: (len(kv[1]), tuple(-v for v in kv[0])))[1]


def extract_cd2_sads(p: Poset, chains: Sequence[Sequence[int]], params: Params | None = None,
                     stable_share: float = 0.25) -> Extraction:
    from .tower import extract_tower

    params = params or Params()
    if len(chains) != 2:
        raise NotTwoChains(f"expected two chains, got {len(chains)}")
    window = p.window(params.window)
    less = p.less_matrix(window)
    c0, c1 = ([int(x) for x in c if x < window] for c in chains)
    if not c0:
        c0, c1 = c1, c0
    if not c0:
        raise WindowTooSmall("both chains are empty in the window")
    transcript: dict = {"strategy": "cd2-sads"}

    def done(ch: list[int], asc_less: np.ndarray, dual: bool, extra: dict) -> Extraction:
        ch = sort_chain(asc_less, ch)
        t, _ = least_passing_tail(asc_less, ch, params.m, "inf")
        ch = ch[t:]
        cert = certify_matrix(asc_less, ch, params.m, "inf")
        transcript.update(extra, tail=t, certificate=cert.to_json())
        return Extraction(ch, not dual, cert, transcript)

    if not c1:
        return done(c0, less, False, {"case": "single-chain"})
    ps, qs = np.asarray(c0), np.asarray(c1)
    n = min(len(ps), len(qs))
    comp = less[np.ix_(ps, qs)] | less[np.ix_(qs, ps)].T
    table = cd2_coloring(comp[:n, :n])
    res = ssrt_extract(table)
    h = res.elements
    transcript.update(color=res.color, H=h, level=res.level, cutoff=res.cutoff)
    if len(h) < 2:
        raise WindowTooSmall(f"homogeneous set of size {len(h)} is too small")
    if res.color == 0:
        return done([c0[x] for x in h], less, False, {"case": 0})
    if res.color == 1:
        pairs = []
        for x in h:
            hits = np.flatnonzero(comp[x, x + 1:]) + x + 1
            if len(hits):
                pairs.append((x, int(hits[0])))
    else:
        hit_any = [np.flatnonzero(comp[x]) for x in h]
        m0 = max((int(v.max()) + 1 for v in hit_any if len(v)), default=0)
        if m0 <= max(h) // 2:
            keep = _cofincop(less, [c0[x] for x in h], c1[:m0])
            return done(keep, less, False, {"case": 2, "m0": m0, "branch": "bounded"})
        pairs, top = [], -1
        for x in h:
            if x <= top:
                continue
            hits = np.flatnonzero(comp[x, top + 1:]) + top + 1
            if len(hits):
                pairs.append((x, int(hits[0])))
                top = max(x, int(hits[0]))
        transcript.update(m0=m0, branch="unbounded")
    transcript["injection"] = pairs
    return _inj_to_chain(p, less, c0, c1, pairs, params, stable_share, transcript, done, extract_tower)


def _inj_to_chain(p, less, c0, c1, pairs, params, stable_share, transcript, done, extract_tower):
    xs = [(a, b) for a, b in pairs if less[c0[a], c1[b]]]
    ys = [(a, b) for a, b in pairs if less[c1[b], c0[a]]]
    dual = len(ys) > len(xs)
    side = ys if dual else xs
    lt = less.T if dual else less
    transcript.update(side="Y" if dual else "X", pairs_used=len(side))
    if not side:
        raise WindowTooSmall("injection is empty in the window")
    lpts = [c0[a] for a, _ in side]
    la = np.asarray(lpts)
    # instability surrogate: an early element that keeps receiving later
    # arrivals on both sides
    half = len(lpts) // 2
    early, late = la[:half], la[half:]
    need = max(3, int(stable_share * len(late)))
    ups = lt[np.ix_(early, late)].sum(axis=1)
    downs = lt[np.ix_(late, early)].sum(axis=0)
    unstable = np.flatnonzero((ups >= need) & (downs >= need))
    fam = [c0, c1]

    def via_tower(seq_elems: list[int], direction: str | None, branch: str) -> Extraction:
        view = FinitePoset(less, validate=False)
        mono = monotone_extract(view, seq_elems, direction).elements
        sub_ex = extract_tower(p, fam, mono, params)
        transcript.update(branch=branch, seed=mono, tower=sub_ex.transcript)
        sub_ex.transcript = transcript
        return sub_ex

    if not len(unstable):
        return via_tower(lpts, None, "stable")
    pn = lpts[int(unstable[0])]
    q_above = {b: int(lt[c1[b], np.asarray(c1)].sum()) for _, b in side}
    for a, b in side:
        if (pn == c0[a] or lt[pn, c0[a]]) and q_above[b] >= need:
            down = [x for x in c0 if x == pn or lt[x, pn]]
            up = [y for y in c1 if y == c1[b] or lt[c1[b], y]]
            return done(down + up, lt, dual, {"branch": "unstable-join", "pivot": pn, "q": c1[b]})
    tops = [c1[b] for a, b in side if pn == c0[a] or lt[pn, c0[a]]]
    return via_tower(tops, "descending" if not dual else "ascending", "unstable-descent")
