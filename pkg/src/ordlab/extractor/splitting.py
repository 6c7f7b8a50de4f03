"""Splitting chains into a well-founded part and the rest, and the extractor that cycles through them."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .. import kernels
from ..errors import NoAscendingSequenceFound, NoCounterexamplesInWindow, NotLinear
from ..homogeneity import (
    build_cx_sequence,
    certify_matrix,
    counterexample_table,
    dominates_forall_exists,
    least_passing_tail,
)
from ..order_core import Poset
from .common import Extraction, Params


@dataclass(frozen=True)
class Split:
    well_founded: list[int]  # W
    rest: list[int]  # R, everything sitting above a long descent
    lookahead: int


def _descent_runs(less: np.ndarray) -> np.ndarray:
    return np.asarray(kernels.monotone_runs(np.ascontiguousarray(less, dtype=np.uint8), 1))


def split_matrix(less: np.ndarray, lookahead: int) -> tuple[np.ndarray, np.ndarray]:
    """Boolean masks (W, R) for a linear window given as a strict order matrix."""
    n = less.shape[0]
    comp = less | less.T | np.eye(n, dtype=bool)
    if not comp.all():
        i, j = np.argwhere(~comp)[0]
        raise NotLinear(f"elements {int(i)} and {int(j)} are incomparable")
    seeds = _descent_runs(less) > lookahead
    rest = seeds | (less[seeds].any(axis=0) if seeds.any() else np.zeros(n, dtype=bool))
    return ~rest, rest


def wf_split(p: Poset, window: int, lookahead: int = 32) -> Split:
    """W below R: R is the upward closure of the elements starting a descent longer than ``lookahead``."""
    n = p.window(window)
    w, r = split_matrix(p.less_matrix(n), lookahead)
    return Split(np.flatnonzero(w).tolist(), np.flatnonzero(r).tolist(), lookahead)


def cofinal_ascending(less: np.ndarray, elems: Sequence[int]) -> list[int]:
    """c_0 = least id; c_{k+1} = least id strictly above c_k and at or above the next listed element."""
    elems = sorted(int(e) for e in elems)
    if not elems:
        return []
    out = [elems[0]]
    arr = np.asarray(elems)
    for x in elems[1:]:
        cur = out[-1]
        if x == cur or less[x, cur]:
            continue
        ok = less[cur, arr] & (less[x, arr] | (arr == x))
        hits = arr[ok]
        if not len(hits):
            break
        out.append(int(hits[0]))
    return out


@dataclass
class RefutationWitness:
    """A closed walk of chain indices i -> h(i), with the sequences each step was built from."""

    cycle: list[int]
    sequences: dict[int, list[int]]
    counterexamples: dict[int, list[int]]
    dominance: list[bool] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"cycle": self.cycle, "sequences": {str(k): v for k, v in self.sequences.items()},
                "counterexamples": {str(k): v for k, v in self.counterexamples.items()},
                "dominance": self.dominance}


def extract_wfsplit_aca(p: Poset, chains: Sequence[Sequence[int]], params: Params | None = None,
                        min_size: int | None = None) -> Extraction | RefutationWitness:
    """Follow i -> h(i), the chain holding most counterexamples to A_i, until some A_i has none.

    A repeated index ends the walk with a RefutationWitness instead.
    """
    params = params or Params()
    window = p.window(params.window)
    less = p.less_matrix(window)
    look = params.lookahead
    min_size = params.m if min_size is None else min_size
    seqs: dict[int, list[int]] = {}
    sizes = {}
    for i, c in enumerate(chains):
        c = sorted(x for x in c if x < window)
        if not c:
            continue
        sub = less[np.ix_(c, c)]
        w, _ = split_matrix(sub, look)
        wl = np.flatnonzero(w)
        succ = sub[np.ix_(wl, wl)].sum(axis=1)
        hat = [c[j] for j, s in zip(wl, succ) if s >= look]
        sizes[i] = len(hat)
        if len(hat) >= min_size:
            seqs[i] = cofinal_ascending(less, hat)
    transcript: dict = {"strategy": "wf-split", "lookahead": look, "hat_sizes": {str(k): v for k, v in sizes.items()},
                        "infinite": sorted(seqs)}
    if not seqs:
        raise NoAscendingSequenceFound("no chain has a large well-founded part with many successors")
    order = sorted(seqs)
    i = order[0]
    walk: list[int] = []
    cxs: dict[int, list[int]] = {}
    while i not in walk:
        walk.append(i)
        a = seqs[i]
        is_cx, _ = counterexample_table(less, a)
        if not is_cx.any():
            t, _ = least_passing_tail(less, a, params.m, "inf")
            cert = certify_matrix(less, a[t:], params.m, "inf")
            transcript.update(h=walk, chosen=i, tail=t, certificate=cert.to_json())
            return Extraction(a[t:], True, cert, transcript)
        try:
            cx = build_cx_sequence(p, chains, a, window)
        except NoCounterexamplesInWindow:
            break
        cxs[i] = cx.elements
        nxt = cx.chain
        if nxt not in seqs:
            transcript.update(h=walk, stuck_at=nxt)
            raise NoAscendingSequenceFound(f"counterexamples to A_{i} sit in chain {nxt}, which has no A")
        i = nxt
    start = walk.index(i) if i in walk else 0
    cycle = walk[start:] + [i]
    dom = [dominates_forall_exists(less, cxs.get(a, []), seqs[b]) for a, b in zip(cycle, cycle[1:])]
    return RefutationWitness(cycle, {k: seqs[k] for k in cycle}, {k: cxs.get(k, []) for k in cycle}, dom)
