"""Width-2 extraction by iterating the width-2 ladder and reading off its diagonal."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..errors import SeedNotAscending, WidthPromiseViolated
from ..homogeneity import Base, Evaluator, LadderW2, alive_prefix, certify_matrix, is_ascending, least_passing_tail
from ..order_core import Poset, maximum_antichain
from .common import Extraction, Params, orient


def extract_w2_diagonal(p: Poset, seed: Sequence[int], params: Params | None = None,
                        max_levels: int | None = None) -> Extraction:
    """Levels e_0 = seed, e_{i+1} = LadderW2(e_i); a dead level ends the search early.

    With every level alive the diagonal b_i = e_i(i) is returned.  Only the
    first ``max_levels`` levels are built (default 4m + 8), which bounds the
    diagonal's length.  The certificate always uses the cofinite reading.
    """
    params = params or Params()
    window = p.window(params.window)
    base_less = p.less_matrix(window)
    anti = maximum_antichain(base_less)
    if len(anti) > 2:
        raise WidthPromiseViolated(f"window has an antichain of size {len(anti)}", sorted(anti)[:3])
    seed = [int(x) for x in seed]
    if not seed or max(seed) >= window:
        raise SeedNotAscending("seed is empty or leaves the window")
    less, dual = orient(base_less, seed)
    ev = Evaluator(less, [list(range(window))], budget_base=params.budget)
    terms = [Base(tuple(seed))]
    seqs = [list(seed)]
    limit = max_levels if max_levels is not None else 4 * params.m + 8
    dead_at = None
    while len(terms) <= limit and len(terms) <= len(seqs[-1]):
        t = LadderW2(terms[-1])
        s = ev.sequence(t)
        if len(s) < alive_prefix(len(seqs[-1]), params.ratio):
            dead_at = len(terms)
            break
        terms.append(t)
        seqs.append(s)
    transcript: dict = {"strategy": "w2-diagonal", "dual": dual, "seed": seed,
                        "levels": [len(s) for s in seqs], "ratio": params.ratio}
    if dead_at is not None:
        body = seqs[-1]
        transcript.update(case="partial", dead_level=dead_at, source_level=dead_at - 1)
    else:
        body = []
        for i, s in enumerate(seqs):
            if i >= len(s) or (body and not less[body[-1], s[i]]):
                break
            body.append(s[i])
        transcript.update(case="diagonal")
    assert is_ascending(less, body)
    t, _ = least_passing_tail(less, body, params.m, "cof")
    chain = body[t:]
    cert = certify_matrix(less, chain, params.m, "cof")
    transcript.update(tail=t, certificate=cert.to_json(), dichotomy=diagonal_dichotomy(less, chain))
    return Extraction(chain, not dual, cert, transcript)


def diagonal_dichotomy(less: np.ndarray, chain: Sequence[int]) -> bool:
    """Every element listed before the chain's last id is below a member or at/above all of them.

    Later ids are skipped: the window cuts the chain off before they could
    fall below a member.
    """
    if not chain:
        return True
    c = np.asarray(chain)
    n = int(c.max()) + 1
    below_some = less[:n][:, c].any(axis=1)
    above_all = (less[c, :n] | (c[:, None] == np.arange(n)[None, :])).all(axis=0)
    return bool((below_some | above_all).all())
