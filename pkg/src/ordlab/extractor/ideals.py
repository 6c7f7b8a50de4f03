"""Extraction for posets without wide antichains, through an ideal decomposition."""

from __future__ import annotations

import numpy as np

from .. import kernels
from ..chains_trees import essential_ideal_decomposition
from ..errors import AntichainBoundExceeded, NoAscendingSequenceFound
from ..homogeneity import certify_matrix, least_passing_tail
from ..order_core import Poset, maximum_antichain
from .common import Extraction, Params
from .splitting import cofinal_ascending


def extract_no_antichain(p: Poset, params: Params | None = None, bound: int | None = None) -> Extraction:
    """Largest essential ideal of the long-ascent part, climbed cofinally.

    Q keeps the window elements with an ascending run above them longer than
    the lookahead.  The chain is c_0 = least id of the ideal, c_{k+1} = least
    id above c_k and the ideal's next element.
    """
    params = params or Params()
    window = p.window(params.window)
    less = p.less_matrix(window)
    if bound is not None:
        anti = maximum_antichain(less)
        if len(anti) > bound:
            raise AntichainBoundExceeded(f"antichain of size {len(anti)} exceeds {bound}", sorted(anti))
    runs = np.asarray(kernels.monotone_runs(np.ascontiguousarray(less, dtype=np.uint8), 0))
    q = np.flatnonzero(runs > params.lookahead)
    if not len(q):
        raise NoAscendingSequenceFound("no element has a long ascending run above it")
    fam = essential_ideal_decomposition(less[np.ix_(q, q)])
    ideals = [[int(q[i]) for i in ideal] for ideal in fam.ideals]
    best = max(range(len(ideals)), key=lambda j: (len(ideals[j]), -min(ideals[j])))
    chain = cofinal_ascending(less, ideals[best])
    # keep at least half the climb so a trivial one-point tail cannot pass
    t, _ = least_passing_tail(less, chain, params.m, "inf", min_len=max(1, len(chain) // 2))
    out = chain[t:]
    cert = certify_matrix(less, out, params.m, "inf")
    transcript = {"strategy": "ideal", "lookahead": params.lookahead, "q_size": int(len(q)),
                  "ideal_sizes": [len(i) for i in ideals], "chosen": best, "tail": t,
                  "certificate": cert.to_json()}
    if not cert.passes:
        transcript["violating"] = cert.violating[:10]
    return Extraction(out, True, cert, transcript)
