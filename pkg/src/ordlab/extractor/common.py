"""Helpers shared by the extraction strategies."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from ..decomposition import dilworth_offline
from ..errors import SeedNotAscending
from ..homogeneity import HomogeneityCertificate, is_ascending
from ..order_core import Poset


@dataclass
class Params:
    window: int = 500
    m: int = 10
    budget: int = 1000
    ratio: float = 0.5
    lookahead: int = 32


@dataclass
class Extraction:
    chain: list[int]
    ascending: bool
    certificate: HomogeneityCertificate
    transcript: dict[str, Any] = field(default_factory=dict)

    @property
    def passes(self) -> bool:
        return self.certificate.passes


def chains_for(p: Poset, window: int) -> list[list[int]]:
    """The family's own decomposition when it has one, else a minimum chain cover of the window."""
    nat = p.natural_chains(window)
    if nat is not None:
        return [c for c in nat]
    return dilworth_offline(p.less_matrix(p.window(window))).chains


def orient(less: np.ndarray, seed: Sequence[int]) -> tuple[np.ndarray, bool]:
    """Return (order, dual) so that the seed ascends in ``order``."""
    if len(seed) <= 1 or is_ascending(less, seed):
        return less, False
    if is_ascending(less.T, seed):
        return less.T, True
    raise SeedNotAscending("seed is neither ascending nor descending")


def sort_chain(less: np.ndarray, elements: Sequence[int]) -> list[int]:
    """List a chain bottom-up (by the number of members below each)."""
    els = sorted(set(int(e) for e in elements))
    if not els:
        return []
    sub = less[np.ix_(els, els)]
    rank = sub.sum(axis=0)
    return [els[i] for i in np.argsort(rank, kind="stable")]


def seed_chain(p: Poset, chains: Sequence[Sequence[int]], window: int, direction: str | None = None) -> list[int]:
    """Seed for extraction: a monotone run inside the largest chain (lowest index on ties)."""
    from ..decomposition import monotone_extract

    window = p.window(window)
    best = min(range(len(chains)), key=lambda i: (-len([x for x in chains[i] if x < window]), i))
    members = [x for x in chains[best] if x < window]
    return monotone_extract(p, members, direction).elements
