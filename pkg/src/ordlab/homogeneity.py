"""Window certificates, counterexample search and budgeted ladder terms."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import (
    BudgetTooSmall,
    InvalidChainIndex,
    NoCounterexamplesInWindow,
    NotAChain,
    NotAscending,
)
from .order_core import Poset

ZERO, AT_LEAST_M, OPEN, VIOLATING = "zero", "at_least_m", "open", "violating"


@dataclass(frozen=True)
class ChainPrefix:
    elements: tuple[int, ...]
    ascending: bool = True

    @classmethod
    def of(cls, elements: Sequence[int], ascending: bool = True) -> "ChainPrefix":
        return cls(tuple(int(e) for e in elements), ascending)

    def __len__(self) -> int:
        return len(self.elements)


def is_ascending(less: np.ndarray, seq: Sequence[int]) -> bool:
    seq = list(seq)
    return all(less[a, b] for a, b in zip(seq, seq[1:]))


def _require_ascending(less: np.ndarray, seq: Sequence[int]) -> None:
    if not is_ascending(less, seq):
        raise NotAscending("sequence is not strictly ascending")


# -- certificates -----------------------------------------------------------

@dataclass
class HomogeneityCertificate:
    m: int
    window: int
    chain: list[int]
    verdicts: list[str]
    counts: list[int]
    reading: str = "inf"

    @property
    def violating(self) -> list[int]:
        return [e for e, v in enumerate(self.verdicts) if v == VIOLATING]

    @property
    def passes(self) -> bool:
        return not self.violating

    def tally(self) -> dict[str, int]:
        return {v: self.verdicts.count(v) for v in (ZERO, AT_LEAST_M, OPEN)}

    def to_json(self) -> dict:
        t = self.tally()
        return {
            "m": self.m,
            "window": self.window,
            "chain": list(self.chain),
            "verdicts": {"zero": t[ZERO], "at_least_m": t[AT_LEAST_M], "open": t[OPEN],
                         "violating": self.violating},
        }


def certify_matrix(less: np.ndarray, chain: Sequence[int], m: int, reading: str = "inf") -> HomogeneityCertificate:
    """Verdicts for every id of the window ``less`` against ``chain``.

    count(e) is the number of chain members comparable with or equal to e.
    Under the "inf" reading an element is Violating when 1 <= count < m and
    it is not comparable with the chain's last listed member; under "cof"
    any non-zero element that misses the last member is Violating.
    """
    n = less.shape[0]
    chain = [int(c) for c in chain]
    if any(c < 0 or c >= n for c in chain):
        raise NotAChain("chain leaves the window")
    if chain:
        sub = less[np.ix_(chain, chain)]
        if not ((sub | sub.T) | np.eye(len(chain), dtype=bool)).all() or len(set(chain)) != len(chain):
            raise NotAChain("listed elements are not pairwise comparable")
    if not chain:
        return HomogeneityCertificate(m, n, [], [ZERO] * n, [0] * n, reading)
    cols = np.asarray(chain)
    comp = less[:, cols] | less[cols, :].T
    comp[cols, np.arange(len(cols))] = True
    counts = comp.sum(axis=1)
    last_ok = comp[:, -1]
    verdicts = []
    for c, lo in zip(counts.tolist(), last_ok.tolist()):
        if c == 0:
            verdicts.append(ZERO)
        elif lo:
            verdicts.append(AT_LEAST_M if (reading == "inf" and c >= m) else OPEN)
        elif reading == "inf" and c >= m:
            verdicts.append(AT_LEAST_M)
        else:
            verdicts.append(VIOLATING)
    return HomogeneityCertificate(m, n, chain, verdicts, counts.tolist(), reading)


def verify_prefix_homogeneity(p: Poset, chain: ChainPrefix | Sequence[int], m: int, n: int,
                              reading: str = "inf") -> HomogeneityCertificate:
    elements = chain.elements if isinstance(chain, ChainPrefix) else tuple(chain)
    n = p.window(n)
    return certify_matrix(p.less_matrix(n), elements, m, reading)


def least_passing_tail(less: np.ndarray, seq: Sequence[int], m: int, reading: str = "inf",
                       min_len: int = 1) -> tuple[int, HomogeneityCertificate]:
    """Smallest t with a passing certificate for seq[t:], keeping at least min_len entries.

    Falls back to t = 0 with its failing certificate when no tail passes.
    """
    seq = list(seq)
    first = None
    for t in range(0, max(len(seq) - min_len, 0) + 1):
        cert = certify_matrix(less, seq[t:], m, reading)
        if first is None:
            first = cert
        if cert.passes:
            return t, cert
    return 0, first if first is not None else certify_matrix(less, seq, m, reading)


# -- counterexamples --------------------------------------------------------

def _last_below(less: np.ndarray, seq: np.ndarray) -> np.ndarray:
    """For every window id q: the largest index n with seq[n] < q, or -1."""
    below = less[seq, :]  # [n, q]: seq[n] < q; down-closed in n for ascending seq
    any_below = below.any(axis=0)
    idx = len(seq) - 1 - np.argmax(below[::-1], axis=0)
    return np.where(any_below, idx, -1)


def counterexample_table(less: np.ndarray, seq: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    """(is_cx, anchor): q is a counterexample above seq[anchor[q]] and
    incomparable with every later listed element, of which there is at least one."""
    seq = np.asarray(seq, dtype=np.int64)
    n = less.shape[0]
    if len(seq) < 2:
        return np.zeros(n, dtype=bool), np.full(n, -1)
    anchor = _last_below(less, seq)
    last = seq[-1]
    is_cx = (anchor >= 0) & (anchor < len(seq) - 1) & ~less[:, last] & ~less[last, :]
    is_cx[seq] = False
    return is_cx, anchor


def find_counterexample(p: Poset, a: ChainPrefix | Sequence[int], window: int) -> tuple[int, int] | None:
    """Least-id q above some a_n and incomparable with every later listed a_j.

    At least one later a_j must be listed, so the last element never
    anchors a counterexample.  None means nothing in the window; it is not
    a proof that the chain is homogeneous.
    """
    seq = list(a.elements if isinstance(a, ChainPrefix) else a)
    window = p.window(max(window, max(seq, default=-1) + 1))
    less = p.less_matrix(window)
    _require_ascending(less, seq)
    is_cx, anchor = counterexample_table(less, seq)
    hits = np.flatnonzero(is_cx)
    if len(hits) == 0:
        return None
    q = int(hits[0])
    return q, int(anchor[q])


def _chain_index_map(chains: Sequence[Sequence[int]], n: int) -> np.ndarray:
    owner = np.full(n, -1, dtype=np.int64)
    for idx, c in enumerate(chains):
        for x in c:
            if 0 <= x < n:
                owner[x] = idx
    return owner


def witness_points(less: np.ndarray, seq: Sequence[int]) -> list[int]:
    """p_m: least-id element above seq[m] and incomparable with some later listed element."""
    seq = np.asarray(seq, dtype=np.int64)
    if len(seq) < 2:
        return []
    anchor = _last_below(less, seq)
    nxt = np.clip(anchor + 1, 0, len(seq) - 1)
    has_incomp = (anchor >= 0) & (anchor < len(seq) - 1) & ~less[np.arange(less.shape[0]), seq[nxt]]
    has_incomp[seq] = False
    out = []
    ids = np.flatnonzero(has_incomp)
    if len(ids) == 0:
        return out
    anchors = anchor[ids]
    for m in range(len(seq) - 1):
        ok = ids[anchors >= m]
        if len(ok) == 0:
            break
        out.append(int(ok[0]))
    return out


def counterexample_target_chain(p: Poset, chains: Sequence[Sequence[int]], a: Sequence[int],
                                window: int) -> int | None:
    """Chain index holding the most witness points p_m; ties go to the lowest index."""
    window = p.window(window)
    less = p.less_matrix(window)
    _require_ascending(less, a)
    pts = witness_points(less, a)
    owner = _chain_index_map(chains, window)
    tally: dict[int, int] = {}
    for q in pts:
        if owner[q] >= 0:
            tally[int(owner[q])] = tally.get(int(owner[q]), 0) + 1
    if not tally:
        return None
    return min(tally, key=lambda c: (-tally[c], c))


@dataclass(frozen=True)
class CounterexampleSequence:
    elements: list[int]
    chain: int
    tails: list[int]  # tail index each element refutes


def cx_sequence_matrix(less: np.ndarray, owner: np.ndarray, a: Sequence[int]) -> CounterexampleSequence:
    is_cx, anchor = counterexample_table(less, a)
    ids = np.flatnonzero(is_cx)
    if len(ids) == 0:
        raise NoCounterexamplesInWindow("no counterexample to any tail inside the window")
    anchors = anchor[ids]
    least = []  # p_n for tails A_{>=n}
    for n in range(len(a) - 1):
        ok = ids[anchors >= n]
        if len(ok) == 0:
            break
        least.append(int(ok[0]))
    tally: dict[int, int] = {}
    for q in least:
        if owner[q] >= 0:
            tally[int(owner[q])] = tally.get(int(owner[q]), 0) + 1
    if not tally:
        raise NoCounterexamplesInWindow("counterexamples lie outside every chain")
    target = min(tally, key=lambda c: (-tally[c], c))
    picked, tails = [], []
    for n, q in enumerate(least):
        if owner[q] != target:
            continue
        if not picked or less[picked[-1], q]:
            picked.append(q)
            tails.append(n)
    return CounterexampleSequence(picked, target, tails)


def build_cx_sequence(p: Poset, chains: Sequence[Sequence[int]], a: Sequence[int],
                      window: int) -> CounterexampleSequence:
    """Least counterexamples to successive tails, kept in the busiest chain and thinned to ascend."""
    window = p.window(window)
    less = p.less_matrix(window)
    _require_ascending(less, a)
    return cx_sequence_matrix(less, _chain_index_map(chains, window), a)


def dominates_forall_exists(less: np.ndarray, a: Sequence[int], b: Sequence[int]) -> bool:
    """A <=_AE B on the window: every listed a is below-or-equal some listed b."""
    if not len(a):
        return True
    if not len(b):
        return False
    a, b = np.asarray(a), np.asarray(b)
    le = less[np.ix_(a, b)] | (a[:, None] == b[None, :])
    return bool(le.any(axis=1).all())


# -- program terms ------------------------------------------------------------

@dataclass(frozen=True)
class Base:
    seq: tuple[int, ...]


class _CachedHash:
    # nested terms would otherwise rehash the whole tower on every lookup
    def __hash__(self) -> int:
        h = self.__dict__.get("_h")
        if h is None:
            h = hash((type(self).__name__,) + tuple(getattr(self, f) for f in self.__dataclass_fields__))
            object.__setattr__(self, "_h", h)
        return h


@dataclass(frozen=True, eq=True)
class Ladder(_CachedHash):
    inner: "Term"
    chain: int

    __hash__ = _CachedHash.__hash__


@dataclass(frozen=True, eq=True)
class LadderW2(_CachedHash):
    inner: "Term"

    __hash__ = _CachedHash.__hash__


Term = Union[Base, Ladder, LadderW2]


@dataclass(frozen=True)
class Found:
    value: int


@dataclass(frozen=True)
class Exhausted:
    steps: int
    reason: str  # "window": nothing qualifies; "budget": search cut short


EvalResult = Union[Found, Exhausted]


def default_budget(m: int, base: int = 1000) -> int:
    return base * (m + 1)


@dataclass
class Evaluator:
    """Evaluates terms over a fixed window, memoising each term's sequence.

    ``less`` is the window's strict order and ``chains`` the decomposition
    whose indices Ladder terms refer to.
    """

    less: np.ndarray
    chains: Sequence[Sequence[int]]
    budget_base: int = 1000
    retries: int = 6
    _seqs: dict = field(default_factory=dict, repr=False)
    _done: dict = field(default_factory=dict, repr=False)
    steps: int = 0

    def __post_init__(self) -> None:
        n = self.less.shape[0]
        self._chain_arrays = [np.asarray(sorted(x for x in c if x < n), dtype=np.int64) for c in self.chains]
        self._all = np.arange(n, dtype=np.int64)

    def _candidates(self, term: Term) -> np.ndarray:
        if isinstance(term, Ladder):
            if not 0 <= term.chain < len(self._chain_arrays):
                raise InvalidChainIndex(f"chain {term.chain} outside [0, {len(self._chain_arrays)})")
            return self._chain_arrays[term.chain]
        return self._all

    def _step(self, term: Term, m: int, budget: int) -> EvalResult:
        """Compute index m given indices < m are known."""
        if isinstance(term, Base):
            return Found(term.seq[m]) if m < len(term.seq) else Exhausted(0, "window")
        inner = self.sequence(term.inner)
        prev = self._seqs[term][m - 1] if m > 0 else None
        if m >= len(inner):
            return Exhausted(0, "window")
        u = inner[m]
        cand = self._candidates(term)
        less = self.less
        ok = less[u, cand] | (cand == u)
        if prev is not None:
            ok &= less[prev, cand]
        later = np.asarray(inner[m + 1:], dtype=np.int64)
        cost = np.full(len(cand), 2, dtype=np.int64)
        witness = np.zeros(len(cand), dtype=bool)
        idx = np.flatnonzero(ok)
        if len(idx) and len(later):
            c = cand[idx]
            below = less[np.ix_(later, c)]  # later[n] < candidate
            stop = np.argmin(below, axis=0)  # first n that is not below
            all_below = below.all(axis=0)
            hit = later[stop]
            incomp = ~all_below & ~less[c, hit] & (c != hit)
            witness[idx] = incomp
            cost[idx] += np.where(all_below, len(later), stop + 1)
        spent = np.cumsum(cost)
        wins = np.flatnonzero(witness)
        if len(wins):
            j = int(wins[0])
            if spent[j] <= budget:
                self.steps += int(spent[j])
                return Found(int(cand[j]))
            self.steps += budget
            return Exhausted(budget, "budget")
        total = int(spent[-1]) if len(spent) else 0
        if total > budget:
            self.steps += budget
            return Exhausted(budget, "budget")
        self.steps += total
        return Exhausted(total, "window")

    def sequence(self, term: Term) -> list[int]:
        """All Found values of the term, up to its first window exhaustion."""
        if term in self._done:
            return self._seqs[term]
        seq = self._seqs.setdefault(term, [])
        while True:
            m = len(seq)
            budget = default_budget(m, self.budget_base)
            for _ in range(self.retries + 1):
                res = self._step(term, m, budget)
                if not (isinstance(res, Exhausted) and res.reason == "budget"):
                    break
                budget *= 2
            else:
                raise BudgetTooSmall(f"index {m} still cut off at budget {budget // 2}")
            if isinstance(res, Found):
                seq.append(res.value)
            else:
                self._done[term] = True
                return seq

    def eval(self, term: Term, m: int, budget: int | None = None) -> EvalResult:
        """Single-index evaluation with an explicit budget for that index."""
        if budget is not None and budget <= 0:
            raise ValueError("budget must be positive")
        if isinstance(term, Base):
            return self._step(term, m, budget or 1)
        done = self._seqs.get(term, [])
        if m < len(done):
            return Found(done[m])
        if term in self._done:
            return Exhausted(0, "window")
        # earlier indices with the default schedule, then index m with the given budget
        seq = self._seqs.setdefault(term, [])
        while len(seq) < m:
            res = self._step(term, len(seq), default_budget(len(seq), self.budget_base))
            if not isinstance(res, Found):
                return res
            seq.append(res.value)
        res = self._step(term, m, budget if budget is not None else default_budget(m, self.budget_base))
        if isinstance(res, Found):
            seq.append(res.value)
        return res


def eval_term(p: Poset, chains: Sequence[Sequence[int]], term: Term, m: int, budget: int,
              window: int = 500) -> EvalResult:
    window = p.window(window)
    return Evaluator(p.less_matrix(window), chains).eval(term, m, budget)


def alive_prefix(parent_len: int, ratio: float) -> int:
    """How many leading indices must be Found for a child sequence to count as window-total."""
    return max(1, math.ceil(ratio * parent_len))
