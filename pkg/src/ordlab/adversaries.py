"""Reversal constructions as poset generators, plus decoders that turn their chains back into ranges."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .errors import HypothesisViolated, NotBadSequence, NotTrueNumber
from .order_core import FamilySpec, FinitePoset, Poset, generate
from .stages import InjectionSpec, StageTruth


def true_at(f: InjectionSpec, n: int, m: int) -> bool:
    """f(n) < f(k) for every k with n < k <= m."""
    return StageTruth(f).true_at(n, m)


def _spec(name: str, params: dict[str, Any], seed: int = 0) -> FamilySpec:
    return FamilySpec(name, params, seed)


def tf_linear(f: InjectionSpec) -> Poset:
    f.values  # raises NotInjective before anything is built
    return generate(_spec("tf_linear", {"injection": f.to_json()}))


def xi_construct(f: InjectionSpec, base: FinitePoset | None = None, x: int = 0) -> Poset:
    """Copies P_0, P_1, ... of ``base``; each new copy goes just above or just below a copy of x."""
    f.values
    params: dict[str, Any] = {"injection": f.to_json(), "x": x}
    if base is not None:
        params["P"] = {"n": base.n, "pairs": base.cover_pairs()}
    return generate(_spec("xi", params))


def product_lq(base: FamilySpec, variant: int = 3, seed: int = 0) -> Poset:
    name = {2: "product_lq2", 3: "product_lq3"}[variant]
    return generate(_spec(name, {"base": base.to_json()}, seed))


def pi02_poset(profile: list[dict[str, int]], seed: int = 0) -> tuple[Poset, int]:
    p = generate(_spec("pi02", {"profile": profile}, seed))
    return p, p.meta["least_total"]


def chain_ext_poset(f: InjectionSpec) -> tuple[Poset, list[int]]:
    """The poset together with its distinguished chain {c_n} (the even ids)."""
    f.values
    p = generate(_spec("chain_ext", {"injection": f.to_json()}))
    return p, list(range(0, p.size, 2))


# -- decoding ----------------------------------------------------------------

@dataclass(frozen=True)
class RangeTable:
    """Membership of every v < bound in the range of f, as far as the decoder can vouch."""

    bound: int
    members: list[int]
    source: dict[str, Any] = field(default_factory=dict)

    def as_flags(self) -> list[bool]:
        s = set(self.members)
        return [v in s for v in range(self.bound)]

    def to_json(self) -> dict[str, Any]:
        return {"bound": self.bound, "members": self.members, **self.source}


def brute_force_range(f: InjectionSpec, bound: int) -> list[int]:
    return sorted(int(v) for v in f.values if v < bound)


def decode_range_from_true(f: InjectionSpec, true_numbers: Sequence[int]) -> RangeTable:
    """Below f(n) for a true n, only f(0..n) can land; so evaluating f up to max S settles [0, f(max S))."""
    s = sorted(set(int(n) for n in true_numbers))
    if not s:
        return RangeTable(0, [], {"true_numbers": []})
    truth = StageTruth(f)
    top = s[-1]
    for n in s:
        w = truth.false_witness(n, top)
        if w is not None:
            raise NotTrueNumber(n, w)
    bound = f(top)
    members = sorted(int(v) for v in f.values[: top + 1] if v < bound)
    return RangeTable(bound, members, {"true_numbers": s})


def is_bad(less: np.ndarray, seq: Sequence[int]) -> tuple[int, int] | None:
    """First pair i < j with seq[i] <= seq[j], or None when the sequence is bad."""
    a = np.asarray(seq, dtype=np.int64)
    le = less[np.ix_(a, a)] | (a[:, None] == a[None, :])
    hits = np.argwhere(np.triu(le, 1))
    return None if not len(hits) else (int(hits[0][0]), int(hits[0][1]))


def find_bad_sequence(p: Poset, window: int, target: int, guided: bool = True,
                      max_nodes: int = 200_000) -> list[int] | None:
    """An id-increasing sequence of ``target`` elements none of which is below-or-equal a later one.

    On the Xi construction the copies of the second point over the
    window's true numbers form an antichain and are tried first; otherwise
    a depth-first search over the window runs until ``max_nodes`` nodes.
    """
    n = p.window(window)
    less = p.less_matrix(n)
    if guided and "block_size" in p.meta and p.meta["block_size"] >= 2:
        q = p.meta["block_size"]
        y = (p.meta["x"] + 1) % q
        blocks = n // q
        truth: StageTruth = p.meta["truth"]
        last = blocks - 1
        cand = [s * q + y for s in truth.true_set(last) + [last]]
        if len(cand) >= target and is_bad(less, cand[:target]) is None:
            return cand[:target]
    le = less | np.eye(n, dtype=bool)
    budget = [max_nodes]

    def dfs(seq: list[int], allowed: np.ndarray) -> list[int] | None:
        if len(seq) == target:
            return seq
        budget[0] -= 1
        if budget[0] <= 0:
            return None
        start = seq[-1] + 1 if seq else 0
        for c in np.flatnonzero(allowed[start:]) + start:
            if len(seq) + 1 + int(allowed[c + 1:].sum()) < target:
                break
            got = dfs(seq + [int(c)], allowed & ~le[c] & ~le[:, c])
            if got is not None:
                return got
            if budget[0] <= 0:
                return None
        return None

    # later elements must not be >= any earlier one; earlier ones must not be <= later
    out = dfs([], np.ones(n, dtype=bool))
    if out is not None:
        assert is_bad(less, out) is None
    return out


def decode_range_from_bad_sequence(p: Poset, seq: Sequence[int]) -> RangeTable:
    """Read T_s off the last element's block s, then decode the range from it.

    For k < s, a point of P_s lies below x_k exactly when k is true at stage
    s.  The table covers [0, f(max T_s)) and speaks for f restricted to [0, s].
    """
    seq = [int(v) for v in seq]
    if not seq:
        raise NotBadSequence(-1, -1)
    n = max(seq) + 1
    less = p.less_matrix(p.window(n))
    bad = is_bad(less, seq)
    if bad is not None:
        raise NotBadSequence(*bad)
    q = p.meta["block_size"]
    x = p.meta["x"]
    f: InjectionSpec = p.meta["truth"].f
    probe = seq[-1]
    s = probe // q
    xs = np.arange(s) * q + x
    lt = p.less_matrix(p.window(max(n, s * q + q)))
    t_s = [int(k) for k in np.flatnonzero(lt[probe, xs])]
    table = decode_range_from_true(f, t_s)
    return RangeTable(table.bound, table.members, {"stage": s, "true_numbers": t_s, "sequence": seq})


def qprops_violations(p: Poset, samples: int, rng: np.random.Generator) -> list[tuple[int, int, int]]:
    """Sampled triples (n, m, j) breaking either stage comparison rule; empty when all hold."""
    q = p.meta["block_size"]
    x = p.meta["x"]
    truth: StageTruth = p.meta["truth"]
    d = p.size // q
    lt = p.less_matrix(p.size)
    ta = truth.matrix
    bad = []
    base_rel = p.meta["P"].rel
    for _ in range(samples):
        n = int(rng.integers(0, d - 1))
        m = int(rng.integers(n + 1, d))
        j = int(rng.integers(0, q))
        xn, e = n * q + x, m * q + j
        if ta[n, m]:
            ok = lt[e, xn]
            # points of P_n incomparable with x_n stay incomparable with P_m
            for yj in range(q):
                if yj != x and not (base_rel[x, yj] or base_rel[yj, x]):
                    yy = n * q + yj
                    ok = ok and not (lt[e, yy] or lt[yy, e])
        else:
            ok = lt[xn, e]
        if not ok:
            bad.append((n, m, j))
    return bad


@dataclass
class PipelineResult:
    chain: list[int]
    direction: str
    leg: str
    table: RangeTable
    brute: list[int]
    transcript: dict[str, Any]

    @property
    def exact(self) -> bool:
        return self.table.members == self.brute

    def to_json(self) -> dict[str, Any]:
        return {"chain": self.chain, "direction": self.direction, "leg": self.leg,
                "table": self.table.to_json(), "exact_match": self.exact, "transcript": self.transcript}


class StageError(RuntimeError):
    """Wraps a failure with the pipeline stage it came from."""

    def __init__(self, stage: str, exc: Exception):
        super().__init__(f"{stage}: {type(exc).__name__}: {exc}")
        self.stage = stage
        self.cause = exc


def pipeline_reversal(f: InjectionSpec, params=None) -> PipelineResult:
    """Linear order of true/false stages, times the three-point order, extracted and decoded.

    The extractor is seeded with a descending run inside the first leg, so
    it returns a descending chain there; its L-coordinates are true numbers
    and fix the range of f below f(max).
    """
    from .extractor.common import Params, chains_for
    from .extractor.tower import extract_tower
    from .decomposition import monotone_extract

    stage = "tf-linear"
    try:
        f.values
        base = FamilySpec("tf_linear", {"injection": f.to_json()}, 0)
        stage = "product-lq3"
        p = product_lq(base, 3)
        params = params or Params(window=p.size)
        stage = "extract"
        chains = chains_for(p, params.window)
        seed = monotone_extract(p, chains[0], "descending").elements
        ex = extract_tower(p, chains, seed, params)
        stage = "decode"
        legs = {x % 3 for x in ex.chain}
        leg = "z" if 2 in legs else ("a" if 0 in legs else "b")
        direction = "ascending" if ex.ascending else "descending"
        if direction != "descending":
            raise HypothesisViolated("extraction ascended; the decoder needs a descending chain")
        nums = sorted({x // 3 for x in ex.chain})
        table = decode_range_from_true(f, nums)
    except StageError:
        raise
    except Exception as exc:  # surfaced with the stage it failed in
        raise StageError(stage, exc) from exc
    brute = brute_force_range(f, table.bound)
    return PipelineResult(ex.chain, direction, leg, table, brute,
                          {"extract": ex.transcript, "stage_window": params.window})
