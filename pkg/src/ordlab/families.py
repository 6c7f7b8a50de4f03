"""Builders for every catalog family, keyed by family name."""

from __future__ import annotations

import math
from typing import Any, Callable

import numpy as np

from .errors import InvalidFamilyParams, NoTotalIndex, NotLinear
from .order_core import FamilySpec, FinitePoset, Poset, StreamedPoset
from .stages import InjectionSpec, StageTruth

INF = math.inf

_BUILDERS: dict[str, Callable[[FamilySpec], Poset]] = {}


def _family(name: str):
    def register(fn):
        _BUILDERS[name] = fn
        return fn

    return register


def build(spec: FamilySpec) -> Poset:
    try:
        builder = _BUILDERS[spec.name]
    except KeyError:
        raise InvalidFamilyParams(f"unknown family {spec.name!r}; known: {sorted(_BUILDERS)}") from None
    return builder(spec)


def family_names() -> list[str]:
    return sorted(_BUILDERS)


def _whole(n: int) -> list[list[int]]:
    return [list(range(n))]


def _injection(spec: FamilySpec) -> InjectionSpec:
    raw = spec.params.get("injection")
    if raw is None:
        raise InvalidFamilyParams(f"{spec.name} needs an 'injection' parameter")
    if isinstance(raw, InjectionSpec):
        return raw
    return InjectionSpec.from_json(raw)


# -- plain linear orders ---------------------------------------------------

@_family("omega")
def _omega(spec: FamilySpec) -> Poset:
    return StreamedPoset(spec, lambda r, c: r[:, None] < c[None, :], chains=_whole)


@_family("omega_star")
def _omega_star(spec: FamilySpec) -> Poset:
    return StreamedPoset(spec, lambda r, c: r[:, None] > c[None, :], chains=_whole)


def zeta_value(e):
    e = np.asarray(e)
    return np.where(e % 2 == 1, (e + 1) // 2, -(e // 2))


@_family("zeta")
def _zeta(spec: FamilySpec) -> Poset:
    # ids 0, 1, 2, 3, 4, ... sit at integers 0, 1, -1, 2, -2, ...
    return StreamedPoset(spec, lambda r, c: zeta_value(r)[:, None] < zeta_value(c)[None, :], chains=_whole)


# -- shifted chains --------------------------------------------------------

def close_shifts(s: np.ndarray) -> np.ndarray:
    """Min-plus closure so that the triangle inequality holds."""
    s = s.astype(float).copy()
    for m in range(s.shape[0]):
        s = np.minimum(s, s[:, m:m + 1] + s[m:m + 1, :])
    return s


def check_shifts(s: np.ndarray) -> None:
    k = s.shape[0]
    if s.shape != (k, k):
        raise InvalidFamilyParams("shift matrix must be k x k")
    for i in range(k):
        if s[i, i] != 0:
            raise InvalidFamilyParams(f"diagonal shift s({i},{i}) must be 0")
        for j in range(k):
            if i != j and s[i, j] + s[j, i] < 1:
                raise InvalidFamilyParams(f"antisymmetry: s({i},{j}) + s({j},{i}) < 1")
            for m in range(k):
                if s[i, m] > s[i, j] + s[j, m]:
                    raise InvalidFamilyParams(f"triangle inequality fails for ({i},{j},{m})")


def random_shifts(k: int, rng: np.random.Generator, inf_rate: float = 0.2,
                  low: int = -2, high: int = 5) -> np.ndarray:
    for _ in range(10_000):
        s = rng.integers(low, high + 1, size=(k, k)).astype(float)
        s[rng.random((k, k)) < inf_rate] = INF
        np.fill_diagonal(s, 0.0)
        s = close_shifts(s)
        if (np.diag(s) == 0).all() and all(
            s[i, j] + s[j, i] >= 1 for i in range(k) for j in range(k) if i != j
        ):
            return s
    raise InvalidFamilyParams("could not sample a valid shift matrix")


def shifts_to_json(s: np.ndarray) -> list[list[int | None]]:
    return [[None if math.isinf(v) else int(v) for v in row] for row in s]


@_family("shifted_chains")
def _shifted(spec: FamilySpec) -> Poset:
    k = int(spec.params.get("k", 2))
    if k < 1:
        raise InvalidFamilyParams("k must be at least 1")
    raw = spec.params.get("shifts")
    if raw is None:
        s = random_shifts(k, np.random.default_rng(spec.seed))
    else:
        s = np.array([[INF if v is None else float(v) for v in row] for row in raw], dtype=float)
        if s.shape != (k, k):
            raise InvalidFamilyParams(f"shift matrix must be {k} x {k}")
    check_shifts(s)

    def block(r, c):
        i, m = r % k, r // k
        j, n = c % k, c // k
        same = i[:, None] == j[None, :]
        return np.where(same, m[:, None] < n[None, :], m[:, None] + s[i][:, j] <= n[None, :])

    return StreamedPoset(
        spec, block,
        chains=lambda n: [list(range(i, n, k)) for i in range(k)],
        meta={"k": k, "shifts": shifts_to_json(s)},
    )


# -- random finite posets --------------------------------------------------

@_family("random_finite")
def _random_finite(spec: FamilySpec) -> Poset:
    p = spec.params
    n = int(p.get("n", 8))
    density = float(p.get("density", 0.3))
    chains = p.get("chains")
    if n < 0 or not 0 <= density <= 1:
        raise InvalidFamilyParams("random_finite needs n >= 0 and density in [0, 1]")
    rng = np.random.default_rng(spec.seed)
    rank = rng.permutation(n)  # a hidden linear extension; every edge respects it
    rel = np.zeros((n, n), dtype=bool)
    if chains is not None:
        chains = int(chains)
        if chains < 1:
            raise InvalidFamilyParams("chains must be positive")
        owner = rng.integers(0, chains, size=n)
        rel |= (owner[:, None] == owner[None, :]) & (rank[:, None] < rank[None, :])
    rel |= (rng.random((n, n)) < density) & (rank[:, None] < rank[None, :])
    order = np.argsort(-rank)
    for v in order:  # highest rank first: successors are closed already
        for w in np.flatnonzero(rel[v]):
            rel[v] |= rel[w]
    return FinitePoset(rel, validate=False, spec=spec)


# -- injection-driven families ----------------------------------------------

def tf_block(truth: StageTruth):
    ta = truth.matrix

    def block(r, c):
        rr, cc = r[:, None], c[None, :]
        lo, hi = np.minimum(rr, cc), np.maximum(rr, cc)
        t = ta[lo, hi]
        return ((rr < cc) & ~t) | ((rr > cc) & t)

    return block


@_family("tf_linear")
def _tf_linear(spec: FamilySpec) -> Poset:
    f = _injection(spec)
    truth = StageTruth(f)
    return StreamedPoset(spec, tf_block(truth), size=len(f), chains=_whole,
                         meta={"truth": truth})


@_family("chain_ext")
def _chain_ext(spec: FamilySpec) -> Poset:
    f = _injection(spec)
    truth = StageTruth(f)
    ta = truth.matrix
    lin = tf_block(truth)

    def block(r, c):
        ri, ci = r // 2, c // 2
        r_is_c, c_is_c = (r % 2 == 0)[:, None], (c % 2 == 0)[None, :]
        both_c = r_is_c & c_is_c
        both_l = ~r_is_c & ~c_is_c
        cl = r_is_c & ~c_is_c
        rr, cc = ri[:, None], ci[None, :]
        hi = np.maximum(rr, cc)
        # c_m < l_n iff m <= n, or n < m and n is true at stage m
        c_below_l = (rr <= cc) | ta[np.minimum(rr, cc), hi]
        return (both_c & (rr < cc)) | (both_l & lin(ri, ci)) | (cl & c_below_l)

    d = len(f)
    return StreamedPoset(
        spec, block, size=2 * d,
        chains=lambda n: [list(range(0, n, 2)), list(range(1, n, 2))],
        meta={"truth": truth},
    )


def _finite_from_param(raw: Any) -> FinitePoset:
    if raw is None:
        return FinitePoset.antichain(2)
    if isinstance(raw, FinitePoset):
        return raw
    return FinitePoset.from_pairs(int(raw["n"]), raw.get("pairs", []))


@_family("xi")
def _xi(spec: FamilySpec) -> Poset:
    f = _injection(spec)
    base = _finite_from_param(spec.params.get("P"))
    x = int(spec.params.get("x", 0))
    if not 0 <= x < base.n:
        raise InvalidFamilyParams(f"x = {x} is not an element of P")
    truth = StageTruth(f)
    q, d = base.n, len(f)
    state: dict[str, Any] = {}

    def build_all() -> np.ndarray:
        ta = truth.matrix
        n = d * q
        lt = np.zeros((n, n), dtype=bool)
        anchors = []
        if d:
            lt[:q, :q] = base.rel
        for s in range(d - 1):
            before = {m for m in range(s) if ta[m, s]} | {s}
            after = {m for m in range(s + 1) if ta[m, s + 1]}
            lo = (s + 1) * q
            if before - after:
                n0 = min(before - after)
                a = n0 * q + x
                down = lt[:lo, a].copy()
                down[a] = True
                up = lt[a, :lo].copy()
                anchors.append(("above", n0))
            else:
                a = s * q + x
                down = lt[:lo, a].copy()
                up = lt[a, :lo].copy()
                up[a] = True
                anchors.append(("below", s))
            lt[:lo, lo:lo + q] = down[:, None]
            lt[lo:lo + q, :lo] = up[None, :]
            lt[lo:lo + q, lo:lo + q] = base.rel
        state["anchors"] = anchors
        return lt

    def full() -> np.ndarray:
        if "lt" not in state:
            state["lt"] = build_all()
        return state["lt"]

    def block(r, c):
        return full()[np.ix_(r, c)]

    def anchors() -> list[tuple[str, int]]:
        full()
        return state["anchors"]

    return StreamedPoset(spec, block, size=d * q,
                         meta={"truth": truth, "block_size": q, "x": x, "P": base, "anchors": anchors})


# -- products with a small order ------------------------------------------

Q2 = np.array([[False, True], [False, False]])  # a < z
Q3 = np.array([[False, False, True], [False, False, True], [False, False, False]])  # a, b < z
Q_LABELS = {2: ("a", "z"), 3: ("a", "b", "z")}


def _product(spec: FamilySpec, q: np.ndarray) -> Poset:
    raw = spec.params.get("base", {"kind": "family", "name": "omega", "params": {}, "seed": 0})
    base = build(FamilySpec.from_json(raw)) if not isinstance(raw, Poset) else raw
    probe = base.window(64)
    lt = base.less_matrix(probe)
    comp = lt | lt.T
    if not comp[~np.eye(probe, dtype=bool)].all():
        raise NotLinear(f"base family {base.spec.name if base.spec else '?'} is not linear")
    width = q.shape[0]
    qle = q | np.eye(width, dtype=bool)

    def block(r, c):
        lr, qr = r // width, r % width
        lc, qc = c // width, c % width
        l_le = base._less_block(lr, lc) | (lr[:, None] == lc[None, :])
        return l_le & qle[qr][:, qc] & (r[:, None] != c[None, :])

    size = None if base.size is None else base.size * width
    return StreamedPoset(
        spec, block, size=size,
        chains=lambda n: [list(range(j, n, width)) for j in range(width)],
        meta={"base": base, "q": width, "labels": Q_LABELS[width], **(
            {"truth": base.meta["truth"]} if "truth" in base.meta else {})},
    )


@_family("product_lq2")
def _product_lq2(spec: FamilySpec) -> Poset:
    return _product(spec, Q2)


@_family("product_lq3")
def _product_lq3(spec: FamilySpec) -> Poset:
    return _product(spec, Q3)


# -- the Pi^0_2 family ----------------------------------------------------

def random_profile(rng: np.random.Generator) -> list[dict[str, int]]:
    n = int(rng.integers(1, 4))
    prof = []
    for i in range(n + 1):
        if i < n and rng.random() < 0.6:
            prof.append({"fails_at": int(rng.integers(1, 9))})
        else:
            prof.append({"total": int(rng.integers(1, 4))})
    return prof


@_family("pi02")
def _pi02(spec: FamilySpec) -> Poset:
    prof = spec.params.get("profile")
    if prof is None:
        prof = random_profile(np.random.default_rng(spec.seed))
    for entry in prof:
        if not isinstance(entry, dict) or len(entry) != 1 or not ({"total", "fails_at"} & set(entry)):
            raise InvalidFamilyParams(f"profile entry {entry!r} must be {{'total': r}} or {{'fails_at': x}}")
    totals = [i for i, e in enumerate(prof) if "total" in e]
    if not totals:
        raise NoTotalIndex("profile has no Total index")
    least_total = totals[0]
    idx_i: list[int] = []
    idx_s: list[int] = []
    level = [0]

    def alive(i: int, s: int) -> bool:
        e = prof[i]
        return "total" in e or s < e["fails_at"]

    def extend(n: int) -> None:
        while len(idx_i) < n:
            s = level[0]
            for i in range(len(prof)):
                if alive(i, s):
                    idx_i.append(i)
                    idx_s.append(s)
            level[0] += 1

    def block(r, c):
        extend(int(max(r.max(initial=-1), c.max(initial=-1))) + 1)
        ii, ss = np.asarray(idx_i), np.asarray(idx_s)
        ir, sr, ic, sc = ii[r], ss[r], ii[c], ss[c]
        return (ic[None, :] <= ir[:, None]) & (sc[None, :] >= sr[:, None]) & (r[:, None] != c[None, :])

    def chains(n: int) -> list[list[int]]:
        extend(n)
        return [[e for e in range(n) if idx_i[e] == i] for i in range(len(prof))]

    def triple(e: int) -> tuple[int, int, int | None]:
        extend(e + 1)
        i, s = idx_i[e], idx_s[e]
        t = prof[i]["total"] * s if "total" in prof[i] else None
        return i, s, t

    return StreamedPoset(spec, block, chains=chains,
                         meta={"least_total": least_total, "profile": prof, "triple": triple})


def cantor_grid(count: int) -> FinitePoset:
    """The product order on pairs of naturals, listed along anti-diagonals, first ``count`` ids."""
    pts = []
    d = 0
    while len(pts) < count:
        pts += [(i, d - i) for i in range(d + 1)]
        d += 1
    a = np.asarray(pts[:count])
    le = (a[:, None, 0] <= a[None, :, 0]) & (a[:, None, 1] <= a[None, :, 1])
    return FinitePoset(le & ~np.eye(count, dtype=bool), validate=False)


def layered_random(n: int, layers: int, density: float, rng: np.random.Generator) -> FinitePoset:
    """Random order whose relations only climb between layers, so every chain has at most ``layers`` elements."""
    level = rng.integers(0, layers, size=n)
    rel = (rng.random((n, n)) < density) & (level[:, None] < level[None, :])
    for lv in range(layers - 2, -1, -1):
        for v in np.flatnonzero(level == lv):
            for w in np.flatnonzero(rel[v]):
                rel[v] |= rel[w]
    return FinitePoset(rel, validate=False)
