"""Reduced-scale runs of the acceptance suites, one verdict per suite."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from .adversaries import (
    brute_force_range,
    decode_range_from_bad_sequence,
    find_bad_sequence,
    pipeline_reversal,
    qprops_violations,
    xi_construct,
)
from .chains_trees import FiniteTree, essential_ideal_decomposition, leftmost_path, random_tree
from .decomposition import antichain_from_height, chain_from_width, dilworth_offline, kierstead_bound, online_partition
from .errors import BudgetTooSmall, PromiseViolated
from .extractor import (
    Params,
    all_valid_trees,
    chains_for,
    extract_tower,
    extract_w2_diagonal,
    random_stable_coloring,
    random_valid_tree,
    satisfies_conclusion,
    seed_chain,
    ssrt_extract,
    tree_helper,
)
from .families import layered_random
from .order_core import FamilySpec, canonical_json, classify_set, Kind, generate, width_exact
from .stages import InjectionSpec


@dataclass
class SelftestConfig:
    seed: int = 0
    budget: int = 1000
    m: int = 10
    k: int | None = None  # overrides the width promise in suite 1 when set
    trials: int = 4


def _trial_seed(seed: int, i: int) -> int:
    return seed ^ i


def suite_online(cfg: SelftestConfig) -> dict[str, Any]:
    worst = {}
    for k in (2, 3):
        promise = cfg.k if cfg.k is not None else k
        used = []
        for i in range(cfg.trials * 5):
            p = generate(FamilySpec("shifted_chains", {"k": k}, _trial_seed(cfg.seed, i)))
            try:
                a = online_partition(p, promise, 150)
            except PromiseViolated as exc:
                return {"pass": False, "k": k, "promise": promise, "witness": exc.witness}
            if any(classify_set(p, c) is not Kind.CHAIN for c in a.chains):
                return {"pass": False, "k": k, "reason": "class is not a chain"}
            longer = online_partition(p, promise, 300)
            if longer.chain_of[:150] != a.chain_of:
                return {"pass": False, "k": k, "reason": "prefix changed on the longer run"}
            if a.n_chains > kierstead_bound(promise):
                return {"pass": False, "k": k, "reason": "chain bound exceeded"}
            used.append(a.n_chains)
        worst[str(k)] = max(used)
    return {"pass": True, "max_chains": worst}


def suite_dilworth(cfg: SelftestConfig) -> dict[str, Any]:
    from .order_core import width_exhaustive

    for i in range(cfg.trials * 25):
        rng = np.random.default_rng(_trial_seed(cfg.seed, i))
        p = generate(FamilySpec("random_finite", {"n": int(rng.integers(1, 13)), "density": float(rng.uniform(0.05, 0.5))},
                                _trial_seed(cfg.seed, i)))
        if dilworth_offline(p).n_chains != width_exhaustive(p):
            return {"pass": False, "trial": i}
    return {"pass": True, "trials": cfg.trials * 25}


def suite_bounds(cfg: SelftestConfig) -> dict[str, Any]:
    n = 100
    for i in range(cfg.trials):
        p = generate(FamilySpec("shifted_chains", {"k": 3}, _trial_seed(cfg.seed, i)))
        if len(chain_from_width(p, 3, n)) * kierstead_bound(3) < n:
            return {"pass": False, "trial": i, "kind": "chain"}
        q = layered_random(n, 2, 0.08, np.random.default_rng(_trial_seed(cfg.seed, i)))
        if len(antichain_from_height(q, 2, n)) * 4 < n:
            return {"pass": False, "trial": i, "kind": "antichain"}
    return {"pass": True}


def suite_tree_helper(cfg: SelftestConfig) -> dict[str, Any]:
    count = 0
    for k in (2, 3):
        for t in all_valid_trees(k):
            if not satisfies_conclusion(t, tree_helper(t)):
                return {"pass": False, "k": k, "tree": sorted(t.nodes)}
            count += 1
    rng = np.random.default_rng(cfg.seed)
    for _ in range(cfg.trials * 25):
        t = random_valid_tree(4, rng)
        if not satisfies_conclusion(t, tree_helper(t)):
            return {"pass": False, "k": 4, "tree": sorted(t.nodes)}
    return {"pass": True, "exhaustive": count}


def _tower_cases(cfg: SelftestConfig):
    for i in range(max(1, cfg.trials // 2)):
        s = _trial_seed(cfg.seed, i)
        yield FamilySpec("product_lq3", {}, s)
        yield FamilySpec("product_lq2", {}, s)
        yield FamilySpec("shifted_chains", {"k": 2}, s)
        yield FamilySpec("shifted_chains", {"k": 3}, s)
        yield FamilySpec("pi02", {}, s)


def suite_tower(cfg: SelftestConfig) -> dict[str, Any]:
    params = Params(window=300, m=cfg.m, budget=cfg.budget)
    runs = []
    for spec in _tower_cases(cfg):
        p = generate(spec)
        chains = chains_for(p, params.window)
        try:
            ex = extract_tower(p, chains, seed_chain(p, chains, params.window), params)
        except BudgetTooSmall as exc:
            return {"pass": False, "expected_fail": True, "error": "BudgetTooSmall", "detail": str(exc)}
        ok = ex.passes and len(ex.chain) >= 20
        if spec.name == "pi02":
            ok = ok and set(ex.chain) <= set(chains[p.meta["least_total"]])
        runs.append({"family": spec.name, "seed": spec.seed, "length": len(ex.chain), "pass": ok})
        if not ok:
            return {"pass": False, "runs": runs}
    return {"pass": True, "runs": runs}


def suite_diagonal(cfg: SelftestConfig) -> dict[str, Any]:
    params = Params(window=200, m=cfg.m, budget=cfg.budget)
    for i in range(max(1, cfg.trials // 2)):
        s = _trial_seed(cfg.seed, i)
        for spec in (FamilySpec("product_lq2", {}, s),
                     FamilySpec("chain_ext", {"injection": InjectionSpec.seeded(s, 100).to_json()}, s)):
            p = generate(spec)
            chains = chains_for(p, params.window)
            try:
                ex = extract_w2_diagonal(p, seed_chain(p, chains, params.window), params, max_levels=16)
            except BudgetTooSmall as exc:
                return {"pass": False, "expected_fail": True, "error": "BudgetTooSmall", "detail": str(exc)}
            if not ex.passes:
                return {"pass": False, "family": spec.name, "seed": s}
    return {"pass": True}


def suite_ssrt(cfg: SelftestConfig) -> dict[str, Any]:
    sizes = []
    for i in range(cfg.trials * 5):
        table = random_stable_coloring(200, 3, np.random.default_rng(_trial_seed(cfg.seed, i)))
        res = ssrt_extract(table)
        if not table.is_homogeneous(res.elements) or len(res.elements) < 10:
            return {"pass": False, "trial": i}
        sizes.append(len(res.elements))
    return {"pass": True, "min_size": min(sizes)}


def suite_pipeline(cfg: SelftestConfig) -> dict[str, Any]:
    for i in range(cfg.trials):
        f = InjectionSpec.seeded(_trial_seed(cfg.seed, i), 80)
        if not pipeline_reversal(f).exact:
            return {"pass": False, "trial": i}
    return {"pass": True}


def suite_xi(cfg: SelftestConfig) -> dict[str, Any]:
    for i in range(cfg.trials):
        s = _trial_seed(cfg.seed, i)
        f = InjectionSpec.seeded(s, 60)
        p = xi_construct(f)
        seq = find_bad_sequence(p, p.size, 10)
        if seq is None:
            return {"pass": False, "trial": i, "reason": "no bad sequence"}
        table = decode_range_from_bad_sequence(p, seq)
        if table.members != brute_force_range(f, table.bound) or qprops_violations(p, 2000, np.random.default_rng(s)):
            return {"pass": False, "trial": i}
    return {"pass": True}


def suite_leftmost(cfg: SelftestConfig) -> dict[str, Any]:
    rng = np.random.default_rng(cfg.seed)
    checked = 0
    for _ in range(cfg.trials * 10):
        t = random_tree(rng, max_nodes=1500)
        deep = [n for n in t.nodes if len(n) == 8]
        if deep:
            checked += 1
            if leftmost_path(t, 8) != min(deep):
                return {"pass": False}
    return {"pass": True, "checked": checked}


def suite_ideals(cfg: SelftestConfig) -> dict[str, Any]:
    for i in range(cfg.trials * 10):
        s = _trial_seed(cfg.seed, i)
        p = generate(FamilySpec("random_finite", {"n": 20, "density": 0.1, "chains": 3}, s))
        fam = essential_ideal_decomposition(p, bound=3)
        fam.check(p.rel)
    return {"pass": True}


def suite_determinism(cfg: SelftestConfig) -> dict[str, Any]:
    def once() -> str:
        p = generate(FamilySpec("product_lq3", {}, cfg.seed))
        chains = chains_for(p, 200)
        ex = extract_tower(p, chains, seed_chain(p, chains, 200), Params(window=200, m=cfg.m, budget=cfg.budget))
        return canonical_json({"chain": ex.chain, "transcript": ex.transcript})

    try:
        same = once() == once()
    except BudgetTooSmall as exc:
        return {"pass": False, "expected_fail": True, "error": "BudgetTooSmall", "detail": str(exc)}
    return {"pass": same}


SUITES: list[tuple[str, Callable[[SelftestConfig], dict[str, Any]]]] = [
    ("1-online-decomposition", suite_online),
    ("2-dilworth-oracle", suite_dilworth),
    ("3-chain-antichain-bounds", suite_bounds),
    ("4-tree-helper", suite_tree_helper),
    ("5-tower-extraction", suite_tower),
    ("6-width2-diagonal", suite_diagonal),
    ("7-ssrt", suite_ssrt),
    ("8-reversal-pipeline", suite_pipeline),
    ("9-xi-decoding", suite_xi),
    ("10-leftmost-path", suite_leftmost),
    ("11-ideal-decomposition", suite_ideals),
    ("12-determinism", suite_determinism),
]


def run_selftest(cfg: SelftestConfig | None = None) -> dict[str, Any]:
    cfg = cfg or SelftestConfig()
    out = {}
    for name, fn in SUITES:
        out[name] = fn(cfg)
    return {"suites": out, "all_pass": all(v["pass"] for v in out.values())}
