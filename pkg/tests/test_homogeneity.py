import itertools

import numpy as np
import pytest

from ordlab import FamilySpec, FinitePoset, generate
from ordlab.errors import BudgetTooSmall, InvalidChainIndex, NoCounterexamplesInWindow, NotAChain, NotAscending
from ordlab.homogeneity import (
    Base,
    ChainPrefix,
    Evaluator,
    Exhausted,
    Found,
    Ladder,
    LadderW2,
    alive_prefix,
    build_cx_sequence,
    certify_matrix,
    counterexample_target_chain,
    default_budget,
    dominates_forall_exists,
    eval_term,
    find_counterexample,
    least_passing_tail,
    verify_prefix_homogeneity,
)

import oracles


def _omega():
    return generate(FamilySpec("omega", {}, 0))


def _lq3():
    return generate(FamilySpec("product_lq3", {}, 0))


# -- certificates ---------------------------------------------------------------

def test_linear_order_full_prefix_passes():
    cert = verify_prefix_homogeneity(_omega(), list(range(40)), 10, 40)
    assert cert.passes
    assert cert.tally()["zero"] == 0


def test_empty_chain_is_all_zero():
    cert = verify_prefix_homogeneity(_lq3(), [], 10, 30)
    assert cert.passes and cert.tally()["zero"] == 30


def test_descending_chain_with_maximum_flags_single_comparability():
    # z-leg listed from its maximum down: <9,b> sees only the maximum
    chain = [3 * l + 2 for l in range(9, -1, -1)]
    cert = verify_prefix_homogeneity(_lq3(), chain, 10, 60)
    assert 3 * 9 + 1 in cert.violating
    assert cert.counts[3 * 9 + 1] == 1


def test_certificate_rejects_non_chains():
    with pytest.raises(NotAChain):
        verify_prefix_homogeneity(_lq3(), [0, 1], 10, 30)
    with pytest.raises(NotAChain):
        verify_prefix_homogeneity(_omega(), [0, 50], 10, 30)


def test_certificate_json_shape():
    cert = verify_prefix_homogeneity(_omega(), [0, 1, 2], 2, 5)
    j = cert.to_json()
    assert set(j) == {"m", "window", "chain", "verdicts"}
    assert set(j["verdicts"]) == {"zero", "at_least_m", "open", "violating"}


@pytest.mark.parametrize("reading", ["inf", "cof"])
def test_certificate_matches_recount_on_all_small_chains(reading, rng):
    for seed in range(25):
        n = int(rng.integers(1, 10))
        p = generate(FamilySpec("random_finite", {"n": n, "density": float(rng.uniform(0.1, 0.6))}, seed))
        lt = oracles.lt_from_matrix(p.rel)
        chains = [c for r in range(0, 4) for c in itertools.permutations(range(n), r) if oracles.is_chain(lt, c)]
        for chain in chains[:200]:
            m = int(rng.integers(1, 4))
            cert = certify_matrix(p.rel, chain, m, reading)
            want = oracles.verdicts(n, lt, chain, m, reading)
            got = cert.to_json()["verdicts"]
            assert got == want, (seed, chain, m)


def test_open_counts_never_drop_when_chain_grows():
    p = generate(FamilySpec("shifted_chains", {"k": 2}, 6))
    less = p.less_matrix(120)
    chain = list(range(0, 120, 2))
    first = certify_matrix(less, chain[:20], 10)
    later = certify_matrix(less, chain[:40], 10)
    for e, v in enumerate(first.verdicts):
        if v == "open":
            assert later.counts[e] >= first.counts[e]


def test_least_passing_tail():
    less = _lq3().less_matrix(60)
    chain = [3 * l + 2 for l in range(9, -1, -1)]
    t, cert = least_passing_tail(less, chain, 10)
    assert cert.passes
    for earlier in range(t):
        assert not certify_matrix(less, chain[earlier:], 10).passes
    t2, _ = least_passing_tail(less, chain, 10, min_len=len(chain))
    assert t2 == 0


# -- counterexamples ---------------------------------------------------------------

def test_no_counterexample_in_a_linear_order():
    assert find_counterexample(_omega(), list(range(30)), 30) is None


def test_counterexample_above_a_leg():
    p = _lq3()
    a = [3 * l for l in range(10)]
    q, n = find_counterexample(p, a, 60)
    lt = oracles.lt_from_matrix(p.less_matrix(60))
    assert oracles.is_counterexample(lt, a, q)
    assert q == min(x for x in range(60) if oracles.is_counterexample(lt, a, x))
    assert q % 3 == 2


def test_counterexample_in_shifted_chains():
    s = [[0, 1], [None, 0]]
    p = generate(FamilySpec("shifted_chains", {"k": 2, "shifts": s}, 0))
    a = list(range(0, 40, 2))
    q, n = find_counterexample(p, a, 40)
    assert q % 2 == 1 and p.less(a[n], q)
    assert oracles.is_counterexample(oracles.shifted_lt(2, s), a, q)


def test_counterexample_requires_ascending():
    with pytest.raises(NotAscending):
        find_counterexample(generate(FamilySpec("omega_star", {}, 0)), [0, 1, 2], 10)
    with pytest.raises(NotAscending):
        build_cx_sequence(generate(FamilySpec("omega_star", {}, 0)), [[0, 1, 2]], [0, 1, 2], 10)


def test_target_chain_examples():
    omega = _omega()
    assert counterexample_target_chain(omega, [list(range(50))], list(range(50)), 50) is None
    p = _lq3()
    chains = [list(range(j, 90, 3)) for j in range(3)]
    assert counterexample_target_chain(p, chains, [3 * l for l in range(20)], 90) == 2


def test_target_chain_pi02_points_lower():
    p = generate(FamilySpec("pi02", {"profile": [{"total": 1}, {"total": 2}]}, 0))
    chains = p.natural_chains(200)
    a = chains[1][:30]
    less = p.less_matrix(200)
    assert all(less[x, y] for x, y in zip(a, a[1:]))
    assert counterexample_target_chain(p, chains, a, 200) == 0


def test_build_cx_sequence_properties():
    for spec, chain_of_a in ((FamilySpec("product_lq3", {}, 0), 0),
                             (FamilySpec("shifted_chains", {"k": 3}, 11), None)):
        p = generate(spec)
        n = 150
        less = p.less_matrix(n)
        chains = p.natural_chains(n)
        lt = oracles.lt_from_matrix(less)
        if chain_of_a is None:
            cands = [c for c in chains if find_counterexample(p, c[:30], n)]
            if not cands:
                continue
            a = cands[0][:30]
        else:
            a = chains[chain_of_a][:30]
        cx = build_cx_sequence(p, chains, a, n)
        assert cx.elements and all(lt(x, y) for x, y in zip(cx.elements, cx.elements[1:]))
        assert all(x in chains[cx.chain] for x in cx.elements)
        for q, t in zip(cx.elements, cx.tails):
            assert oracles.is_counterexample(lt, a[t:], q)


def test_build_cx_sequence_none_in_linear():
    with pytest.raises(NoCounterexamplesInWindow):
        build_cx_sequence(_omega(), [list(range(40))], list(range(40)), 40)


def test_dominance():
    less = _omega().less_matrix(10)
    assert dominates_forall_exists(less, [1, 2], [3])
    assert not dominates_forall_exists(less, [5], [3])
    assert dominates_forall_exists(less, [], [])
    assert not dominates_forall_exists(less, [1], [])


# -- evaluator -------------------------------------------------------------------

def _brute_ladder(lt, candidates, inner):
    out = []
    for m in range(len(inner)):
        ok = [p for p in sorted(candidates)
              if (not out or lt(out[-1], p))
              and (p == inner[m] or lt(inner[m], p))
              and any(not oracles.comparable(lt, p, inner[n]) for n in range(m + 1, len(inner)))]
        if not ok:
            break
        out.append(ok[0])
    return out


def test_base_returns_its_entries():
    ev = Evaluator(_omega().less_matrix(20), [list(range(20))])
    assert ev.eval(Base(tuple(range(20))), 5, 10) == Found(5)
    assert isinstance(ev.eval(Base((1, 2)), 5, 10), Exhausted)


@pytest.mark.parametrize("spec", [FamilySpec("product_lq3", {}, 0), FamilySpec("shifted_chains", {"k": 3}, 2),
                                  FamilySpec("product_lq2", {}, 0), FamilySpec("pi02", {}, 5)],
                         ids=lambda s: s.name)
def test_ladder_matches_brute_force(spec):
    p = generate(spec)
    n = 90
    less = p.less_matrix(n)
    lt = oracles.lt_from_matrix(less)
    chains = p.natural_chains(n)
    ev = Evaluator(less, chains)
    for c in chains:
        inner = [x for x in c][:25]
        if len(inner) < 2 or not all(lt(x, y) for x, y in zip(inner, inner[1:])):
            continue
        for i, target in enumerate(chains):
            got = ev.sequence(Ladder(Base(tuple(inner)), i))
            assert got == _brute_ladder(lt, target, inner)
            # domination and chain membership
            assert all(x == u or lt(u, x) for u, x in zip(inner, got))
            assert set(got) <= set(target)


def test_ladder_exhausts_on_wrong_leg():
    p = _lq3()
    less = p.less_matrix(90)
    chains = p.natural_chains(90)
    ev = Evaluator(less, chains)
    z = tuple(chains[2][:20])
    res = ev.eval(Ladder(Base(z), 0), 0, 10_000)
    assert isinstance(res, Exhausted) and res.reason == "window"


def test_ladder_w2_separation():
    p = generate(FamilySpec("product_lq2", {}, 0))
    less = p.less_matrix(120)
    lt = oracles.lt_from_matrix(less)
    ev = Evaluator(less, [list(range(120))])
    inner = tuple(range(0, 120, 2))
    term = LadderW2(Base(inner))
    seq = ev.sequence(term)
    assert seq == _brute_ladder(lt, range(120), list(inner))
    for m, v in enumerate(seq):
        assert any(not oracles.comparable(lt, v, inner[n]) for n in range(m + 1, len(inner)))


def test_found_is_stable_under_budget_doubling():
    p = generate(FamilySpec("shifted_chains", {"k": 3}, 2))
    less = p.less_matrix(150)
    chains = p.natural_chains(150)
    term = Ladder(Ladder(Base(tuple(chains[0][:40])), 1), 2)
    base = Evaluator(less, chains).sequence(term)
    for m in range(len(base)):
        for b in (default_budget(m) * 2, default_budget(m) * 4):
            assert Evaluator(less, chains).eval(term, m, b) == Found(base[m])


def test_tiny_budget_is_reported():
    p = generate(FamilySpec("shifted_chains", {"k": 3}, 2))
    less = p.less_matrix(150)
    chains = p.natural_chains(150)
    ev = Evaluator(less, chains, budget_base=1, retries=0)
    with pytest.raises(BudgetTooSmall):
        ev.sequence(Ladder(Base(tuple(chains[0][:40])), 1))
    res = Evaluator(less, chains).eval(Ladder(Base(tuple(chains[0][:40])), 1), 0, 1)
    assert isinstance(res, (Exhausted, Found))


def test_invalid_chain_index_and_budget():
    ev = Evaluator(_omega().less_matrix(10), [list(range(10))])
    with pytest.raises(InvalidChainIndex):
        ev.sequence(Ladder(Base((0, 1, 2)), 3))
    with pytest.raises(ValueError):
        ev.eval(Base((0,)), 0, 0)


def test_eval_term_wrapper_and_helpers():
    p = _omega()
    assert eval_term(p, [list(range(50))], Base(tuple(range(50))), 3, 5, window=50) == Found(3)
    assert alive_prefix(10, 0.5) == 5 and alive_prefix(0, 0.5) == 1
    assert default_budget(0) == 1000 and default_budget(2, 10) == 30
    assert len(ChainPrefix.of([3, 4])) == 2


def test_term_hash_is_cached_and_consistent():
    t1 = Ladder(LadderW2(Base((1, 2))), 1)
    t2 = Ladder(LadderW2(Base((1, 2))), 1)
    assert t1 == t2 and hash(t1) == hash(t2)
    assert len({t1, t2}) == 1
    assert Ladder(Base((1,)), 0) != Ladder(Base((1,)), 1)
