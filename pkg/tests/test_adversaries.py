import numpy as np
import pytest

from ordlab import FamilySpec, FinitePoset, InjectionSpec, StageTruth, generate
from ordlab.adversaries import (
    PipelineResult,
    StageError,
    brute_force_range,
    chain_ext_poset,
    decode_range_from_bad_sequence,
    decode_range_from_true,
    find_bad_sequence,
    is_bad,
    pi02_poset,
    pipeline_reversal,
    product_lq,
    qprops_violations,
    tf_linear,
    true_at,
    xi_construct,
)
from ordlab.errors import DomainExceeded, NoTotalIndex, NotBadSequence, NotInjective, NotLinear, NotTrueNumber, ParseError

import oracles


# -- injections and stage truth --------------------------------------------------------

def test_true_at_examples():
    ident = InjectionSpec.identity(20)
    assert all(true_at(ident, n, m) for n in range(20) for m in range(n, 20))
    f = InjectionSpec.from_list([1, 0, 2, 3])
    assert not true_at(f, 0, 1)
    assert all(true_at(f, n, n) for n in range(4))
    with pytest.raises(DomainExceeded):
        true_at(f, 0, 9)


def test_stage_truth_against_oracle():
    for seed in range(10):
        f = InjectionSpec.seeded(seed, 60)
        vals = f.values.tolist()
        truth = StageTruth(f)
        for n in range(60):
            for m in range(60):
                assert truth.true_at(n, m) == oracles.true_at(vals, n, m)
        # monotone non-increasing in m
        assert all(truth.matrix[n, m] >= truth.matrix[n, m + 1] for n in range(60) for m in range(n, 59))


def test_seeded_injection_has_many_false_numbers():
    for seed in range(20):
        f = InjectionSpec.seeded(seed, 200)
        vals = f.values.tolist()
        assert len(set(vals)) == 200
        false = sum(1 for n in range(200) if not oracles.true_at(vals, n, 199))
        assert false >= 0.3 * 200


def test_injection_codec():
    f = InjectionSpec.seeded(5, 30)
    assert InjectionSpec.from_json(f.to_json()).values.tolist() == f.values.tolist()
    g = InjectionSpec.from_list([3, 1])
    assert InjectionSpec.from_json(g.to_json()) == g
    with pytest.raises(ParseError):
        InjectionSpec.from_json({"kind": "list", "values": [-1]})
    with pytest.raises(ParseError):
        InjectionSpec.from_json({"kind": "seeded"})
    with pytest.raises(NotInjective):
        InjectionSpec.from_list([1, 1]).values


def test_false_witness_and_range_table():
    f = InjectionSpec.from_list([5, 2, 7, 1])
    t = StageTruth(f)
    assert t.false_witness(0) == 1 and t.false_witness(2) == 3 and t.false_witness(3) is None
    assert t.true_set() == [3]
    assert t.true_set(2) == [1]
    assert t.range_table(8) == [v in {5, 2, 7, 1} for v in range(8)]


# -- constructions ------------------------------------------------------------------

def test_tf_linear_identity_is_omega_star():
    p = tf_linear(InjectionSpec.identity(30))
    less = p.less_matrix(30)
    assert all(less[b, a] for a in range(30) for b in range(a + 1, 30))


def test_tf_linear_rule_against_truth():
    f = InjectionSpec.seeded(3, 100)
    vals = f.values.tolist()
    p = tf_linear(f)
    less = p.less_matrix(100)
    for n in range(100):
        for m in range(n + 1, 100):
            if oracles.true_at(vals, n, m):
                assert less[m, n]
            else:
                assert less[n, m]
    falses = [n for n in range(100) if not oracles.true_at(vals, n, 99)]
    trues = [n for n in range(100) if oracles.true_at(vals, n, 99)]
    assert all(less[a, b] for a, b in zip(falses, falses[1:]))
    assert all(less[b, a] for a, b in zip(trues, trues[1:]))


def test_tf_linear_small_example():
    p = tf_linear(InjectionSpec.from_list([1, 0, 2, 3]))
    assert p.less(0, 1)
    with pytest.raises(NotInjective):
        tf_linear(InjectionSpec.from_list([0, 0]))


def test_xi_single_point_is_linear():
    p = xi_construct(InjectionSpec.seeded(2, 40), base=FinitePoset.chain(1))
    less = p.less_matrix(40)
    assert ((less | less.T) | np.eye(40, dtype=bool)).all()


def test_xi_is_an_order_with_stage_rules():
    for seed in range(20):
        f = InjectionSpec.seeded(seed, 30)
        p = xi_construct(f)
        n = p.window(60)
        assert oracles.is_strict_order(n, oracles.lt_from_matrix(p.less_matrix(n)))
        assert qprops_violations(p, 500, np.random.default_rng(seed)) == []


def test_xi_stage_rules_directly():
    f = InjectionSpec.seeded(7, 40)
    vals = f.values.tolist()
    p = xi_construct(f)
    q, x = p.meta["block_size"], p.meta["x"]
    less = p.less_matrix(p.size)
    for n in range(40):
        for m in range(n + 1, 40):
            block = range(m * q, m * q + q)
            if oracles.true_at(vals, n, m):
                assert all(less[e, n * q + x] for e in block)
            else:
                assert all(less[n * q + x, e] for e in block)


def test_product_lq_examples():
    p = product_lq(FamilySpec("omega", {}, 0), 2)
    assert p.less(0, 1) and p.less(0, 2)
    with pytest.raises(NotLinear):
        product_lq(FamilySpec("product_lq2", {}, 0), 3)


def test_pi02_examples():
    p, star = pi02_poset([{"total": 1}])
    assert star == 0 and len([c for c in p.natural_chains(50) if c]) == 1
    p, star = pi02_poset([{"fails_at": 3}, {"total": 1}])
    assert star == 1
    chains = p.natural_chains(200)
    assert len(chains[0]) == 3 and len(chains[1]) == 197
    with pytest.raises(NoTotalIndex):
        pi02_poset([{"fails_at": 2}])


def test_chain_ext_examples():
    f = InjectionSpec.seeded(4, 60)
    vals = f.values.tolist()
    p, cs = chain_ext_poset(f)
    less = p.less_matrix(p.size)
    assert all(less[2 * n, 2 * n + 1] for n in range(60))
    for n in range(60):
        w = next((m for m in range(n + 1, 60) if vals[m] < vals[n]), None)
        if w is not None:
            assert not less[2 * w, 2 * n + 1] and not less[2 * n + 1, 2 * w]
        comparable_all = all(less[c, 2 * n + 1] or less[2 * n + 1, c] for c in cs)
        assert comparable_all == oracles.true_at(vals, n, 59)
    ident, _ = chain_ext_poset(InjectionSpec.identity(20))
    li = ident.less_matrix(40)
    assert all(li[2 * m, 2 * n + 1] for m in range(20) for n in range(20))


# -- decoders --------------------------------------------------------------------------

def test_decode_true_identity():
    t = decode_range_from_true(InjectionSpec.identity(20), range(10))
    assert t.bound == 9 and t.members == list(range(9))
    t = decode_range_from_true(InjectionSpec.identity(20), [])
    assert t.bound == 0


def test_decode_true_random_matches_brute_force():
    for seed in range(10):
        f = InjectionSpec.seeded(seed, 120)
        vals = f.values.tolist()
        trues = [n for n in range(51) if oracles.true_at(vals, n, 119)]
        t = decode_range_from_true(f, trues)
        assert t.members == oracles.range_below(vals, t.bound)
        assert t.members == brute_force_range(f, t.bound)


def test_decode_true_rejects_false_numbers():
    f = InjectionSpec.from_list([5, 2, 7, 1, 9])
    with pytest.raises(NotTrueNumber):
        decode_range_from_true(f, [0, 4])


def test_bad_sequences():
    omega = generate(FamilySpec("omega", {}, 0))
    assert find_bad_sequence(omega, 60, 3) is None
    anti = FinitePoset.antichain(30)
    assert find_bad_sequence(anti, 30, 10) == list(range(10))
    for seed in range(5):
        f = InjectionSpec.seeded(seed, 60)
        p = xi_construct(f)
        seq = find_bad_sequence(p, p.size, 10)
        lt = oracles.lt_from_matrix(p.less_matrix(p.size))
        assert seq is not None and oracles.is_bad(lt, seq)
        table = decode_range_from_bad_sequence(p, seq)
        assert table.members == oracles.range_below(f.values.tolist(), table.bound)


def test_is_bad_and_rejection():
    omega = generate(FamilySpec("omega", {}, 0))
    assert is_bad(omega.less_matrix(10), [3, 5]) == (0, 1)
    p = xi_construct(InjectionSpec.seeded(1, 30))
    with pytest.raises(NotBadSequence):
        decode_range_from_bad_sequence(p, [0, 2 * 5 + 0, 2 * 20 + 0])
    with pytest.raises(NotBadSequence):
        decode_range_from_bad_sequence(p, [])


def test_identity_xi_search():
    # Both points of every copy stay incomparable here, so the unguided search still finds one.
    f = InjectionSpec.identity(100)
    p = xi_construct(f)
    seq = find_bad_sequence(p, 200, 6, guided=False)
    lt = oracles.lt_from_matrix(p.less_matrix(200))
    assert seq is not None and oracles.is_bad(lt, seq)


# -- pipeline ------------------------------------------------------------------------

def test_pipeline_identity_trivial():
    res = pipeline_reversal(InjectionSpec.identity(50))
    assert res.exact and res.direction == "descending"


def test_pipeline_seeded_window_400():
    f = InjectionSpec.seeded(11, 400)
    res = pipeline_reversal(f)
    assert isinstance(res, PipelineResult) and res.exact
    assert res.table.members == oracles.range_below(f.values.tolist(), res.table.bound)
    assert set(res.to_json()) >= {"chain", "direction", "leg", "table", "exact_match", "transcript"}


def test_pipeline_stage_errors():
    with pytest.raises(StageError) as info:
        pipeline_reversal(InjectionSpec.from_list([0, 1, 1]))
    assert info.value.stage == "tf-linear" and isinstance(info.value.cause, NotInjective)
