"""Both kernel backends against each other and against brute force."""

import numpy as np
import pytest

from ordlab import FamilySpec, generate, kernels
from ordlab import _pykernels

import oracles


def _less(spec, n):
    p = generate(spec)
    return np.ascontiguousarray(p.less_matrix(p.window(n)), dtype=np.uint8)


SPECS = [
    FamilySpec("shifted_chains", {"k": 2}, 1),
    FamilySpec("shifted_chains", {"k": 3}, 5),
    FamilySpec("product_lq3", {}, 0),
    FamilySpec("random_finite", {"n": 60, "density": 0.05}, 3),
    FamilySpec("tf_linear", {"injection": {"kind": "seeded", "seed": 9, "domain": 90}}, 0),
]


def test_backend_flag():
    assert kernels.BACKEND in ("compiled", "python")


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: s.name)
def test_matching_size_is_width_complement(spec, backend):
    less = _less(spec, 40)
    mate = np.asarray(backend.max_matching(less))
    matched = int((mate >= 0).sum())
    n = less.shape[0]
    lt = oracles.lt_from_matrix(less)
    if n <= 14:
        assert n - matched == oracles.width(n, lt)
    # each matched pair is an actual relation
    for v, u in enumerate(mate):
        if u >= 0:
            assert less[u, v]


def test_matching_small_against_oracle(backend, rng):
    for seed in range(40):
        n = int(rng.integers(1, 11))
        less = _less(FamilySpec("random_finite", {"n": n, "density": float(rng.uniform(0, 0.5))}, seed), n)
        matched = int((np.asarray(backend.max_matching(less)) >= 0).sum())
        assert n - matched == oracles.width(n, oracles.lt_from_matrix(less))


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: s.name)
@pytest.mark.parametrize("k", [2, 3, 4])
def test_online_layers_agree(spec, k):
    pytest.importorskip("ordlab._kernels")
    from ordlab import _kernels

    less = _less(spec, 120)
    a = _pykernels.online_layers(less, k)
    b = _kernels.online_layers(less, k)
    assert np.array_equal(np.asarray(a[0]), np.asarray(b[0]))
    assert np.array_equal(np.asarray(a[1]), np.asarray(b[1]))
    assert a[2:] == b[2:]


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: s.name)
@pytest.mark.parametrize("desc", [0, 1])
def test_monotone_runs_match_brute_force(spec, desc, backend):
    less = _less(spec, 50)
    n = less.shape[0]
    # longest id-increasing run starting at x, each step moving up (or down)
    best = [1] * n
    for y in range(n - 1, -1, -1):
        for z in range(y + 1, n):
            if (less[z, y] if desc else less[y, z]):
                best[y] = max(best[y], best[z] + 1)
    assert np.asarray(backend.monotone_runs(less, desc)).tolist() == best


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: s.name)
def test_id_bounded_heights_agree(spec):
    pytest.importorskip("ordlab._kernels")
    from ordlab import _kernels

    less = _less(spec, 100)
    topo = np.argsort(less.sum(axis=0), kind="stable").astype(np.int64)
    a = _pykernels.id_bounded_heights(less, topo)
    b = _kernels.id_bounded_heights(less, topo)
    for x, y in zip(a, b):
        assert np.array_equal(np.asarray(x), np.asarray(y))


def test_id_bounded_heights_definition(backend):
    less = _less(FamilySpec("random_finite", {"n": 14, "density": 0.25}, 8), 14)
    n = 14
    topo = np.argsort(less.sum(axis=0), kind="stable").astype(np.int64)
    below, above = backend.id_bounded_heights(less, topo)

    def longest(ids):
        ids = list(ids)
        best = 0
        for mask in range(1, 1 << len(ids)):
            s = [ids[i] for i in range(len(ids)) if mask >> i & 1]
            if oracles.is_chain(oracles.lt_from_matrix(less), s):
                best = max(best, len(s))
        return best

    for x in range(n):
        assert below[x] == longest(y for y in range(x) if less[y, x])
        assert above[x] == longest(y for y in range(x) if less[x, y])
