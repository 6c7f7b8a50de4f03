"""Time the compiled kernels against the pure numpy fallback on the same inputs.

    python3 benchmarks/bench_kernels.py [--sizes 200 500 1000] [--repeat 3]

Both backends are imported directly, so the comparison runs in one process;
outputs are checked for equality (matching size, for the matching kernel)
before timings are reported.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from ordlab import _pykernels
from ordlab.order_core import FamilySpec, generate

try:
    from ordlab import _kernels as _compiled
except ImportError:
    _compiled = None


def _inputs(n: int) -> dict[str, np.ndarray]:
    out = {}
    for name, params in (("shifted_chains", {"k": 3}), ("product_lq3", {})):
        p = generate(FamilySpec(name, params, 7))
        out[name] = np.ascontiguousarray(p.less_matrix(p.window(n)), dtype=np.uint8)
    return out


def _calls(less: np.ndarray):
    topo = np.arange(less.shape[0], dtype=np.int64)
    return {
        "max_matching": lambda mod: int((np.asarray(mod.max_matching(less)) >= 0).sum()),
        "online_layers": lambda mod: mod.online_layers(less, 3)[:3],
        "id_bounded_heights": lambda mod: mod.id_bounded_heights(less, topo),
        "monotone_runs": lambda mod: (mod.monotone_runs(less, 0), mod.monotone_runs(less, 1)),
    }


def _same(a, b) -> bool:
    if isinstance(a, tuple):
        return len(a) == len(b) and all(_same(x, y) for x, y in zip(a, b))
    if isinstance(a, (int, np.integer)):
        return int(a) == int(b)
    return np.array_equal(np.asarray(a), np.asarray(b))


def _best(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[200, 500, 1000])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _compiled is None:
        raise SystemExit("compiled extension not built; run `pip install -e . --no-build-isolation` first")

    print(f"{'kernel':<20} {'family':<16} {'n':>5} {'python s':>10} {'compiled s':>11} {'speedup':>8}")
    for n in args.sizes:
        for fam, less in _inputs(n).items():
            for name, call in _calls(less).items():
                ref, got = call(_pykernels), call(_compiled)
                if not _same(ref, got):
                    raise SystemExit(f"backends disagree on {name} ({fam}, n={n})")
                tp = _best(lambda: call(_pykernels), args.repeat)
                tc = _best(lambda: call(_compiled), args.repeat)
                print(f"{name:<20} {fam:<16} {less.shape[0]:>5} {tp:>10.4f} {tc:>11.4f} {tp / max(tc, 1e-9):>7.1f}x")


if __name__ == "__main__":
    main()
