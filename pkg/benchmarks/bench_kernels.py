"""Compare the compiled and numpy kernels on finite-quotient products.

    python3 benchmarks/bench_kernels.py [--batch 200000] [--repeat 5]

Prints one line per (law, level, backend) with the best wall time and the
throughput in products per second.  Results are checked for equality first.
"""

import argparse
import time

import numpy as np

from padlab import _kernels, make_context
from padlab.grouplaw import law_heisenberg, law_multiplicative
from padlab.lazard import FiniteQuotient

CASES = [
    ("x+y+5xy over Q_5", lambda: law_multiplicative(make_context(5, precision=8), 5), 4),
    ("Heisenberg over Q_3", lambda: law_heisenberg(make_context(3, precision=8)), 3),
    ("x+y+pi^2 xy over Q_3(sqrt -3)",
     lambda: law_multiplicative(make_context(3, eis=[3, 0, 1], precision=8), 3), 3),
]


def bench(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--batch", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    impls = _kernels.backends()
    if "cython" not in impls:
        print("compiled kernels unavailable; only the numpy backend is timed")
    rng = np.random.default_rng(0)
    for name, build, n in CASES:
        Q = FiniteQuotient(build(), n, check_axioms=False)
        X = rng.integers(0, Q.mod, (args.batch, Q.d, Q.m)).astype(np.int64)
        Y = rng.integers(0, Q.mod, (args.batch, Q.d, Q.m)).astype(np.int64)
        call = (Q._T, Q.mod) + Q._terms + (Q._maxdeg,)
        outs = {k: impl.law_mul_batch(X, Y, *call) for k, impl in impls.items()}
        ref = outs["python"]
        assert all(np.array_equal(ref, o) for o in outs.values()), "backends disagree"
        times = {}
        for k, impl in impls.items():
            times[k] = bench(lambda: impl.law_mul_batch(X, Y, *call), args.repeat)
            print(f"{name:32s} n={n} {k:7s} {times[k] * 1e3:9.2f} ms "
                  f"{args.batch / times[k]:14,.0f} products/s")
        if len(times) == 2:
            print(f"{'':32s}     speedup x{times['python'] / times['cython']:.2f}")


if __name__ == "__main__":
    main()
