#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallbacks.

Run:  python benchmarks/bench_kernels.py [--n-nodes 4001] [--repeats 5]

The numba variants are compiled once before timing. If numba is missing or
disabled via DIRACOSC_NO_NUMBA the script still reports the numpy lane.
"""

import argparse
import time

import numpy as np

from diracosc import kernels


def timeit(fn, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--n-nodes", type=int, default=4001)
    parser.add_argument("--n-apply", type=int, default=200001,
                        help="grid size for the matrix-free apply benchmark")
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    n = args.n_nodes
    x = np.linspace(-20, 20, n)
    h = x[1] - x[0]
    f = 2.4 * np.tanh(x)
    m = 3.2 * np.tanh(x)
    v = np.zeros_like(x)

    na = args.n_apply
    xa = np.linspace(-20, 20, na)
    ha = xa[1] - xa[0]
    fa = 2.4 * np.tanh(xa)
    ma = 3.2 * np.tanh(xa)
    va = np.zeros_like(xa)
    rng = np.random.default_rng(7)
    p1 = rng.normal(size=na) + 1j * rng.normal(size=na)
    p2 = rng.normal(size=na) + 1j * rng.normal(size=na)

    cases = [
        (f"assemble_dirac (n={n})",
         kernels.assemble_dirac_numpy, kernels.assemble_dirac_numba,
         (f, m, v, h, 1.0)),
        (f"assemble_schrodinger (n={n})",
         kernels.assemble_schrodinger_numpy, kernels.assemble_schrodinger_numba,
         (f**2, h)),
        (f"dirac_apply (n={na})",
         kernels.dirac_apply_numpy, kernels.dirac_apply_numba,
         (fa, ma, va, ha, 1.0, p1, p2, 0.0)),
        (f"cumulative_simpson_center (n={na})",
         kernels.cumulative_simpson_center_numpy, kernels.cumulative_simpson_center_numba,
         (fa, ha, na // 2)),
    ]

    print(f"selected backend: {kernels.BACKEND} (numba available: {kernels.HAVE_NUMBA})")
    print(f"{'kernel':40s} {'numpy':>10s} {'numba':>10s} {'speedup':>8s}")
    for name, fn_np, fn_nb, argv in cases:
        t_np = timeit(lambda: fn_np(*argv), args.repeats)
        if fn_nb is None:
            print(f"{name:40s} {t_np*1e3:9.2f}ms {'-':>10s} {'-':>8s}")
            continue
        fn_nb(*argv)  # compile before timing
        t_nb = timeit(lambda: fn_nb(*argv), args.repeats)
        print(f"{name:40s} {t_np*1e3:9.2f}ms {t_nb*1e3:9.2f}ms {t_np/t_nb:7.2f}x")


if __name__ == "__main__":
    main()
