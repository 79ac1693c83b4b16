#!/usr/bin/env python3
"""Compare the pure-Python and compiled kernel backends.

Runs the hot kernels through both implementations, checks the outputs are
identical, and reports median wall-clock times plus the speedup.

    python benchmarks/bench_backends.py            # standard set
    python benchmarks/bench_backends.py --full     # adds the 7%/8% scan
                                                   # (pure side takes ~2 min)
"""

import argparse
import statistics
import time

from dhtplan._backend import pure

try:
    from dhtplan._backend import _fastkern as fast
except ImportError:
    fast = None

CASES = [
    ("binom_cdf tail (c=127, n=7360)", "binom_cdf", (127, 7360, 0.015), 200),
    ("poisson_cdf (c=29, lam=38.8)", "poisson_cdf", (29, 38.78), 2000),
    ("bin scan 2%/5%", "discrete_scan", (0, 0.02, 0.05, 0.025, 0.025, 0.0019, 5000), 5),
    ("poiss scan 5%/10%", "discrete_scan", (1, 0.05, 0.10, 0.025, 0.025, 0.001, 5000), 5),
    ("bin zero-start scan (p1=2%)", "zero_scan", (0, 0.02, 0.05, 5000), 5),
    ("unit-step scan 1.5%/2% (eps=1e-6)", "norm_iter_scan",
     (0.015, 0.02, 1.64, 1.64, 1e-6, 200000), 20),
]

FULL_CASES = [
    ("bin scan 7%/8% (hot!)", "discrete_scan",
     (0, 0.07, 0.08, 0.025, 0.025, 0.0019, 20000), 1),
]


def median_time(fn, args, repeats):
    times = []
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn(*args)
        times.append(time.perf_counter() - t0)
    return statistics.median(times), result


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--full", action="store_true",
                    help="include the long 7%%/8%% scan")
    opts = ap.parse_args()

    if fast is None:
        print("compiled backend not built; run: python setup.py build_ext --inplace")
        return 1

    cases = CASES + (FULL_CASES if opts.full else [])
    width = max(len(label) for label, *_ in cases)
    print(f"{'case':<{width}}  {'pure':>11}  {'compiled':>11}  {'speedup':>8}")
    for label, name, args, repeats in cases:
        t_pure, r_pure = median_time(getattr(pure, name), args, repeats)
        t_fast, r_fast = median_time(getattr(fast, name), args, repeats)
        assert r_pure == r_fast, (label, r_pure, r_fast)
        print(f"{label:<{width}}  {t_pure:>10.3g}s  {t_fast:>10.3g}s  "
              f"{t_pure / t_fast:>7.1f}x")
    print("\nall outputs identical across backends")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
