#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-numpy fallback.

Times the two hot loops on representative workloads: the pulse-protocol
sweep (hysterons x grid points) and the monotone level scan (DAC-code sized
inputs). Both backends produce bit-identical outputs; this only measures
speed.

Usage: python benchmarks/bench_kernels.py [--repeats 5]
"""

import argparse
import time

import numpy as np

from ferrocal._kernels import _pure

try:
    from ferrocal._kernels import _native
except ImportError:
    _native = None


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_protocol_sweep(repeats):
    rng = np.random.default_rng(1)
    rows = []
    for n, grid_points in ((100_000, 1701), (1_000_000, 426)):
        vth_r = rng.uniform(2, 9, n)
        vth_w = rng.uniform(2, 9, n)
        grid = np.linspace(0.5, 9.0, grid_points)

        def run(impl):
            down = np.zeros(n, dtype=np.uint8)
            impl.protocol_sweep(vth_r, vth_w, down, 9.0, 2, 2, grid)

        t_pure = best_of(lambda: run(_pure), repeats)
        t_native = best_of(lambda: run(_native), repeats) if _native else None
        rows.append((f"protocol_sweep n={n:.0e} grid={grid_points}", t_pure, t_native))
    return rows


def bench_monotone_scan(repeats):
    rng = np.random.default_rng(2)
    values = np.cumsum(rng.normal(0.02, 1.0, 2**18))
    rows = []
    for margin, label in ((0.0, "margin=0 (vectorizes)"), (0.09, "margin>0 (sequential)")):
        t_pure = best_of(lambda: _pure.monotone_keep_mask(values, margin, margin > 0), repeats)
        t_native = (best_of(lambda: _native.monotone_keep_mask(values, margin, margin > 0), repeats)
                    if _native else None)
        rows.append((f"monotone_keep_mask 2^18 codes {label}", t_pure, t_native))
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    if _native is None:
        print("compiled backend not available; timing the pure backend only\n")

    rows = bench_protocol_sweep(args.repeats) + bench_monotone_scan(args.repeats)
    width = max(len(r[0]) for r in rows)
    header = f"{'kernel / workload':<{width}}  {'pure':>10}  {'native':>10}  {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for name, t_pure, t_native in rows:
        if t_native is None:
            print(f"{name:<{width}}  {t_pure * 1e3:>8.2f}ms  {'-':>10}  {'-':>8}")
        else:
            print(f"{name:<{width}}  {t_pure * 1e3:>8.2f}ms  {t_native * 1e3:>8.2f}ms"
                  f"  {t_pure / t_native:>7.1f}x")


if __name__ == "__main__":
    main()
