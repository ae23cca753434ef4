#!/usr/bin/env python3
"""Benchmark the second-price outcome kernel: numba @njit loop vs pure numpy.

Runs the same bid matrices through both backends, checks the outputs are
bit-identical, and reports throughput.  Backend selection in the library is
via AWAREBID_KERNEL={numba,numpy}; this script calls the implementations
directly so one process can time both.

Usage: python benchmarks/bench_kernels.py [--draws 2000000] [--bidders 3]
"""

import argparse
import time

import numpy as np

from awarebid._kernels import HAS_NUMBA, _stats_numpy

if HAS_NUMBA:
    from awarebid._kernels import _stats_numba


def run(fn, bids, repeats):
    fn(bids[:128])                      # warm up (JIT compile / cache touch)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(bids)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--draws", type=int, default=2_000_000)
    ap.add_argument("--bidders", type=int, default=3)
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    bids = rng.normal(size=(args.draws, args.bidders))
    # inject ties so the tie path is exercised
    ties = rng.integers(0, args.draws, size=args.draws // 100)
    bids[ties, 1] = bids[ties, 0]

    t_np, out_np = run(_stats_numpy, bids, args.repeats)
    print(f"numpy : {t_np:8.4f} s   {args.draws / t_np / 1e6:7.1f} Mdraws/s")
    if not HAS_NUMBA:
        print("numba : not installed")
        return
    t_nb, out_nb = run(_stats_numba, bids, args.repeats)
    print(f"numba : {t_nb:8.4f} s   {args.draws / t_nb / 1e6:7.1f} Mdraws/s")
    print(f"speedup numba/numpy: {t_np / t_nb:.2f}x")
    same = all(np.array_equal(a, b) for a, b in zip(out_np, out_nb))
    print(f"outputs bit-identical: {same}")
    if not same:
        raise SystemExit(1)


if __name__ == "__main__":
    main()
