#!/usr/bin/env python3
"""Benchmark the compiled kernels against their pure-Python twins.

Runs the full per-frame simulation loop on both backends with identical
arguments, checks the outputs are byte-identical, and reports frames per
second plus the speedup.  Usage::

    python benchmarks/bench_backends.py [--frames N] [--repeats K]
"""

import argparse
import time

import numpy as np

from cpsched.backend import pure
from cpsched.scheduler import stretching_inverse

try:
    from cpsched.backend import jit
except ImportError:
    jit = None


def sim_args(frames):
    # the mismatch-sweep working point: 12 slots, latency 1, tight target
    return (12, 1, 0.01, 0.05, frames,
            0.16, 0.16, 0, 6, 0.02, 0.02,
            True, stretching_inverse(0.01), np.uint64(0xFEEDFACE))


def bench(fn, args, repeats):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--frames", type=int, default=20_000)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    sargs = sim_args(args.frames)
    t_pure, out_pure = bench(pure.simulate, sargs, args.repeats)
    print(f"pure   : {t_pure:8.3f} s   "
          f"{args.frames / t_pure:12.0f} frames/s")

    if jit is None:
        print("numba  : unavailable (install numba to compare)")
        return

    jit.simulate(*sim_args(16))  # warm the dispatcher
    t_jit, out_jit = bench(jit.simulate, sargs, args.repeats)
    print(f"numba  : {t_jit:8.3f} s   "
          f"{args.frames / t_jit:12.0f} frames/s")
    print(f"speedup: {t_pure / t_jit:8.1f}x")

    for a, b in zip(out_jit[:-1], out_pure[:-1]):
        assert np.array_equal(a, b), "backend outputs diverged"
    assert float(out_jit[-1]) == float(out_pure[-1])
    print("outputs: bit-identical across backends")


if __name__ == "__main__":
    main()
