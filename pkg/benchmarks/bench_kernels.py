"""Benchmark the compiled Maxwellian kernel against the pure-numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import time

import numpy as np

from bgk_lowrank._kernels import KERNEL_BACKEND
from bgk_lowrank._kernels._fallback import maxwellian_fill as numpy_fill

try:
    from bgk_lowrank._kernels._maxwell import maxwellian_fill as cython_fill
except ImportError:
    cython_fill = None


def make_inputs(m, k, d, seed=0):
    rng = np.random.default_rng(seed)
    return (
        rng.uniform(0.5, 2.0, m),
        rng.uniform(-1.0, 1.0, (m, d)),
        rng.uniform(0.5, 2.0, m),
        np.ascontiguousarray(rng.uniform(-6.0, 6.0, (k, d))),
    )


def timeit(fn, args, repeats):
    fn(*args)  # warm up
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    print(f"active backend: {KERNEL_BACKEND}")
    cases = [
        ("1d toy row block", 128, 128, 1),
        ("2d shear row block", 64 * 64, 16 * 16, 2),
        ("3d smoke row block", 32 * 32 * 32, 16 * 16 * 16, 3),
    ]
    header = f"{'case':<24}{'m x k':>16}{'numpy':>12}{'cython':>12}{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for name, m, k, d in cases:
        inputs = make_inputs(m, k, d)
        t_np = timeit(numpy_fill, inputs, args.repeats)
        if cython_fill is None:
            print(f"{name:<24}{f'{m}x{k}':>16}{t_np * 1e3:>10.2f}ms"
                  f"{'n/a':>12}{'n/a':>10}")
            continue
        t_cy = timeit(cython_fill, inputs, args.repeats)
        out_np = numpy_fill(*inputs)
        out_cy = cython_fill(*inputs)
        assert np.abs(out_np - out_cy).max() <= 1e-14 * np.abs(out_np).max()
        print(
            f"{name:<24}{f'{m}x{k}':>16}{t_np * 1e3:>10.2f}ms"
            f"{t_cy * 1e3:>10.2f}ms{t_np / t_cy:>9.2f}x"
        )


if __name__ == "__main__":
    main()
