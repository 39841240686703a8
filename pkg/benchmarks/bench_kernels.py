#!/usr/bin/env python3
"""Benchmark the compiled kernel core against the numpy fallback.

Times the two hot assemblies (angular matrix and full STM kernel matrix)
and one full determinant evaluation per grid size.  Run from the repo
root after `pip install -e . --no-build-isolation`:

    python3 benchmarks/bench_kernels.py [--sizes 100,200,400]
"""

import argparse
import time

import numpy as np

from stm3 import BoundStateProblem, ChannelConfig, det_at, make_grid
from stm3 import _kernels_py

try:
    from stm3 import _kernels_cy
except ImportError:
    _kernels_cy = None


def best_of(repeats, func, *args):
    best = np.inf
    for _ in range(repeats):
        start = time.perf_counter()
        func(*args)
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="100,200,400")
    parser.add_argument("--repeats", type=int, default=7)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    if _kernels_cy is None:
        print("compiled extension not built; timing the fallback only")
    impls = [("python", _kernels_py)] + ([("compiled", _kernels_cy)] if _kernels_cy else [])

    print(f"{'n':>6} {'assembly':>10} " + " ".join(f"{name:>12}" for name, _ in impls)
          + f" {'speedup':>9}")
    for n in sizes:
        grid = make_grid(n)
        x = grid.nodes
        log_sub = _kernels_py.angular_log_matrix(-1.0, x, x)
        rows = {}
        for label, call in (
            ("angular", lambda impl: impl.angular_log_matrix(-0.05, x, x)),
            ("stm", lambda impl: impl.stm_kernel_matrix(-0.05, 0.0, x, x, log_sub)),
        ):
            times = [best_of(args.repeats, call, impl) for _, impl in impls]
            rows[label] = times
            speed = times[0] / times[-1] if len(times) > 1 else 1.0
            print(f"{n:>6} {label:>10} "
                  + " ".join(f"{t * 1e3:>10.3f}ms" for t in times)
                  + f" {speed:>8.2f}x")
        problem = BoundStateProblem(cfg=ChannelConfig(0.0), grid=grid)
        problem._log_sub
        t_det = best_of(args.repeats, det_at, -0.05, problem)
        print(f"{n:>6} {'det_at':>10} {'(active backend)':>25} {t_det * 1e3:>9.3f}ms")


if __name__ == "__main__":
    main()
