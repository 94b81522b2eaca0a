"""Benchmark the compiled kernel lane against the numpy lane.

Run as ``python3 -m rowlpp.benchmark``.  Both lanes compute bit-identical
values (asserted here on every grid), so the comparison is purely about speed.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from . import _kernels_py

try:
    from . import _kernels_cy
except ImportError:
    _kernels_cy = None


def _time(fn, W, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(W)
        best = min(best, time.perf_counter() - t0)
    return best


def run(sizes: list[int], repeats: int) -> None:
    rng = np.random.Generator(np.random.Philox(0))
    names = ("weak_weak", "strict_x", "strict_y")
    if _kernels_cy is None:
        print("compiled lane not built; timing the numpy lane only")
    header = f"{'kernel':>10} {'grid':>12} {'numpy':>12}"
    if _kernels_cy is not None:
        header += f" {'compiled':>12} {'speedup':>9}"
    print(header)
    for n in sizes:
        W = rng.exponential(1.0, size=(n, n))
        for name in names:
            py_fn = getattr(_kernels_py, name)
            t_py = _time(py_fn, W, repeats)
            line = f"{name:>10} {n:>6}x{n:<5} {t_py * 1e3:>10.2f}ms"
            if _kernels_cy is not None:
                cy_fn = getattr(_kernels_cy, name)
                assert cy_fn(W) == py_fn(W), "lanes disagree"
                t_cy = _time(cy_fn, W, repeats)
                line += f" {t_cy * 1e3:>10.2f}ms {t_py / t_cy:>8.1f}x"
            print(line)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[200, 800, 2000])
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args(argv)
    run(args.sizes, args.repeats)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
