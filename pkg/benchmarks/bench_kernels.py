"""Time the numba kernels against the pure numpy/Python fallbacks.

    python benchmarks/bench_kernels.py [--repeat 5]

Both paths are imported in-process (the fallbacks are always available as
``*_py``), so one run compares them directly and checks they agree.
"""

import argparse
import time

import numpy as np

from metricmahler import _kernels
from metricmahler.golden import _fib


def best_of(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def fib_columns(n):
    h = _fib(n)
    return [(h[k + 1], h[k]) for k in range(n + 1)], (h[n + 1], h[n])


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"numba active: {_kernels.USE_NUMBA}")
    if _kernels.USE_NUMBA:
        # compile outside the timed region
        _kernels.nonnegative_solutions([(1, 0), (1, 1)], (2, 1))
        _kernels.bounded_weighted_sums(np.ones((2, 2), np.int64), np.ones(2), np.ones(2))

    print(f"{'kernel':<34}{'size':>10}{'numba s':>12}{'numpy s':>12}{'speedup':>10}")
    for n in (6, 8, 10):
        cols, target = fib_columns(n)
        t_fast, fast = best_of(lambda: _kernels.nonnegative_solutions(cols, target), args.repeat)
        # the pure-Python walk takes ~30 s at n = 10, so time it once there
        t_slow, slow = best_of(lambda: _kernels.nonnegative_solutions_py(cols, target),
                               args.repeat if n < 10 else 1)
        assert np.array_equal(fast, slow)
        print(f"{'nonnegative_solutions n=' + str(n):<34}{len(fast):>10}{t_fast:>12.5f}{t_slow:>12.5f}"
              f"{t_slow / t_fast:>10.1f}")

    rng = np.random.default_rng(0)
    for rows in (1_000, 100_000):
        w = rng.integers(0, 6, size=(rows, 12))
        lo = rng.random(12)
        hi = lo * (1 + 1e-12)
        t_fast, (a, b) = best_of(lambda: _kernels.bounded_weighted_sums(w, lo, hi), args.repeat)
        t_slow, (c, d) = best_of(lambda: _kernels.bounded_weighted_sums_py(w, lo, hi), args.repeat)
        # both are rigorous; they may differ by rounding only
        assert np.allclose(a, c, rtol=1e-12) and np.allclose(b, d, rtol=1e-12)
        print(f"{'bounded_weighted_sums':<34}{rows:>10}{t_fast:>12.5f}{t_slow:>12.5f}"
              f"{t_slow / t_fast:>10.1f}")


if __name__ == "__main__":
    main()
