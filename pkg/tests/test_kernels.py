import os
import subprocess
import sys
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from metricmahler import _kernels
from metricmahler.golden import _fib


def fib_columns(n):
    h = _fib(n)
    return [(h[k + 1], h[k]) for k in range(n + 1)], (h[n + 1], h[n])


@pytest.mark.parametrize("n", [2, 4, 6, 8])
def test_enumeration_paths_identical(n):
    cols, target = fib_columns(n)
    assert np.array_equal(_kernels.nonnegative_solutions(cols, target),
                          _kernels.nonnegative_solutions_py(cols, target))


def test_enumeration_sorted_and_valid():
    cols, target = fib_columns(6)
    sols = _kernels.nonnegative_solutions(cols, target)
    assert [tuple(r) for r in sols] == sorted(tuple(r) for r in sols)
    assert np.all(sols @ np.array(cols) == np.array(target))


def test_enumeration_empty():
    assert _kernels.nonnegative_solutions([(2, 0)], (3, 0)).shape[0] == 0


@given(st.integers(1, 6), st.integers(1, 40), st.data())
def test_weighted_sums_are_rigorous(cols, rows, data):
    w = np.array(data.draw(st.lists(st.lists(st.integers(0, 9), min_size=cols, max_size=cols),
                                    min_size=rows, max_size=rows)), dtype=np.int64)
    lo = np.array(data.draw(st.lists(st.floats(1e-3, 1e3), min_size=cols, max_size=cols)))
    hi = np.nextafter(lo, np.inf)
    for fn in (_kernels.bounded_weighted_sums, _kernels.bounded_weighted_sums_py):
        s_lo, s_hi = fn(w, lo, hi)
        for r in range(rows):
            exact_lo = sum(int(w[r, j]) * Fraction(float(lo[j])) for j in range(cols))
            exact_hi = sum(int(w[r, j]) * Fraction(float(hi[j])) for j in range(cols))
            assert Fraction(float(s_lo[r])) <= exact_lo
            assert exact_hi <= Fraction(float(s_hi[r]))


def test_disable_flag_selects_fallback():
    env = dict(os.environ, METRICMAHLER_DISABLE_NUMBA="1")
    code = ("from metricmahler import _kernels, measures, infimum_sets\n"
            "p = infimum_sets.mt_profile(measures.PrimePowerRational(2, 3, 5, 3))\n"
            "print(_kernels.USE_NUMBA, p.exceptional_count)\n")
    proc = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, env=env)
    assert proc.stdout.split() == ["False", "3"], proc.stderr
