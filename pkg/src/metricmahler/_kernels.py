"""Hot numeric kernels.

Each kernel has a plain numpy/Python implementation.  When numba is importable
and ``METRICMAHLER_DISABLE_NUMBA`` is not set to a truthy value, the loop-heavy
ones are compiled with ``numba.njit``.  Enumeration results are identical on
both paths; float enclosures may differ in the last bits but are rigorous on
both.  ``benchmarks/bench_kernels.py`` times them against each other.
"""

from __future__ import annotations

import os

import numpy as np

__all__ = [
    "USE_NUMBA",
    "nonnegative_solutions",
    "bounded_weighted_sums",
    "nonnegative_solutions_py",
    "bounded_weighted_sums_py",
]

_DISABLED = os.environ.get("METRICMAHLER_DISABLE_NUMBA", "").lower() in ("1", "true", "yes", "on")

try:
    if _DISABLED:
        raise ImportError
    import numba as _nb
    from numba.extending import register_jitable as _jitable
except ImportError:  # pragma: no cover - exercised via the env flag
    _nb = None

    def _jitable(fn):
        return fn

USE_NUMBA = _nb is not None

_UNIT = 2.0 ** -53
_TINY = 2.0 ** -1074
_HUGE = np.finfo(np.float64).max


@_jitable
def _column_cap(ca, cb, ra, rb):
    cap = -1
    if ca > 0:
        cap = ra // ca
    if cb > 0:
        c = rb // cb
        if cap < 0 or c < cap:
            cap = c
    return cap


def _dfs(ca, cb, a, b, out, fill):
    """Depth-first walk over nonnegative ``x`` with ``sum x_k (ca_k, cb_k) = (a, b)``.

    Columns are assigned from the last one down; each ``x_k`` is capped by the
    residual divided by the column entries.  Returns the number of solutions,
    writing them into ``out`` when ``fill`` is true.
    """
    n = ca.shape[0]
    x = np.zeros(n, np.int64)
    ra = np.zeros(n + 1, np.int64)
    rb = np.zeros(n + 1, np.int64)
    ra[n] = a
    rb[n] = b
    count = 0
    k = n - 1
    x[k] = _column_cap(ca[k], cb[k], ra[n], rb[n]) + 1
    while True:
        x[k] -= 1
        if x[k] < 0:
            k += 1
            if k == n:
                break
            continue
        ra[k] = ra[k + 1] - x[k] * ca[k]
        rb[k] = rb[k + 1] - x[k] * cb[k]
        if k == 0:
            if ra[0] == 0 and rb[0] == 0:
                if fill:
                    out[count, :] = x
                count += 1
            continue
        k -= 1
        x[k] = _column_cap(ca[k], cb[k], ra[k + 1], rb[k + 1]) + 1
    return count


def _bounded_sums_loop(weights, lo, hi, out_lo, out_hi):
    n_rows, n_cols = weights.shape
    for i in range(n_rows):
        s_lo = 0.0
        s_hi = 0.0
        for j in range(n_cols):
            w = weights[i, j]
            if w != 0:
                s_lo += w * lo[j]
                s_hi += w * hi[j]
        out_lo[i] = s_lo
        out_hi[i] = s_hi


if USE_NUMBA:
    _dfs_jit = _nb.njit(cache=True)(_dfs)
    _bounded_sums_jit = _nb.njit(cache=True)(_bounded_sums_loop)


def _solutions(dfs, columns, target):
    cols = np.asarray(columns, dtype=np.int64).reshape(-1, 2)
    if cols.shape[0] == 0:
        return np.zeros((0, 0), np.int64)
    if np.any((cols[:, 0] == 0) & (cols[:, 1] == 0)):
        raise ValueError("zero column makes the solution set infinite")
    ca = np.ascontiguousarray(cols[:, 0])
    cb = np.ascontiguousarray(cols[:, 1])
    a, b = int(target[0]), int(target[1])
    empty = np.zeros((1, cols.shape[0]), np.int64)
    count = dfs(ca, cb, a, b, empty, False)
    out = np.zeros((count, cols.shape[0]), np.int64)
    dfs(ca, cb, a, b, out, True)
    # lexicographic order, first entry most significant
    order = np.lexsort(out.T[::-1]) if count else np.zeros(0, np.int64)
    return out[order]


def nonnegative_solutions_py(columns, target) -> np.ndarray:
    return _solutions(_dfs, columns, target)


def nonnegative_solutions(columns, target) -> np.ndarray:
    """All nonnegative integer ``x`` with ``sum_k x_k * columns[k] == target``.

    ``columns`` is a sequence of ``(a_k, b_k)`` pairs.  Rows of the result are
    solutions in lexicographic order.
    """
    return _solutions(_dfs_jit if USE_NUMBA else _dfs, columns, target)


def _inflate(raw_lo, raw_hi, terms):
    # |fl(dot) - dot| <= gamma_n * dot for nonnegative data; the extra slack
    # covers the final multiplications and subnormal absolute errors.
    rel = (terms + 4) * 2.0 * _UNIT
    lo = raw_lo * (1.0 - rel) - (terms + 2) * _TINY
    hi = raw_hi * (1.0 + rel) + (terms + 2) * _TINY
    lo = np.where(np.isfinite(lo), np.maximum(lo, 0.0), _HUGE)
    hi = np.where(np.isnan(hi), np.inf, hi)
    return lo, hi


def bounded_weighted_sums_py(weights, lo, hi):
    w = np.asarray(weights, dtype=np.float64)
    with np.errstate(over="ignore", invalid="ignore"):
        raw_lo = w @ np.asarray(lo, dtype=np.float64)
        raw_hi = w @ np.asarray(hi, dtype=np.float64)
    terms = np.count_nonzero(w, axis=1)
    return _inflate(raw_lo, raw_hi, terms)


def bounded_weighted_sums(weights, lo, hi):
    """Rigorous float enclosures of ``weights @ v`` for every ``v`` in ``[lo, hi]``.

    ``weights`` is a nonnegative integer matrix, ``lo <= hi`` nonnegative term
    bounds.  Returns ``(lower, upper)`` arrays that bound the exact real dot
    products despite float rounding.
    """
    if not USE_NUMBA:
        return bounded_weighted_sums_py(weights, lo, hi)
    w = np.ascontiguousarray(weights, dtype=np.int64)
    n = w.shape[0]
    raw_lo = np.empty(n)
    raw_hi = np.empty(n)
    _bounded_sums_jit(w, np.ascontiguousarray(lo, dtype=np.float64),
                      np.ascontiguousarray(hi, dtype=np.float64), raw_lo, raw_hi)
    terms = np.count_nonzero(w, axis=1)
    return _inflate(raw_lo, raw_hi, terms)
