"""Brute-force ground truth.

Nothing here touches continued fractions.  Set memberships are read off a
finite grid of exact power comparisons, and m_t is minimised over every
factorization of ``p^a/q^b`` rather than over best-approximation vectors.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, List, Tuple

import numpy as np

from .approximations import Classification, LogRatio, _pair
from .errors import BoundExceededError, DomainError
from .infimum_sets import Factorization
from .measures import (
    CertifiedReal,
    Minimum,
    PrimePowerRational,
    measure_rows,
    minimize_rows,
)

__all__ = [
    "ORACLE_BOUND",
    "Factorization",
    "FactorizationEnumeration",
    "iter_factorizations",
    "enumerate_factorizations",
    "oracle_m_t",
    "oracle_minimum",
    "definitional_classify",
    "partition_count",
    "vector_partition_count",
]

ORACLE_BOUND = int(os.environ.get("METRICMAHLER_ORACLE_BOUND", "40"))

Pair = Tuple[int, int]


@dataclass(frozen=True)
class FactorizationEnumeration:
    alpha: PrimePowerRational
    factorizations: Tuple[Factorization, ...]

    def __len__(self):
        return len(self.factorizations)


def _check_bound(alpha, bound):
    bound = ORACLE_BOUND if bound is None else bound
    if alpha.a + alpha.b > bound:
        raise BoundExceededError(
            f"a + b = {alpha.a + alpha.b} exceeds the oracle bound {bound}; "
            "use the continued-fraction method instead"
        )


def _multisets(a: int, b: int, floor: Pair) -> Iterator[Tuple[Pair, ...]]:
    # parts are generated in nondecreasing lexicographic order, so every
    # multiset appears exactly once
    if a == 0 and b == 0:
        yield ()
        return
    i0, j0 = floor
    for i in range(i0, a + 1):
        for j in range(j0 if i == i0 else 0, b + 1):
            if i == 0 and j == 0:
                continue
            for rest in _multisets(a - i, b - j, (i, j)):
                yield ((i, j),) + rest


def iter_factorizations(alpha: PrimePowerRational, bound=None) -> Iterator[Tuple[Pair, ...]]:
    """Stream the parts tuples of every factorization of ``alpha``."""
    _check_bound(alpha, bound)
    yield from _multisets(alpha.a, alpha.b, (0, 0))


def enumerate_factorizations(alpha: PrimePowerRational, bound=None) -> FactorizationEnumeration:
    """All factorizations of ``p^a/q^b`` up to reordering of the parts.

    For two-prime rationals the coprimality and "no part equals 1" conditions
    hold automatically; both are asserted on every result.
    """
    p, q = alpha.p, alpha.q
    out = []
    for parts in iter_factorizations(alpha, bound):
        for x, y in parts:
            assert (x, y) != (0, 0)
            assert math.gcd(p ** x, q ** y) == 1
        out.append(Factorization(parts, alpha))
    return FactorizationEnumeration(alpha, tuple(out))


@lru_cache(maxsize=64)
def _oracle_rows(alpha: PrimePowerRational, bound):
    all_parts = list(iter_factorizations(alpha, bound))
    atoms, rows = measure_rows(alpha, all_parts)
    uniq, inverse = np.unique(rows, axis=0, return_inverse=True)
    inverse = np.asarray(inverse).reshape(-1)
    members: List[List[Tuple[Pair, ...]]] = [[] for _ in range(len(uniq))]
    for idx, parts in zip(inverse, all_parts):
        members[idx].append(parts)
    return atoms, uniq, members


def oracle_minimum(alpha: PrimePowerRational, t, bound=None) -> Minimum:
    """Certified minimum of the measure function over all factorizations."""
    _check_bound(alpha, bound)
    atoms, rows, members = _oracle_rows(alpha, ORACLE_BOUND if bound is None else bound)
    best = minimize_rows(atoms, rows, t)
    argmin = [Factorization(parts, alpha) for i in best.indices for parts in members[i]]
    return Minimum(best.value, best.indices, tuple(argmin), best.precision_bits, len(rows),
                   sum(len(m) for m in members))


def oracle_m_t(alpha: PrimePowerRational, t, bound=None) -> Tuple[CertifiedReal, List[Factorization]]:
    """m_t(alpha) over the full factorization set, with every minimising factorization."""
    best = oracle_minimum(alpha, t, bound)
    return best.value, list(best.argmin)


# ---------------------------------------------------------------------------
# definitional classification


class _Grid:
    """Exact membership grid ``U[m, n] = (m, n) in U(xi)`` with row/column extrema."""

    def __init__(self, xi: LogRatio, bound: int):
        v = xi.value
        self.bound = bound
        # boxes large enough to contain every extremum the definitions ask for
        self.m_max = int(math.ceil(max(bound, bound * v + 1))) + 2
        self.n_max = int(math.ceil(max(bound, bound / v + 1))) + 2
        U = np.zeros((self.m_max + 1, self.n_max + 1), dtype=bool)
        for m in range(self.m_max + 1):
            for n in range(self.n_max + 1):
                if m or n:
                    U[m, n] = xi.in_upper(m, n)
        self.U = U
        # per-row minimum of m/n over the upper set, per-column likewise, etc.
        self.row_min_U = [self._extreme(U[m, :], m, True, by_row=True) for m in range(self.m_max + 1)]
        self.row_max_L = [self._extreme(~U[m, :], m, False, by_row=True) for m in range(self.m_max + 1)]
        self.col_min_U = [self._extreme(U[:, n], n, True, by_row=False) for n in range(self.n_max + 1)]
        self.col_max_L = [self._extreme(~U[:, n], n, False, by_row=False) for n in range(self.n_max + 1)]

    @staticmethod
    def _ratio(m, n):
        return math.inf if n == 0 else Fraction(m, n)

    def _extreme(self, mask, fixed, want_min, by_row):
        best = None
        for other in np.nonzero(mask)[0]:
            m, n = (fixed, int(other)) if by_row else (int(other), fixed)
            if m == 0 and n == 0:
                continue
            r = self._ratio(m, n)
            if best is None or (r < best if want_min else r > best):
                best = r
        return best

    @staticmethod
    def _fold(values, want_min):
        vals = [v for v in values if v is not None]
        if not vals:
            return None
        return min(vals) if want_min else max(vals)


@lru_cache(maxsize=32)
def _grid(xi: LogRatio, bound: int) -> _Grid:
    return _Grid(xi, bound)


def definitional_classify(pair, xi: LogRatio, search_bound: int = 40) -> Classification:
    """Classification computed from the set definitions by exhaustive search.

    The upper/lower sets are tabulated on a box that provably contains every
    minimiser/maximiser needed for pairs with ``a, b <= search_bound``.
    Irreducibility is decided by searching all splits ``y + z``.
    """
    a, b = _pair(pair)
    if a > search_bound or b > search_bound:
        raise DomainError(f"{(a, b)} exceeds search_bound {search_bound}")
    g = _grid(xi, search_bound)
    U = g.U
    ratio = g._ratio(a, b)
    in_U = bool(U[a, b])
    in_L = not in_U
    u1 = in_U and ratio == g._fold(g.row_min_U[: a + 1], True)
    u2 = in_U and ratio == g._fold(g.col_min_U[: b + 1], True)
    l1 = in_L and ratio == g._fold(g.row_max_L[: a + 1], False)
    l2 = in_L and ratio == g._fold(g.col_max_L[1: b + 1], False)
    in_G = math.gcd(a, b) == 1
    same = U[: a + 1, : b + 1] if in_U else ~U[: a + 1, : b + 1]
    split = same & same[::-1, ::-1]
    split[0, 0] = split[a, b] = False
    return Classification(
        in_U=in_U,
        in_L=in_L,
        in_U1=u1,
        in_U2=u2,
        in_L1=l1,
        in_L2=l2,
        in_G=in_G,
        upper_best=in_G and u1,
        lower_best=in_G and l2,
        upper_boundary=in_U and not xi.in_upper(a, b + 1),
        lower_boundary=in_L and xi.in_upper(a + 1, b),
        irreducible=not bool(split.any()),
    )


# ---------------------------------------------------------------------------
# counting


@lru_cache(maxsize=None)
def partition_count(n: int) -> int:
    """Number of integer partitions of ``n``."""
    if n < 0:
        return 0
    table = [1] + [0] * n
    for part in range(1, n + 1):
        for k in range(part, n + 1):
            table[k] += table[k - part]
    return table[n]


def vector_partition_count(a: int, b: int) -> int:
    """Number of multisets of nonzero pairs in N0 x N0 summing to ``(a, b)``."""
    table = [[0] * (b + 1) for _ in range(a + 1)]
    table[0][0] = 1
    for i in range(a + 1):
        for j in range(b + 1):
            if i == 0 and j == 0:
                continue
            for x in range(i, a + 1):
                row, src = table[x], table[x - i]
                for y in range(j, b + 1):
                    row[y] += src[y - j]
    return table[a][b]
