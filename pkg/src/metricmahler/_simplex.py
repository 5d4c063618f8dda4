"""Phase-1 simplex over exact rationals, with Bland's rule."""

from __future__ import annotations

from fractions import Fraction
from typing import List, Sequence


def feasible(A: Sequence[Sequence[int]], b: Sequence[int]) -> bool:
    """Is there ``c >= 0`` with ``A c = b``?

    Artificial variables are added to every row (after flipping rows so that
    ``b >= 0``) and their sum is minimised; the system is feasible exactly
    when that minimum is zero.  Bland's smallest-index rule prevents cycling.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    rows: List[List[Fraction]] = []
    for i in range(m):
        sign = -1 if b[i] < 0 else 1
        row = [Fraction(sign * A[i][j]) for j in range(n)]
        row += [Fraction(1 if k == i else 0) for k in range(m)]
        row.append(Fraction(sign * b[i]))
        rows.append(row)
    width = n + m
    basis = list(range(n, n + m))
    # reduced costs of the phase-1 objective sum(artificials)
    cost = [Fraction(0)] * (width + 1)
    for row in rows:
        for j in range(n):
            cost[j] -= row[j]
        cost[width] -= row[width]

    while True:
        entering = next((j for j in range(width) if cost[j] < 0), None)
        if entering is None:
            break
        leave = None
        best = None
        for i, row in enumerate(rows):
            if row[entering] > 0:
                ratio = row[width] / row[entering]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:
            # cannot happen for a bounded phase-1 problem
            raise ArithmeticError("phase-1 problem reported unbounded")
        pivot = rows[leave][entering]
        rows[leave] = [v / pivot for v in rows[leave]]
        prow = rows[leave]
        for i, row in enumerate(rows):
            if i != leave and row[entering] != 0:
                f = row[entering]
                rows[i] = [v - f * w for v, w in zip(row, prow)]
        f = cost[entering]
        cost = [v - f * w for v, w in zip(cost, prow)]
        basis[leave] = entering
    # cost[width] holds minus the objective value
    return cost[width] == 0


def in_convex_hull(point: Sequence[int], others: Sequence[Sequence[int]]) -> bool:
    """Is ``point`` a convex combination of ``others``?"""
    if not others:
        return False
    dim = len(point)
    A = [[y[k] for y in others] for k in range(dim)]
    A.append([1] * len(others))
    return feasible(A, list(point) + [1])
