"""Factorization vectors, hull pruning and the piecewise structure of t -> m_t.

For ``alpha = p^a/q^b`` with ``(a, b)`` a best approximation of
``log q / log p``, the optimal factorizations can be searched among
multisets of best approximations bounded by ``(a, b)``.  Those multisets are
the nonnegative integer solutions ``x`` of ``T x = (a, b)`` where ``T`` has the
best approximations as columns.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import _kernels
from ._simplex import in_convex_hull
from .approximations import Classification, best_approximations, classify
from .errors import AuditFailure, DomainError, HypothesisError, UncertainError
from .measures import (
    MeasureAtom,
    MeasureFunction,
    Minimum,
    PrimePowerRational,
    minimize_rows,
    parse_t,
)

__all__ = [
    "CharTransform",
    "FactorizationVector",
    "Factorization",
    "Breakpoint",
    "Segment",
    "MtProfile",
    "AuditReport",
    "characteristic_transformation",
    "enumerate_vectors",
    "vector_to_factorization",
    "factorization_to_vector",
    "measure_function",
    "vector_minimum",
    "hull_vertices",
    "lex_limit_key",
    "mt_profile",
    "empirical_minimal_set",
    "theorem_main_audit",
]

Pair = Tuple[int, int]


@dataclass(frozen=True)
class Factorization:
    """A multiset of exponent pairs ``(x, y)`` standing for parts ``p^x / q^y``.

    Parts are kept in nondecreasing order, so equal multisets compare equal.
    """

    parts: Tuple[Pair, ...]
    alpha: PrimePowerRational

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(sorted(tuple(p) for p in self.parts)))
        a = sum(x for x, _ in self.parts)
        b = sum(y for _, y in self.parts)
        if (a, b) != (self.alpha.a, self.alpha.b):
            raise DomainError(f"parts sum to {(a, b)}, not {(self.alpha.a, self.alpha.b)}")
        if any(part == (0, 0) for part in self.parts):
            raise DomainError("a factorization part equal to 1 is not allowed")

    def as_fractions(self) -> List[Fraction]:
        p, q = self.alpha.p, self.alpha.q
        return [Fraction(p ** x, q ** y) for x, y in self.parts]

    def measure_function(self) -> MeasureFunction:
        return MeasureFunction.of_parts(self.alpha.p, self.alpha.q, self.parts, self)

    def __len__(self):
        return len(self.parts)


@dataclass(frozen=True)
class CharTransform:
    """Best approximations bounded by ``(a, b)``, as the columns of a 2 x N matrix.

    ``alpha`` is the rational as given; ``oriented`` is the same rational or
    its reciprocal with ``q > p``.  Columns are in the oriented coordinates.
    """

    pairs: Tuple[Pair, ...]
    alpha: PrimePowerRational
    oriented: PrimePowerRational

    @property
    def inverted(self) -> bool:
        return self.oriented != self.alpha

    @property
    def size(self) -> int:
        return len(self.pairs)

    def matrix(self) -> np.ndarray:
        return np.array(self.pairs, dtype=np.int64).T.reshape(2, -1)

    def atoms(self) -> Tuple[MeasureAtom, ...]:
        o = self.oriented
        return tuple(MeasureAtom.of_part(o.p, o.q, x, y) for x, y in self.pairs)


@dataclass(frozen=True)
class FactorizationVector:
    entries: Tuple[int, ...]
    transform: CharTransform = field(compare=False, repr=False)

    def __post_init__(self):
        T = self.transform
        if len(self.entries) != T.size:
            raise DomainError("vector length does not match the transform")
        if any(x < 0 for x in self.entries):
            raise DomainError("factorization vectors have nonnegative entries")
        a = sum(x * c[0] for x, c in zip(self.entries, T.pairs))
        b = sum(x * c[1] for x, c in zip(self.entries, T.pairs))
        if (a, b) != T.oriented.pair:
            raise DomainError(f"T x = {(a, b)}, expected {T.oriented.pair}")

    def measure_function(self) -> MeasureFunction:
        return measure_function(self)

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)


def characteristic_transformation(alpha: PrimePowerRational) -> CharTransform:
    """The best approximations with ``a_n <= a`` and ``b_n <= b``, ordered by ``b`` then ``a``.

    Raises :class:`HypothesisError` unless ``(a, b)`` is itself an upper or
    lower best approximation (orientation is normalised to ``q > p`` first).
    """
    oriented = alpha.normalized()
    xi = oriented.xi
    c = classify(oriented.pair, xi)
    if not c.best:
        raise HypothesisError(
            f"{oriented.pair} is neither an upper nor a lower best approximation of "
            f"log {oriented.q}/log {oriented.p}; the best-approximation search space "
            "is only valid for such exponents (use the oracle method)"
        )
    pairs = best_approximations(xi, oriented.a, oriented.b)
    if not pairs or pairs[-1] != oriented.pair:
        raise AssertionError(f"best approximations {pairs} do not end at {oriented.pair}")
    return CharTransform(tuple(pairs), alpha, oriented)


@lru_cache(maxsize=64)
def _vectors(T: CharTransform) -> np.ndarray:
    sols = _kernels.nonnegative_solutions(T.pairs, T.oriented.pair)
    M = T.matrix()
    if sols.size:
        assert np.all(sols @ M.T == np.array(T.oriented.pair)), "enumeration produced a non-solution"
    return sols


def enumerate_vectors(T: CharTransform) -> Tuple[FactorizationVector, ...]:
    """Every nonnegative integer solution of ``T x = (a, b)``, in lexicographic order."""
    return tuple(FactorizationVector(tuple(int(v) for v in row), T) for row in _vectors(T))


def vector_to_factorization(x: FactorizationVector) -> Factorization:
    """``x_n`` copies of the n-th column, in the coordinates of the given rational."""
    T = x.transform
    parts = []
    for count, (u, v) in zip(x.entries, T.pairs):
        parts.extend([(v, u) if T.inverted else (u, v)] * count)
    return Factorization(tuple(parts), T.alpha)


def factorization_to_vector(f: Factorization, T: CharTransform) -> FactorizationVector:
    index = {pair: n for n, pair in enumerate(T.pairs)}
    entries = [0] * T.size
    for x, y in f.parts:
        key = (y, x) if T.inverted else (x, y)
        if key not in index:
            raise DomainError(f"part {(x, y)} is not a column of the transform")
        entries[index[key]] += 1
    return FactorizationVector(tuple(entries), T)


def measure_function(x: FactorizationVector) -> MeasureFunction:
    atoms = x.transform.atoms()
    return MeasureFunction(tuple((w, at) for w, at in zip(x.entries, atoms) if w), x)


@lru_cache(maxsize=64)
def _atom_rows(T: CharTransform):
    """Sorted distinct atoms, deduplicated rows, and the vectors behind each row."""
    col_atoms = T.atoms()
    atoms = tuple(sorted(set(col_atoms)))
    index = [atoms.index(a) for a in col_atoms]
    fold = np.zeros((T.size, len(atoms)), dtype=np.int64)
    for n, j in enumerate(index):
        fold[n, j] = 1
    vecs = _vectors(T)
    rows = vecs @ fold
    uniq, inverse = np.unique(rows, axis=0, return_inverse=True)
    inverse = np.asarray(inverse).reshape(-1)
    members: List[List[int]] = [[] for _ in range(len(uniq))]
    for v, r in enumerate(inverse):
        members[r].append(v)
    return atoms, uniq, tuple(tuple(m) for m in members)


def vector_minimum(T: CharTransform, t) -> Minimum:
    """Certified minimum of ``f_x(t)`` over all factorization vectors."""
    atoms, rows, members = _atom_rows(T)
    best = minimize_rows(atoms, rows, t)
    vectors = enumerate_vectors(T)
    argmin = tuple(vectors[v] for r in best.indices for v in members[r])
    return Minimum(best.value, best.indices, argmin, best.precision_bits, len(rows), len(vectors))


# ---------------------------------------------------------------------------
# convex hull


def hull_vertices(S: Sequence[FactorizationVector]) -> Tuple[FactorizationVector, ...]:
    """Members of ``S`` that are vertices of its convex hull (exact rational LP)."""
    S = list(dict.fromkeys(S))
    if not S:
        raise DomainError("hull_vertices needs a nonempty set")
    pts = [tuple(x) for x in S]
    kept = []
    for i, x in enumerate(pts):
        others = [y for j, y in enumerate(pts) if j != i]
        if not in_convex_hull(x, others):
            kept.append(S[i])
    return tuple(kept)


# ---------------------------------------------------------------------------
# profile of t -> m_t


def lex_limit_key(atoms: Sequence[MeasureAtom], row) -> Tuple[MeasureAtom, ...]:
    """Atom multiset, largest first.

    As ``t`` grows, ``f`` orders like these tuples compared lexicographically,
    with a proper prefix counting as smaller.
    """
    out = []
    for j, w in enumerate(row):
        out.extend([atoms[j]] * int(w))
    return tuple(sorted(out, reverse=True))


@dataclass(frozen=True)
class Breakpoint:
    """A change of the active minimiser located inside ``[lower, upper]``."""

    lower: Fraction
    upper: Fraction
    kind: str  # "exceptional", "standard" or "uncertain"
    before: Tuple[int, ...]
    after: Tuple[int, ...]

    @property
    def t(self) -> Fraction:
        return (self.lower + self.upper) / 2

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower


@dataclass(frozen=True)
class Segment:
    start: Fraction
    end: Fraction
    active: Tuple[int, ...]


@dataclass(frozen=True)
class MtProfile:
    """Piecewise description of ``t -> m_t(alpha)`` on ``[1, t_end]``.

    ``active`` sets index ``functions``, the distinct measure functions (one
    per atom multiset); ``representatives[i]`` is a vector realising
    ``functions[i]``.
    """

    transform: CharTransform
    atoms: Tuple[MeasureAtom, ...]
    functions: Tuple[Tuple[int, ...], ...]
    representatives: Tuple[FactorizationVector, ...]
    breakpoints: Tuple[Breakpoint, ...]
    segments: Tuple[Segment, ...]
    exceptional_count: int
    uncertain_count: int
    t_end: Fraction
    stabilized: bool
    limit_minimizer: int

    @property
    def exceptional_points(self) -> Tuple[Breakpoint, ...]:
        return tuple(b for b in self.breakpoints if b.kind == "exceptional")


_REFINE_WIDTH = Fraction(1, 10 ** 9)


class _Scanner:
    def __init__(self, atoms, rows):
        self.atoms = atoms
        self.rows = rows
        self.cache: Dict[Fraction, Optional[Tuple[int, ...]]] = {}

    def winner(self, t: Fraction):
        if t not in self.cache:
            try:
                self.cache[t] = minimize_rows(self.atoms, self.rows, t).indices
            except UncertainError:
                self.cache[t] = None
        return self.cache[t]

    def locate(self, lo, w_lo, hi, w_hi, out):
        """Bisect ``[lo, hi]`` until every change of winner is pinned to the target width."""
        if hi - lo <= _REFINE_WIDTH:
            out.append((lo, hi, w_lo, w_hi))
            return
        mid = (lo + hi) / 2
        w_mid = self.winner(mid)
        if w_mid is None:
            out.append((lo, hi, w_lo, None))
            return
        if w_mid != w_lo:
            self.locate(lo, w_lo, mid, w_mid, out)
        if w_mid != w_hi:
            self.locate(mid, w_mid, hi, w_hi, out)


def _grid_points(start: Fraction, end: Fraction, count: int) -> List[Fraction]:
    """``count`` log-spaced exact rationals from ``start`` to ``end`` inclusive."""
    ls, le = math.log(start), math.log(end)
    pts = [start]
    for k in range(1, count - 1):
        pts.append(Fraction(math.exp(ls + (le - ls) * k / (count - 1))))
    pts.append(end)
    return sorted(set(pts))


def _kind(before, after) -> str:
    if before is None or after is None:
        return "uncertain"
    return "standard" if set(before) & set(after) else "exceptional"


def mt_profile(alpha: PrimePowerRational, t_max=16, grid: int = 512,
               max_doublings: int = 4) -> MtProfile:
    """Scan ``[1, t_max]`` for changes of the minimising measure function.

    Each change seen between neighbouring grid points is bisected, with a full
    certified minimisation at every midpoint, down to width ``1e-9``.  A
    change is exceptional when the two sides share no minimiser.  The point
    ``t = 1`` is always recorded; it counts as exceptional only if the
    minimisers just below and just above it are disjoint.  The scan is
    extended by doubling ``t_max`` until the last minimiser is the large-t
    limit one (at most ``max_doublings`` times).
    """
    t_max = parse_t(t_max)
    if t_max <= 1:
        raise DomainError("t_max must exceed 1")
    if grid < 64:
        raise DomainError("grid must be at least 64")
    T = characteristic_transformation(alpha)
    atoms, rows, members = _atom_rows(T)
    vectors = enumerate_vectors(T)
    scan = _Scanner(atoms, rows)

    keys = [lex_limit_key(atoms, r) for r in rows]
    limit = min(range(len(rows)), key=lambda i: keys[i])

    delta = Fraction(1, 10 ** 9)
    below, above = scan.winner(1 - delta), scan.winner(1 + delta)
    breakpoints = [Breakpoint(Fraction(1), Fraction(1), _kind(below, above), below or (), above or ())]

    changes = []
    start, end = Fraction(1), t_max
    points = _grid_points(start, end, grid)
    doublings = 0
    while True:
        winners = [scan.winner(t) for t in points]
        for k in range(len(points) - 1):
            w0, w1 = winners[k], winners[k + 1]
            if w0 is None or w1 is None:
                changes.append((points[k], points[k + 1], w0, w1))
            elif w0 != w1:
                scan.locate(points[k], w0, points[k + 1], w1, changes)
        last = winners[-1]
        if (last is not None and last == (limit,)) or doublings >= max_doublings:
            break
        doublings += 1
        start, end = end, end * 2
        points = _grid_points(start, end, max(grid // 4, 16))

    for lo, hi, w0, w1 in changes:
        breakpoints.append(Breakpoint(lo, hi, _kind(w0, w1), w0 or (), w1 or ()))
    breakpoints.sort(key=lambda b: (b.lower, b.upper))

    segments = []
    seg_start = Fraction(1)
    current = above
    for bp in breakpoints[1:]:
        segments.append(Segment(seg_start, bp.lower, current or ()))
        seg_start, current = bp.upper, (bp.after or None)
    segments.append(Segment(seg_start, end, current or ()))

    reps = tuple(vectors[m[0]] for m in members)
    final = scan.winner(end)
    return MtProfile(
        transform=T,
        atoms=atoms,
        functions=tuple(tuple(int(v) for v in r) for r in rows),
        representatives=reps,
        breakpoints=tuple(breakpoints),
        segments=tuple(segments),
        exceptional_count=sum(1 for b in breakpoints if b.kind == "exceptional"),
        uncertain_count=sum(1 for b in breakpoints if b.kind == "uncertain"),
        t_end=end,
        stabilized=final == (limit,),
        limit_minimizer=limit,
    )


def empirical_minimal_set(alpha: PrimePowerRational, t_max=16, grid: int = 512,
                          profile: Optional[MtProfile] = None) -> Tuple[FactorizationVector, ...]:
    """One vector per measure function that is the sole minimiser on some segment.

    The large-t limit minimiser is always included, and so is the trivial
    factorization, which is the sole minimiser for ``t <= 1``.  This is an
    empirical candidate for a minimal infimum set: its size is a lower bound
    for the minimality index, not a proof of minimality.
    """
    if profile is None:
        profile = mt_profile(alpha, t_max, grid)
    chosen = []
    trivial = tuple([0] * (profile.transform.size - 1) + [1])
    for i, rep in enumerate(profile.representatives):
        if rep.entries == trivial:
            chosen.append(i)
    for seg in profile.segments:
        if len(seg.active) == 1 and seg.end > seg.start:
            chosen.append(seg.active[0])
    chosen.append(profile.limit_minimizer)
    ordered = list(dict.fromkeys(chosen))
    return tuple(profile.representatives[i] for i in ordered)


# ---------------------------------------------------------------------------
# audit


@dataclass(frozen=True)
class AuditReport:
    alpha: PrimePowerRational
    t: Fraction
    value: object
    pair_classification: Classification
    parts: Tuple[Tuple[Pair, Classification], ...]
    factorizations: Tuple[Factorization, ...]
    violations: Tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def theorem_main_audit(alpha: PrimePowerRational, t, bound=None, raise_on_failure: bool = True) -> AuditReport:
    """Check the structure of every optimal factorization found by brute force.

    For ``t > 1`` every part of an optimal factorization must be irreducible;
    when ``(a, b)`` is a boundary point every part must be one too; when
    ``(a, b)`` is a best approximation every part must be one too.
    """
    from .oracle import oracle_minimum

    t = parse_t(t)
    if t <= 1:
        raise DomainError("the audit needs t > 1")
    oriented = alpha.normalized()
    xi = oriented.xi
    swap = oriented != alpha
    best = oracle_minimum(alpha, t, bound)
    whole = classify(oriented.pair, xi)
    seen: Dict[Pair, Classification] = {}
    violations = []
    for f in best.argmin:
        for part in f.parts:
            if part in seen:
                continue
            key = (part[1], part[0]) if swap else part
            c = seen[part] = classify(key, xi)
            if not c.irreducible:
                violations.append(f"part {part} of {f.parts} is reducible")
            if whole.boundary and not c.boundary:
                violations.append(f"part {part} is not a boundary point although {alpha.pair} is")
            if whole.best and not c.best:
                violations.append(f"part {part} is not a best approximation although {alpha.pair} is")
    report = AuditReport(alpha, t, best.value, whole, tuple(sorted(seen.items())),
                         tuple(best.argmin), tuple(violations))
    if violations and raise_on_failure:
        raise AuditFailure("; ".join(violations), report)
    return report
