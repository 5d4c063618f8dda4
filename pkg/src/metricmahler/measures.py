"""Mahler measures of rationals, measure functions and certified minimisation.

A part ``p^x / q^y`` of a factorization has Mahler measure
``max(x log p, y log q)``, which is always ``e * log(base)`` for a single prime
base.  Such a value is a :class:`MeasureAtom`.  A measure function is a
weighted multiset of atoms, and its value at ``t`` is the l^t norm
``(sum w_j L_j^t)^(1/t)``.

Minimising over many measure functions at a fixed ``t`` runs in two stages:

1. a float screen.  Every atom power ``(L_j/s)^t`` is enclosed at 128 bits
   and rounded outward to doubles; the kernel then yields rigorous bounds on
   every row sum, which discards rows that are certainly not minimal;
2. the surviving rows are compared with ``mpmath.iv`` enclosures at 128,
   256, ... bits up to the precision cap.

Rows whose power sums are identical as real numbers cannot be separated by
any precision.  They are detected exactly: for ``t = m/n`` each ``e^t`` is
written as ``k * r^(1/n)`` with ``r`` free of n-th powers, and two rows tie
exactly when their coefficients on every ``(base, r)`` agree.  (Radicals with
distinct n-th-power-free radicands are linearly independent over Q, and
``(log q / log p)^t`` is transcendental for rational ``t``.)
"""

from __future__ import annotations

import functools
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Tuple

import numpy as np
from mpmath import iv

from . import _kernels
from .approximations import LogRatio
from .core_numbers import (
    DEFAULT_PRECISION,
    CertifiedReal,
    Ordering,
    compare_power,
    interval_endpoints,
    interval_precision,
    is_prime,
    log_enclosure,
    precision_ladder,
)
from .errors import DomainError, UncertainError

__all__ = [
    "PrimePowerRational",
    "MeasureAtom",
    "MeasureFunction",
    "Minimum",
    "RowMinimum",
    "parse_t",
    "parse_alpha",
    "mahler_measure",
    "eval_measure_function",
    "measure_rows",
    "minimize_rows",
    "row_power_sums",
    "series_values",
    "minimize",
    "m_t",
    "CF_METHOD",
    "ORACLE_METHOD",
]

CF_METHOD = "cf"
ORACLE_METHOD = "oracle"
_METHOD_ALIASES = {"cf": CF_METHOD, "cf_infimum_set": CF_METHOD, "oracle": ORACLE_METHOD}


# ---------------------------------------------------------------------------
# inputs


def parse_t(t) -> Fraction:
    """Exact positive rational from an int, Fraction, decimal string or float.

    Floats are taken at their exact binary value.
    """
    if isinstance(t, Fraction):
        value = t
    elif isinstance(t, (int, float)) and not isinstance(t, bool):
        value = Fraction(t)
    elif isinstance(t, str):
        try:
            value = Fraction(t.strip())
        except (ValueError, ZeroDivisionError):
            raise DomainError(f"cannot parse t = {t!r} as a decimal or fraction") from None
    else:
        raise DomainError(f"unsupported type for t: {type(t).__name__}")
    if value <= 0:
        raise DomainError(f"t must be positive, got {value}")
    return value


@dataclass(frozen=True)
class PrimePowerRational:
    """``alpha = p^a / q^b`` with distinct primes ``p`` and ``q``."""

    p: int
    q: int
    a: int
    b: int

    def __post_init__(self):
        if self.p == self.q:
            raise DomainError("p and q must be distinct")
        for r in (self.p, self.q):
            if not is_prime(r):
                raise DomainError(f"{r} is not prime")
        if self.a < 0 or self.b < 0 or (self.a == 0 and self.b == 0):
            raise DomainError("(a, b) must be a nonzero pair of nonnegative integers")

    @property
    def value(self) -> Fraction:
        return Fraction(self.p ** self.a, self.q ** self.b)

    @property
    def xi(self) -> LogRatio:
        return LogRatio(self.p, self.q)

    @property
    def pair(self) -> Tuple[int, int]:
        return self.a, self.b

    def normalized(self) -> "PrimePowerRational":
        """The same rational or its reciprocal, whichever has ``q > p``.

        Every measure of a rational equals that of its reciprocal, with the
        roles of numerator and denominator exchanged part by part.
        """
        if self.q > self.p:
            return self
        return PrimePowerRational(self.q, self.p, self.b, self.a)

    def __str__(self):
        return f"{self.p}^{self.a}/{self.q}^{self.b}"


_ALPHA_RE = re.compile(r"^\s*(\d+)\s*\^\s*(\d+)\s*/\s*(\d+)\s*\^\s*(\d+)\s*$")
_PLAIN_RE = re.compile(r"^\s*(\d+)\s*/\s*(\d+)\s*$")


def _prime_power(n: int):
    if n < 2:
        return None
    for base in range(2, math.isqrt(n) + 1):
        if n % base == 0:
            e = 0
            while n % base == 0:
                n //= base
                e += 1
            return (base, e) if n == 1 else None
    return n, 1


def parse_alpha(text: str) -> PrimePowerRational:
    """Parse ``P^a/Q^b`` or a plain fraction such as ``32/27``."""
    m = _ALPHA_RE.match(text)
    if m:
        p, a, q, b = (int(g) for g in m.groups())
        return PrimePowerRational(p, q, a, b)
    m = _PLAIN_RE.match(text)
    if not m:
        raise DomainError(f"cannot parse alpha {text!r}; expected P^a/Q^b or r/s")
    r, s = int(m.group(1)), int(m.group(2))
    if r == 0 or s == 0:
        raise DomainError("alpha must be a nonzero rational")
    g = math.gcd(r, s)
    r, s = r // g, s // g
    num, den = _prime_power(r), _prime_power(s)
    if num is None or den is None:
        raise DomainError(f"{r}/{s} is not of the form p^a/q^b with p, q distinct primes "
                          "(use P^a/Q^0 syntax for a prime power)")
    return PrimePowerRational(num[0], den[0], num[1], den[1])


# ---------------------------------------------------------------------------
# measures


@functools.total_ordering
@dataclass(frozen=True)
class MeasureAtom:
    """The real number ``exponent * log(base)``, kept symbolically."""

    base: int
    exponent: int

    def __post_init__(self):
        if self.base < 2 or self.exponent < 1:
            raise DomainError(f"atom {self.exponent} log {self.base} is not positive")

    @classmethod
    def of_part(cls, p: int, q: int, x: int, y: int) -> "MeasureAtom":
        """Mahler measure of ``p^x / q^y``."""
        if x == 0 and y == 0:
            raise DomainError("the part 1 has measure zero and is not allowed")
        if y == 0 or (x > 0 and compare_power(p, x, q, y) is Ordering.GREATER):
            return cls(p, x)
        return cls(q, y)

    @property
    def approx(self) -> float:
        return self.exponent * math.log(self.base)

    def enclosure(self, bits: int = DEFAULT_PRECISION) -> CertifiedReal:
        return log_enclosure(self.base, bits).scale(self.exponent)

    def compare(self, other: "MeasureAtom") -> Ordering:
        return compare_power(self.base, self.exponent, other.base, other.exponent)

    def __lt__(self, other):
        return self.compare(other) is Ordering.LESS

    def __str__(self):
        return f"{self.exponent}*log({self.base})" if self.exponent != 1 else f"log({self.base})"


@dataclass(frozen=True)
class MeasureFunction:
    """``t -> (sum w_j L_j^t)^(1/t)`` for weighted atoms ``(w_j, L_j)``."""

    terms: Tuple[Tuple[int, MeasureAtom], ...]
    source: object = field(default=None, compare=False)

    def __post_init__(self):
        if any(w < 0 for w, _ in self.terms):
            raise DomainError("weights must be nonnegative")
        if not any(w > 0 for w, _ in self.terms):
            raise DomainError("a measure function needs at least one positive weight")

    @classmethod
    def of_parts(cls, p: int, q: int, parts: Iterable[Tuple[int, int]], source=None):
        counts = {}
        for x, y in parts:
            atom = MeasureAtom.of_part(p, q, x, y)
            counts[atom] = counts.get(atom, 0) + 1
        return cls(tuple(sorted(((w, at) for at, w in counts.items()), key=lambda wa: wa[1])), source)

    def multiset(self) -> Tuple[MeasureAtom, ...]:
        """Atoms with multiplicity, largest first."""
        out = []
        for w, atom in self.terms:
            out.extend([atom] * w)
        return tuple(sorted(out, reverse=True))


def mahler_measure(r: int, s: int, bits: int = DEFAULT_PRECISION) -> CertifiedReal:
    """``log max(r, s)`` for coprime positive integers."""
    if r <= 0 or s <= 0:
        raise DomainError("r and s must be positive (alpha is a nonzero rational)")
    if math.gcd(r, s) != 1:
        raise DomainError(f"{r}/{s} is not in lowest terms")
    top = max(r, s)
    if top == 1:
        return CertifiedReal.exact(0, bits)
    return log_enclosure(top, bits)


def _iv(x: Fraction):
    return iv.mpf(x.numerator) / x.denominator


def _iv_power(x, t: Fraction, t_iv):
    if t == 1:
        return x
    if t.denominator == 1:
        return x ** t.numerator
    return iv.exp(iv.log(x) * t_iv)


def _iv_root(s, t: Fraction, t_iv):
    if t == 1:
        return s
    return iv.exp(iv.log(s) / t_iv)


def _power_sum_iv(terms, t: Fraction, bits: int):
    t_iv = _iv(t)
    total = iv.mpf(0)
    for w, atom in terms:
        if w:
            total += w * _iv_power(atom.enclosure(bits).to_interval(), t, t_iv)
    return total, t_iv


def eval_measure_function(f: MeasureFunction, t, bits: int = DEFAULT_PRECISION) -> CertifiedReal:
    """Certified enclosure of ``(sum w_j L_j^t)^(1/t)``."""
    t = parse_t(t)
    with interval_precision(bits + 16):
        total, t_iv = _power_sum_iv(f.terms, t, bits + 16)
        return CertifiedReal.from_interval(_iv_root(total, t, t_iv), bits)


# ---------------------------------------------------------------------------
# rows of atom counts


def measure_rows(alpha: PrimePowerRational, factorizations) -> Tuple[Tuple[MeasureAtom, ...], np.ndarray]:
    """Atoms in increasing order and one row of atom counts per factorization."""
    p, q = alpha.p, alpha.q
    part_atom = {}
    per_row = []
    for parts in factorizations:
        row = []
        for part in parts:
            atom = part_atom.get(part)
            if atom is None:
                atom = part_atom[part] = MeasureAtom.of_part(p, q, *part)
            row.append(atom)
        per_row.append(row)
    atoms = tuple(sorted(set(part_atom.values())))
    index = {atom: j for j, atom in enumerate(atoms)}
    rows = np.zeros((len(per_row), len(atoms)), dtype=np.int64)
    for i, row in enumerate(per_row):
        for atom in row:
            rows[i, index[atom]] += 1
    return atoms, rows


_TRIAL_LIMIT = 1 << 16


def _factor_small(n: int):
    """Trial division up to a fixed limit; a leftover cofactor is kept whole.

    Exponents along deep convergents are far too large to factor fully.  An
    unsplit composite cofactor only makes tie keys finer than necessary, so a
    genuine tie may be missed (and then reported as uncertain), never invented.
    """
    out = []
    d = 2
    while d * d <= n and d < _TRIAL_LIMIT:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1
    if n > 1:
        out.append((n, 1))
    return out


@functools.lru_cache(maxsize=1 << 14)
def _radical(e: int, m: int, n: int):
    """``e^(m/n) = k * r^(1/n)``; returns ``k`` and ``r`` as ((prime, power), ...)."""
    if n == 1:
        return e ** m, ()
    k = 1
    rad = []
    for prime, order in _factor_small(e):
        total = order * m
        k *= prime ** (total // n)
        if total % n:
            rad.append((prime, total % n))
    return k, tuple(rad)


def _tie_key(atoms, row, t: Fraction):
    acc = {}
    for j in np.nonzero(row)[0]:
        atom = atoms[j]
        k, rad = _radical(atom.exponent, t.numerator, t.denominator)
        key = (atom.base, rad)
        acc[key] = acc.get(key, 0) + int(row[j]) * k
    return frozenset(acc.items())


def _round_down(x) -> float:
    f = float(x)
    if math.isinf(f):
        return _kernels._HUGE if f > 0 else -math.inf
    return f if Fraction(f) <= x else math.nextafter(f, -math.inf)


def _round_up(x) -> float:
    f = float(x)
    if math.isinf(f):
        return f
    return f if Fraction(f) >= x else math.nextafter(f, math.inf)


def _scaled_term_bounds(atoms, t: Fraction, scale: float):
    lo = np.empty(len(atoms))
    hi = np.empty(len(atoms))
    s = Fraction(scale)
    with interval_precision(DEFAULT_PRECISION):
        t_iv = _iv(t)
        s_iv = _iv(s)
        for j, atom in enumerate(atoms):
            x = _iv_power(atom.enclosure(DEFAULT_PRECISION).to_interval() / s_iv, t, t_iv)
            a, b = interval_endpoints(x)
            lo[j] = max(_round_down(a), 0.0)
            hi[j] = _round_up(b)
    return lo, hi


def row_power_sums(atoms, rows, t):
    """Rigorous float bounds on ``sum_j rows[i, j] (L_j / s)^t`` and the scale ``s``."""
    t = parse_t(t)
    rows = np.asarray(rows, dtype=np.int64)
    approx = np.array([a.approx for a in atoms])
    present = np.where(rows > 0, approx[None, :], 0.0).max(axis=1)
    scale = float(present.min())
    lo, hi = _scaled_term_bounds(atoms, t, scale)
    s_lo, s_hi = _kernels.bounded_weighted_sums(rows, lo, hi)
    return s_lo, s_hi, scale


def series_values(atoms, rows, t):
    """Value bounds ``(lo, hi)`` of every row's measure function at ``t``.

    Built on the rigorous power-sum bounds; the final root and rescale are
    done in floating point and widened by 16 ulps.
    """
    t = parse_t(t)
    s_lo, s_hi, scale = row_power_sums(atoms, rows, t)
    inv = 1.0 / float(t)
    with np.errstate(over="ignore", divide="ignore"):
        lo = scale * np.power(s_lo, inv) * (1 - 16 * 2.0 ** -53)
        hi = scale * np.power(s_hi, inv) * (1 + 16 * 2.0 ** -53)
    return lo, hi


@dataclass(frozen=True)
class RowMinimum:
    value: CertifiedReal
    indices: Tuple[int, ...]
    precision_bits: int


@dataclass(frozen=True)
class Minimum:
    """Minimum of a candidate family at one ``t``.

    ``indices`` point into the deduplicated candidate rows; ``argmin`` holds
    the corresponding objects (vectors or factorizations).
    """

    value: CertifiedReal
    indices: Tuple[int, ...]
    argmin: tuple
    precision_bits: int
    candidate_count: int
    raw_count: int


def _group_ties(atoms, rows, idx, t):
    groups = {}
    for i in idx:
        groups.setdefault(_tie_key(atoms, rows[i], t), []).append(int(i))
    return list(groups.values())


def _refine(atoms, rows, groups, t, cap):
    bits = DEFAULT_PRECISION
    for bits in precision_ladder(DEFAULT_PRECISION, cap):
        with interval_precision(bits + 16):
            sums = []
            for g in groups:
                terms = [(int(w), atoms[j]) for j, w in enumerate(rows[g[0]]) if w]
                sums.append(_power_sum_iv(terms, t, bits + 16)[0])
            best_hi = min(s.b for s in sums)
            groups = [g for g, s in zip(groups, sums) if s.a <= best_hi]
        if len(groups) == 1:
            return groups[0], bits
    raise UncertainError(
        f"{len(groups)} candidates cannot be ordered at t = {t} within {bits} bits",
        [tuple(int(v) for v in rows[g[0]]) for g in groups],
    )


def minimize_rows(atoms, rows, t, cap: Optional[int] = None) -> RowMinimum:
    """Certified minimum over the measure functions given as atom-count rows.

    ``indices`` lists every row attaining the minimum; rows tie only when
    their power sums are equal as real numbers.
    """
    t = parse_t(t)
    rows = np.asarray(rows, dtype=np.int64)
    if rows.ndim != 2 or rows.shape[0] == 0:
        raise DomainError("no candidates to minimise over")
    if np.any(rows.sum(axis=1) == 0):
        raise DomainError("empty measure function among the candidates")
    uniq, inverse = np.unique(rows, axis=0, return_inverse=True)
    inverse = np.asarray(inverse).reshape(-1)
    s_lo, s_hi, _ = row_power_sums(atoms, uniq, t)
    contenders = np.nonzero(s_lo <= s_hi.min())[0]
    groups = _group_ties(atoms, uniq, contenders, t)
    bits = 53
    if len(groups) == 1:
        winner = groups[0]
    else:
        winner, bits = _refine(atoms, uniq, groups, t, cap)
    value_bits = max(bits, DEFAULT_PRECISION)
    terms = [(int(w), atoms[j]) for j, w in enumerate(uniq[winner[0]]) if w]
    value = eval_measure_function(MeasureFunction(tuple(terms)), t, value_bits)
    indices = tuple(int(i) for i in np.nonzero(np.isin(inverse, winner))[0])
    return RowMinimum(value, indices, value_bits)


# ---------------------------------------------------------------------------
# m_t


def _method(method: str) -> str:
    try:
        return _METHOD_ALIASES[method]
    except KeyError:
        raise DomainError(f"unknown method {method!r}; use 'cf' or 'oracle'") from None


def minimize(alpha: PrimePowerRational, t, method: str = CF_METHOD, bound=None) -> Minimum:
    """``m_t(alpha)`` with its minimisers.

    ``cf`` minimises over the factorization vectors built from best
    approximations and needs ``(a, b)`` to be an upper or lower best
    approximation of ``log q / log p`` (after orienting so that ``q > p``).
    ``oracle`` minimises over every factorization and needs ``a + b`` within
    the oracle bound.  Minimisers are reported for the rational as given.
    """
    t = parse_t(t)
    method = _method(method)
    if method == ORACLE_METHOD:
        from .oracle import oracle_minimum

        return oracle_minimum(alpha, t, bound)
    from .infimum_sets import characteristic_transformation, vector_minimum

    return vector_minimum(characteristic_transformation(alpha), t)


def m_t(alpha: PrimePowerRational, t, method: str = CF_METHOD, bound=None) -> CertifiedReal:
    """The t-metric Mahler measure of ``alpha`` as a certified enclosure.

    For ``t <= 1`` this is the Mahler measure of ``alpha`` itself; the
    requested method's preconditions are still checked.
    """
    t = parse_t(t)
    method = _method(method)
    if t <= 1:
        if method == CF_METHOD:
            from .infimum_sets import characteristic_transformation

            characteristic_transformation(alpha)
        else:
            from .oracle import _check_bound

            _check_bound(alpha, bound)
        return MeasureAtom.of_part(alpha.p, alpha.q, alpha.a, alpha.b).enclosure()
    return minimize(alpha, t, method, bound).value
