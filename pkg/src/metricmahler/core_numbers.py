"""Exact integers, certified real enclosures and exact power comparison.

Python ints play the role of unbounded naturals and :class:`fractions.Fraction`
the role of canonical positive rationals.  Real quantities (logarithms and the
measure values built from them) are carried as :class:`CertifiedReal`
enclosures whose endpoints are exact dyadic rationals.
"""

from __future__ import annotations

import contextlib
import enum
import math
import os
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from mpmath import iv

from .errors import DomainError, UncertainError

__all__ = [
    "DEFAULT_PRECISION",
    "PRECISION_CAP",
    "Ordering",
    "CertifiedReal",
    "pos_rational",
    "compare_power",
    "log_enclosure",
    "is_prime",
    "primality",
    "precision_ladder",
    "interval_precision",
    "interval_endpoints",
]

DEFAULT_PRECISION = 128
PRECISION_CAP = int(os.environ.get("METRICMAHLER_PRECISION_CAP", "4096"))

# Exact powering is skipped (and the comparison reported uncertain) when an
# operand would need more bits than this.
EXACT_POWER_BIT_LIMIT = 1 << 24


def precision_ladder(start=DEFAULT_PRECISION, cap=None):
    """Yield ``start, 2*start, ...`` up to and including the cap."""
    cap = PRECISION_CAP if cap is None else cap
    bits = start
    while bits < cap:
        yield bits
        bits *= 2
    yield cap


class Ordering(enum.IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1

    def flip(self) -> "Ordering":
        return Ordering(-int(self))


def pos_rational(num: int, den: int = 1) -> Fraction:
    """Return ``num/den`` in lowest terms, rejecting negatives and zero denominators."""
    if den <= 0 or num < 0:
        raise DomainError(f"not a nonnegative rational: {num}/{den}")
    return Fraction(num, den)


# ---------------------------------------------------------------------------
# certified reals


# mpmath keeps interval precision in a global; this lock makes the
# save/set/restore dance safe across threads.
_IV_LOCK = threading.RLock()


@contextlib.contextmanager
def interval_precision(bits: int):
    """Run ``mpmath.iv`` arithmetic at ``bits`` of working precision."""
    with _IV_LOCK:
        saved = iv.prec
        iv.prec = bits
        try:
            yield
        finally:
            iv.prec = saved


def _fraction_from_raw(raw) -> Fraction:
    sign, man, exp, _ = raw
    if not man:
        # mpmath uses (0, 0, 0, 0) for zero; infinities carry man == 0 too
        if exp:
            raise DomainError("infinite interval endpoint")
        return Fraction(0)
    value = Fraction(int(man)) * (Fraction(2) ** int(exp))
    return -value if sign else value


def interval_endpoints(x):
    """Exact ``Fraction`` endpoints of an ``mpmath.iv`` interval."""
    lo, hi = x._mpi_
    return _fraction_from_raw(lo), _fraction_from_raw(hi)


@dataclass(frozen=True)
class CertifiedReal:
    """A closed interval ``[lower, upper]`` known to contain a real number."""

    lower: Fraction
    upper: Fraction
    precision_bits: int = DEFAULT_PRECISION

    def __post_init__(self):
        if self.lower > self.upper:
            raise DomainError(f"empty enclosure [{self.lower}, {self.upper}]")

    @classmethod
    def exact(cls, value, precision_bits=DEFAULT_PRECISION) -> "CertifiedReal":
        v = Fraction(value)
        return cls(v, v, precision_bits)

    @classmethod
    def from_interval(cls, x, precision_bits) -> "CertifiedReal":
        """Build from an ``mpmath.iv`` interval (endpoints are exact binary floats)."""
        lo, hi = interval_endpoints(x)
        return cls(lo, hi, precision_bits)

    def to_interval(self):
        """Outward-rounded ``mpmath.iv`` interval at the current ``iv.prec``."""
        lo = iv.mpf(self.lower.numerator) / self.lower.denominator
        hi = iv.mpf(self.upper.numerator) / self.upper.denominator
        return iv.mpf([lo.a, hi.b])

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower

    @property
    def is_exact(self) -> bool:
        return self.lower == self.upper

    @property
    def midpoint(self) -> Fraction:
        return (self.lower + self.upper) / 2

    def __float__(self) -> float:
        return float(self.midpoint)

    def contains(self, value) -> bool:
        if isinstance(value, CertifiedReal):
            return self.lower <= value.lower and value.upper <= self.upper
        v = Fraction(value) if not isinstance(value, float) else Fraction(value)
        return self.lower <= v <= self.upper

    def overlaps(self, other: "CertifiedReal") -> bool:
        return self.lower <= other.upper and other.lower <= self.upper

    def sign(self):
        """-1, 0 or 1 when certain, ``None`` when the enclosure straddles zero."""
        if self.lower > 0:
            return 1
        if self.upper < 0:
            return -1
        if self.lower == self.upper == 0:
            return 0
        return None

    def compare(self, other: "CertifiedReal"):
        """Certified ordering against ``other`` or ``None`` if the enclosures overlap."""
        if self.upper < other.lower:
            return Ordering.LESS
        if self.lower > other.upper:
            return Ordering.GREATER
        if self.is_exact and other.is_exact and self.lower == other.lower:
            return Ordering.EQUAL
        return None

    def __add__(self, other):
        if not isinstance(other, CertifiedReal):
            other = CertifiedReal.exact(other, self.precision_bits)
        return CertifiedReal(self.lower + other.lower, self.upper + other.upper,
                             min(self.precision_bits, other.precision_bits))

    __radd__ = __add__

    def __neg__(self):
        return CertifiedReal(-self.upper, -self.lower, self.precision_bits)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, k) -> "CertifiedReal":
        """Multiply by an exact rational ``k``."""
        k = Fraction(k)
        lo, hi = self.lower * k, self.upper * k
        if k < 0:
            lo, hi = hi, lo
        return CertifiedReal(lo, hi, self.precision_bits)

    def format(self, digits=15) -> str:
        return f"{float(self.midpoint):.{digits}g}"

    def __str__(self):
        return f"{self.format()} ± {float(self.width) / 2:.3g}"


# ---------------------------------------------------------------------------
# logarithms by integer arithmetic
#
# log n = k log 2 + 2 atanh(z),  z = (n - 2^k) / (n + 2^k),  |z| <= 1/3


def _atanh_scaled(u: int, v: int, w: int):
    """Integer bounds ``lo <= 2^w atanh(u/v) <= hi`` for ``0 <= u/v <= 1/3``."""
    if u == 0:
        return 0, 0
    lo = 0
    terms = 0
    num, den = u, v
    u2, v2 = u * u, v * v
    k = 0
    while True:
        # remaining tail after this point is at most num/den / ((2k+1)(1 - z^2))
        tail_num = (num << w) * v2
        tail_den = den * (2 * k + 1) * (v2 - u2)
        if tail_num < tail_den:
            break
        lo += (num << w) // (den * (2 * k + 1))
        terms += 1
        num *= u2
        den *= v2
        k += 1
    # each floor loses < 1, the tail is < 1
    return lo, lo + terms + 1


@lru_cache(maxsize=None)
def _log_scaled(n: int, w: int):
    """Integer bounds on ``2^w log n``."""
    if n == 1:
        return 0, 0
    ln2_lo, ln2_hi = _atanh_scaled(1, 3, w)
    ln2_lo, ln2_hi = 2 * ln2_lo, 2 * ln2_hi
    k = n.bit_length() - 1
    if n == 1 << k:
        return k * ln2_lo, k * ln2_hi
    # pick the nearer power of two so that |z| <= 1/3
    if 3 * n > 4 << k:
        k += 1
    base = 1 << k
    u, v = abs(n - base), n + base
    g = math.gcd(u, v)
    a_lo, a_hi = _atanh_scaled(u // g, v // g, w)
    if n > base:
        return k * ln2_lo + 2 * a_lo, k * ln2_hi + 2 * a_hi
    return k * ln2_lo - 2 * a_hi, k * ln2_hi - 2 * a_lo


@lru_cache(maxsize=None)
def _log_grid(n: int, precision_bits: int):
    """Numerators ``lo, hi`` over ``2^(precision_bits + 8)`` bracketing ``log n``.

    The raw series is run with 40 guard bits and then rounded one grid step
    further outward, which makes enclosures at increasing precision nested.
    """
    grid = precision_bits + 8
    guard = grid + 32 + n.bit_length().bit_length()
    lo, hi = _log_scaled(n, guard)
    shift = guard - grid
    return (lo >> shift) - 1, -((-hi) >> shift) + 1


def log_enclosure(n: int, precision_bits: int = DEFAULT_PRECISION) -> CertifiedReal:
    """Certified enclosure of ``log n`` of width at most ``2^(1-precision_bits) log n``."""
    if not isinstance(n, int) or n < 2:
        raise DomainError(f"log_enclosure needs an integer n >= 2, got {n!r}")
    if precision_bits < 1:
        raise DomainError("precision_bits must be positive")
    lo, hi = _log_grid(n, precision_bits)
    den = 1 << (precision_bits + 8)
    return CertifiedReal(Fraction(lo, den), Fraction(hi, den), precision_bits)


# ---------------------------------------------------------------------------
# power comparison


def _interval_sign(p, a, q, b, bits):
    """Sign of ``a log p - b log q`` from grid enclosures, or None."""
    p_lo, p_hi = _log_grid(p, bits) if p > 1 else (0, 0)
    q_lo, q_hi = _log_grid(q, bits) if q > 1 else (0, 0)
    lo = a * p_lo - b * q_hi
    hi = a * p_hi - b * q_lo
    if lo > 0:
        return Ordering.GREATER
    if hi < 0:
        return Ordering.LESS
    return None


def compare_power(p: int, a: int, q: int, b: int) -> Ordering:
    """Exact ordering of ``p**a`` against ``q**b``.

    A 128-bit logarithm enclosure settles almost every case; exact big-integer
    powering is the fallback when the enclosure of ``a log p - b log q``
    contains zero.
    """
    if p < 2 or q < 2:
        raise DomainError(f"compare_power needs bases >= 2, got {p}, {q}")
    if a < 0 or b < 0:
        raise DomainError("exponents must be nonnegative")
    if a == 0 and b == 0:
        return Ordering.EQUAL
    if p == q:
        return Ordering((a > b) - (a < b))
    if b == 0:
        return Ordering.GREATER
    if a == 0:
        return Ordering.LESS
    found = _interval_sign(p, a, q, b, DEFAULT_PRECISION)
    if found is not None:
        return found
    if max(a * p.bit_length(), b * q.bit_length()) <= EXACT_POWER_BIT_LIMIT:
        lhs, rhs = p ** a, q ** b
        return Ordering((lhs > rhs) - (lhs < rhs))
    for bits in precision_ladder(2 * DEFAULT_PRECISION):
        found = _interval_sign(p, a, q, b, bits)
        if found is not None:
            return found
    raise UncertainError(f"cannot order {p}^{a} and {q}^{b} within the precision cap")


# ---------------------------------------------------------------------------
# primality

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
# the first thirteen primes are a deterministic witness set for n < 3.3e24
# (the first twelve stop at 318665857834031151167461)
_DETERMINISTIC_LIMIT = 3317044064679887385961981


def _miller_rabin(n: int, bases) -> bool:
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in bases:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primality(n: int) -> str:
    """Return ``"prime"``, ``"composite"`` or ``"probable_prime"``.

    Exact below 3.3e24 (which covers every 64-bit input).  Above that a
    Miller-Rabin run over 40 extra bases is used, so a composite slips
    through with probability below 4^-52.
    """
    if n < 2:
        return "composite"
    for sp in _SMALL_PRIMES:
        if n % sp == 0:
            return "prime" if n == sp else "composite"
    if n < 43 * 43:
        return "prime"
    if not _miller_rabin(n, _SMALL_PRIMES):
        return "composite"
    if n < _DETERMINISTIC_LIMIT:
        return "prime"
    extra = [b for b in range(43, 400) if all(b % s for s in _SMALL_PRIMES)][:40]
    return "probable_prime" if _miller_rabin(n, extra) else "composite"


def is_prime(n: int) -> bool:
    return primality(n) != "composite"
