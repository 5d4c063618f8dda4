"""Continued fractions of ``log q / log p`` and the upper/lower set classification.

Every decision "is a/b above or below xi" reduces to the integer comparison
``p**a`` versus ``q**b``, so all results here are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, List, Tuple

from .core_numbers import Ordering, UncertainError, compare_power, is_prime
from .errors import DomainError

__all__ = [
    "LogRatio",
    "ExponentPair",
    "CFExpansion",
    "Classification",
    "cf_expand",
    "classify",
    "best_approximations",
    "is_best_approximation",
    "is_first_kind_best",
    "is_irreducible",
    "is_reducible_by_search",
]

Pair = Tuple[int, int]


@dataclass(frozen=True)
class LogRatio:
    """The irrational ``xi = log q / log p`` for distinct primes ``p`` and ``q``."""

    p: int
    q: int

    def __post_init__(self):
        if self.p == self.q:
            raise DomainError("p and q must be distinct")
        for r in (self.p, self.q):
            if not is_prime(r):
                raise DomainError(f"{r} is not prime")

    @property
    def value(self) -> float:
        return math.log(self.q) / math.log(self.p)

    def inverse(self) -> "LogRatio":
        return LogRatio(self.q, self.p)

    def in_upper(self, a: int, b: int) -> bool:
        """``(a, b)`` lies in the upper set, i.e. ``a/b > xi`` (``a/0`` is infinite)."""
        if b == 0:
            return a > 0
        if a == 0:
            return False
        return compare_power(self.p, a, self.q, b) is Ordering.GREATER

    def floor_times(self, n: int) -> int:
        """``floor(n * xi)``: the largest ``m`` with ``p**m < q**n``."""
        return _floor_times(self.p, self.q, n)

    def floor_over(self, m: int) -> int:
        """``floor(m / xi)``: the largest ``n`` with ``q**n < p**m``."""
        return _floor_times(self.q, self.p, m)

    def sign_linear(self, c: int, d: int) -> int:
        """Sign of ``c * xi + d`` for integers ``c`` and ``d``."""
        if c == 0:
            return (d > 0) - (d < 0)
        if c < 0:
            return -self.sign_linear(-c, -d)
        if d >= 0:
            return 1
        # c xi - |d| compared with 0  <=>  q^c against p^|d|
        return int(compare_power(self.q, c, self.p, -d))


@lru_cache(maxsize=1 << 16)
def _floor_times(p: int, q: int, n: int) -> int:
    """Largest ``m >= 0`` with ``p**m < q**n`` (``n >= 0``)."""
    if n == 0:
        return 0
    guess = int(n * math.log(q) / math.log(p))
    m = max(guess, 0)
    while m > 0 and compare_power(p, m, q, n) is not Ordering.LESS:
        m -= 1
    while compare_power(p, m + 1, q, n) is Ordering.LESS:
        m += 1
    return m


@dataclass(frozen=True, order=True)
class ExponentPair:
    a: int
    b: int

    def __post_init__(self):
        if self.a < 0 or self.b < 0 or (self.a == 0 and self.b == 0):
            raise DomainError(f"({self.a}, {self.b}) is not in N0 x N0 minus the origin")

    @property
    def coprime(self) -> bool:
        return math.gcd(self.a, self.b) == 1

    def __iter__(self):
        yield self.a
        yield self.b

    def __add__(self, other):
        return ExponentPair(self.a + other.a, self.b + other.b)


def _pair(pair) -> Pair:
    a, b = pair
    ExponentPair(a, b)
    return int(a), int(b)


@dataclass(frozen=True)
class CFExpansion:
    quotients: Tuple[int, ...]
    certified_count: int

    def convergents(self) -> List[Pair]:
        h2, k2, h1, k1 = 0, 1, 1, 0
        out = []
        for x in self.quotients:
            h2, k2, h1, k1 = h1, k1, x * h1 + h2, x * k1 + k2
            out.append((h1, k1))
        return out


@dataclass(frozen=True)
class Classification:
    in_U: bool
    in_L: bool
    in_U1: bool
    in_U2: bool
    in_L1: bool
    in_L2: bool
    in_G: bool
    upper_best: bool
    lower_best: bool
    upper_boundary: bool
    lower_boundary: bool
    irreducible: bool

    @property
    def best(self) -> bool:
        return self.upper_best or self.lower_best

    @property
    def boundary(self) -> bool:
        return self.upper_boundary or self.lower_boundary

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


# ---------------------------------------------------------------------------
# continued fractions


def _iter_quotients(xi: LogRatio) -> Iterator[Tuple[int, int, int, int, int]]:
    """Yield ``(x_n, h_{n-2}, k_{n-2}, h_{n-1}, k_{n-1})`` for n = 0, 1, 2, ...

    ``x_n`` is the largest integer for which the semiconvergent
    ``(x h_{n-1} + h_{n-2}) / (x k_{n-1} + k_{n-2})`` still lies on the same side
    of xi as ``h_{n-2}/k_{n-2}``; every side test is an exact power comparison.
    """
    h2, k2, h1, k1 = 0, 1, 1, 0
    n = 0
    while True:
        lower_side = n % 2 == 0

        def same_side(x):
            return xi.in_upper(x * h1 + h2, x * k1 + k2) != lower_side

        lo = 0 if n == 0 else 1
        hi = max(lo, 1)
        while same_side(hi):
            lo, hi = hi, 2 * hi
        # same_side(lo) holds (or lo == 0 at depth 0), same_side(hi) fails
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if same_side(mid):
                lo = mid
            else:
                hi = mid
        yield lo, h2, k2, h1, k1
        h2, k2, h1, k1 = h1, k1, lo * h1 + h2, lo * k1 + k2
        n += 1


def cf_expand(xi: LogRatio, count: int) -> CFExpansion:
    """First ``count`` partial quotients of xi, each certified by exact comparisons.

    Raises :class:`UncertainError` (with the certified prefix as ``partial``)
    if a comparison cannot be settled within the precision cap.
    """
    if count < 1:
        raise DomainError("count must be at least 1")
    quotients: List[int] = []
    try:
        for x, *_ in _iter_quotients(xi):
            quotients.append(x)
            if len(quotients) == count:
                break
    except UncertainError as exc:
        prefix = CFExpansion(tuple(quotients), len(quotients))
        raise UncertainError(f"uncertain beyond depth {len(quotients)}", prefix) from exc
    return CFExpansion(tuple(quotients), len(quotients))


# ---------------------------------------------------------------------------
# classification


def _in_U1(xi, a, b):
    # a/b <= m / floor(m/xi) for every m <= a that has an upper pair
    for m in range(1, a + 1):
        n = xi.floor_over(m)
        if n == 0:
            continue
        if b == 0 or a * n > m * b:
            return False
    return True


def _in_U2(xi, a, b):
    # a/b <= (floor(n xi) + 1) / n for every 1 <= n <= b
    for n in range(1, b + 1):
        if a * n > b * (xi.floor_times(n) + 1):
            return False
    return True


def _in_L1(xi, a, b):
    # a/b >= m / (floor(m/xi) + 1) for every m <= a
    for m in range(1, a + 1):
        if m * b > a * (xi.floor_over(m) + 1):
            return False
    return True


def _in_L2(xi, a, b):
    # a/b >= floor(n xi) / n for every 1 <= n <= b
    for n in range(1, b + 1):
        if xi.floor_times(n) * b > a * n:
            return False
    return True


def classify(pair, xi: LogRatio) -> Classification:
    """Membership of ``pair`` in every upper/lower set, plus derived flags."""
    a, b = _pair(pair)
    in_U = xi.in_upper(a, b)
    in_L = not in_U
    in_G = math.gcd(a, b) == 1
    u1 = in_U and _in_U1(xi, a, b)
    u2 = in_U and _in_U2(xi, a, b)
    l1 = in_L and _in_L1(xi, a, b)
    l2 = in_L and _in_L2(xi, a, b)
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
        irreducible=in_G and (u2 if in_U else l1),
    )


def is_best_approximation(pair, xi: LogRatio) -> bool:
    return classify(pair, xi).best


def is_reducible_by_search(pair, xi: LogRatio) -> bool:
    """Search every split ``pair = y + z`` with ``y, z`` on the same side as ``pair``."""
    a, b = _pair(pair)
    side = xi.in_upper(a, b)
    for i in range(a + 1):
        for j in range(b + 1):
            if (i, j) in ((0, 0), (a, b)):
                continue
            if xi.in_upper(i, j) == side and xi.in_upper(a - i, b - j) == side:
                return True
    return False


def is_irreducible(pair, xi: LogRatio, debug: bool = False) -> bool:
    """Irreducibility via membership in G and the relevant second-kind set.

    With ``debug`` and ``a + b <= 60`` the decomposition search is run as well
    and the two answers must agree.
    """
    a, b = _pair(pair)
    result = classify((a, b), xi).irreducible
    if debug and a + b <= 60:
        searched = not is_reducible_by_search((a, b), xi)
        if searched != result:
            raise AssertionError(f"irreducibility mismatch at {(a, b)}: {result} vs {searched}")
    return result


def is_first_kind_best(pair, xi: LogRatio) -> bool:
    """True when no fraction with denominator at most ``b`` is strictly closer to xi."""
    a, b = _pair(pair)
    if b < 1 or math.gcd(a, b) != 1:
        raise DomainError("is_first_kind_best needs gcd(a, b) = 1 and b >= 1")
    # sign of (b xi - a) fixes |b xi - a| as a linear form in xi
    s_ab = xi.sign_linear(b, -a)
    for s in range(1, b + 1):
        f = xi.floor_times(s)
        for r in (f, f + 1):
            if (r, s) == (a, b) or r < 0:
                continue
            s_rs = xi.sign_linear(s, -r)
            # closer  <=>  b |s xi - r| < s |b xi - a|
            #        <=>  s_ab s (b xi - a) - s_rs b (s xi - r) > 0
            c = s_ab * s * b - s_rs * b * s
            d = -s_ab * s * a + s_rs * b * r
            if xi.sign_linear(c, d) > 0:
                return False
    return True


# ---------------------------------------------------------------------------
# best approximations via semiconvergents


def best_approximations(xi: LogRatio, max_a: int, max_b: int) -> List[Pair]:
    """Every upper or lower best approximation with ``a <= max_a`` and ``b <= max_b``.

    Built from the semiconvergents ``[x_0; x_1, ..., x_{n-1}, x]`` with
    ``1 <= x <= x_n``, together with ``(1, 0)`` and ``(x_0, 1)``.  Sorted by
    ``b`` then ``a``.  Requires ``xi > 1``.
    """
    if xi.q < xi.p:
        raise DomainError("best_approximations expects q > p; swap the primes and the pair")
    found: List[Pair] = []
    if max_a >= 1:
        found.append((1, 0))
    try:
        quotients = _iter_quotients(xi)
        x0, *_ = next(quotients)
        if x0 <= max_a and max_b >= 1:
            found.append((x0, 1))
        for xn, h2, k2, h1, k1 in quotients:
            stop = False
            for x in range(1, xn + 1):
                a, b = x * h1 + h2, x * k1 + k2
                if a > max_a or b > max_b:
                    stop = True
                    break
                found.append((a, b))
            if stop:
                break
    except UncertainError as exc:
        raise UncertainError("continued fraction certification exhausted", sorted(found, key=_order)) from exc
    return sorted(set(found), key=_order)


def _order(pair):
    return pair[1], pair[0]
