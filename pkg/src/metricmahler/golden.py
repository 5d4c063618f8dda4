"""Fibonacci-ratio prime pairs and the experiments built on them.

With ``h_0 = 0, h_1 = 1, ...`` the Fibonacci numbers and ``n`` even, a golden
pair is a pair of primes with ``h_n/h_{n-1} < log q/log p < h_{n+1}/h_n``.
For such a pair the best approximations of ``log q/log p`` up to
``(h_{n+1}, h_n)`` are exactly the consecutive Fibonacci pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .core_numbers import Ordering, compare_power, is_prime
from .errors import AuditFailure, BoundExceededError, DomainError, MetricMahlerError
from .infimum_sets import (
    CharTransform,
    characteristic_transformation,
    empirical_minimal_set,
    enumerate_vectors,
    lex_limit_key,
    mt_profile,
)
from .measures import PrimePowerRational

__all__ = [
    "FibSequence",
    "GoldenPair",
    "GoldenReport",
    "SizeBound",
    "find_golden_pair",
    "golden_char_transform",
    "golden_alpha",
    "conjectured_family",
    "golden_size_bound",
    "gr_conjecture_experiment",
    "DEFAULT_P_CAP",
]

DEFAULT_P_CAP = 10 ** 6


@dataclass(frozen=True)
class FibSequence:
    values: Tuple[int, ...]

    def __post_init__(self):
        v = self.values
        if len(v) < 2 or v[0] != 0 or v[1] != 1:
            raise DomainError("a Fibonacci sequence starts 0, 1")
        for k in range(2, len(v)):
            if v[k] != v[k - 1] + v[k - 2]:
                raise DomainError(f"h_{k} = {v[k]} breaks the recurrence")

    @classmethod
    def first(cls, count: int) -> "FibSequence":
        vals = [0, 1]
        while len(vals) < count:
            vals.append(vals[-1] + vals[-2])
        return cls(tuple(vals[:max(count, 2)]))

    def __getitem__(self, k):
        return self.values[k]

    def __len__(self):
        return len(self.values)


def _fib(n: int) -> FibSequence:
    return FibSequence.first(n + 2)


def _check_n(n: int):
    if n < 2 or n % 2:
        raise DomainError(f"n must be a positive even integer (got {n}); odd n is not supported")


def _lower_ok(p, q, h) -> bool:
    # h_n / h_{n-1} < log q / log p   <=>   q^{h_{n-1}} > p^{h_n}
    return compare_power(q, h[0], p, h[1]) is Ordering.GREATER


def _upper_ok(p, q, h) -> bool:
    # log q / log p < h_{n+1} / h_n   <=>   q^{h_n} < p^{h_{n+1}}
    return compare_power(q, h[1], p, h[2]) is Ordering.LESS


@dataclass(frozen=True)
class GoldenPair:
    n: int
    p: int
    q: int

    def __post_init__(self):
        _check_n(self.n)
        if not (is_prime(self.p) and is_prime(self.q)) or self.p == self.q:
            raise DomainError("p and q must be distinct primes")
        h = _fib(self.n)
        window = (h[self.n - 1], h[self.n], h[self.n + 1])
        if not (_lower_ok(self.p, self.q, window) and _upper_ok(self.p, self.q, window)):
            raise DomainError(
                f"log {self.q}/log {self.p} is not strictly between "
                f"{window[1]}/{window[0]} and {window[2]}/{window[1]}"
            )

    @property
    def bounds(self) -> Tuple[Tuple[int, int], Tuple[int, int]]:
        h = _fib(self.n)
        return (h[self.n], h[self.n - 1]), (h[self.n + 1], h[self.n])


def _iroot(n: int, k: int) -> int:
    """``floor(n ** (1/k))`` for ``n >= 0``."""
    if n < 2 or k == 1:
        return n
    x = 1 << ((n.bit_length() + k - 1) // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x ** k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x


def _next_prime(n: int) -> int:
    while not is_prime(n):
        n += 1
    return n


def find_golden_pair(n: int, p_start: int = 2, p_cap: int = DEFAULT_P_CAP) -> GoldenPair:
    """Smallest prime ``p >= p_start`` admitting a golden partner, with its smallest ``q``.

    For each ``p`` the admissible ``q`` form the integer interval
    ``p^(h_n/h_{n-1}) < q < p^(h_{n+1}/h_n)``, computed with integer roots and
    then scanned for primes.
    """
    _check_n(n)
    h = _fib(n)
    h_prev, h_n, h_next = h[n - 1], h[n], h[n + 1]
    p = _next_prime(max(p_start, 2))
    while p <= p_cap:
        q_lo = _iroot(p ** h_n, h_prev) + 1
        hi_num = p ** h_next
        q_hi = _iroot(hi_num, h_n)
        if q_hi ** h_n == hi_num:
            q_hi -= 1
        for q in range(q_lo, q_hi + 1):
            if q != p and is_prime(q):
                return GoldenPair(n, p, q)
        p = _next_prime(p + 1)
    raise BoundExceededError(f"no golden pair for n = {n} with {p_start} <= p <= {p_cap}")


def golden_alpha(gp: GoldenPair) -> PrimePowerRational:
    """``p^(h_{n+1}) / q^(h_n)``."""
    h = _fib(gp.n)
    return PrimePowerRational(gp.p, gp.q, h[gp.n + 1], h[gp.n])


def golden_char_transform(gp: GoldenPair) -> CharTransform:
    """Transform of the golden rational, checked against the Fibonacci columns."""
    h = _fib(gp.n)
    T = characteristic_transformation(golden_alpha(gp))
    predicted = tuple((h[k + 1], h[k]) for k in range(gp.n + 1))
    if T.pairs != predicted:
        raise AuditFailure(
            f"transform columns {T.pairs} differ from the Fibonacci prediction {predicted}",
            {"computed": T.pairs, "predicted": predicted},
        )
    return T


def conjectured_family(T: CharTransform) -> Tuple[Tuple[int, ...], ...]:
    """Vectors with ``h_k, h_{k+1}`` in consecutive slots, for ``k = 0 .. n-1``."""
    size = T.size
    n = size - 1
    h = _fib(n)
    out = []
    for k in range(n):
        x = [0] * size
        x[n - 1 - k] = h[k]
        x[n - k] = h[k + 1]
        out.append(tuple(x))
    return tuple(out)


@dataclass(frozen=True)
class SizeBound:
    n: int
    vector_count: int
    log_count: float
    bound: float

    @property
    def holds(self) -> bool:
        return self.log_count <= self.bound


def golden_size_bound(gp: GoldenPair) -> SizeBound:
    """``log #V <= (2 log h_{n+1} / log 2 + 1) * log(h_{n+1} + 1)``."""
    h = _fib(gp.n)
    count = len(enumerate_vectors(golden_char_transform(gp)))
    top = h[gp.n + 1]
    bound = (2 * math.log(top) / math.log(2) + 1) * math.log(top + 1)
    return SizeBound(gp.n, count, math.log(count), bound)


@dataclass
class GoldenReport:
    n: int
    pair: Optional[GoldenPair] = None
    alpha: Optional[PrimePowerRational] = None
    exceptional_count: Optional[int] = None
    expected_count: Optional[int] = None
    minimal_set: List[Tuple[int, ...]] = field(default_factory=list)
    conjectured_set: List[Tuple[int, ...]] = field(default_factory=list)
    set_match: Optional[bool] = None
    count_match: Optional[bool] = None
    uncertain_count: int = 0
    error: Optional[str] = None

    @property
    def verdict(self) -> str:
        if self.error is not None:
            return "error"
        if self.set_match and self.count_match and not self.uncertain_count:
            return "supports"
        return "refutes-at-this-scale"

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "p": self.pair.p if self.pair else None,
            "q": self.pair.q if self.pair else None,
            "alpha": str(self.alpha) if self.alpha else None,
            "exceptional_count": self.exceptional_count,
            "expected_count": self.expected_count,
            "minimal_set": [list(v) for v in self.minimal_set],
            "conjectured_set": [list(v) for v in self.conjectured_set],
            "set_match": self.set_match,
            "count_match": self.count_match,
            "uncertain_count": self.uncertain_count,
            "verdict": self.verdict,
            "error": self.error,
        }


def _multisets(profile, vectors):
    atoms = profile.atoms
    col_atoms = profile.transform.atoms()
    index = [atoms.index(a) for a in col_atoms]
    keys = set()
    for x in vectors:
        row = [0] * len(atoms)
        for n, w in enumerate(x):
            row[index[n]] += w
        keys.add(lex_limit_key(atoms, row))
    return keys


def gr_conjecture_experiment(n_max: int = 8, pairs: Optional[Dict[int, Tuple[int, int]]] = None,
                             t_max=16, grid: int = 512, n_min: int = 2) -> List[GoldenReport]:
    """For each even ``n`` up to ``n_max``, compare the observed minimal set and
    exceptional count with the consecutive-Fibonacci family and ``n - 1``.

    ``pairs`` may fix the prime pair for particular ``n``; otherwise the
    smallest golden pair is used.  Failures are recorded per ``n``.
    """
    if n_max < 4 or n_max % 2:
        raise DomainError("n_max must be an even integer >= 4")
    pairs = pairs or {}
    reports = []
    for n in range(max(2, n_min + n_min % 2), n_max + 1, 2):
        rep = GoldenReport(n, expected_count=n - 1)
        try:
            if n in pairs:
                rep.pair = GoldenPair(n, *pairs[n])
            else:
                rep.pair = find_golden_pair(n)
            rep.alpha = golden_alpha(rep.pair)
            T = golden_char_transform(rep.pair)
            profile = mt_profile(rep.alpha, t_max, grid)
            found = [v.entries for v in empirical_minimal_set(rep.alpha, profile=profile)]
            rep.exceptional_count = profile.exceptional_count
            rep.uncertain_count = profile.uncertain_count
            rep.minimal_set = found
            rep.conjectured_set = list(conjectured_family(T))
            rep.set_match = (len(found) == len(rep.conjectured_set)
                             and _multisets(profile, found) == _multisets(profile, rep.conjectured_set))
            rep.count_match = rep.exceptional_count == n - 1
        except (MetricMahlerError, ArithmeticError) as exc:
            rep.error = f"{type(exc).__name__}: {exc}"
        reports.append(rep)
    return reports
