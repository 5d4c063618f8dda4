import math

import pytest

from metricmahler.approximations import LogRatio, classify
from metricmahler.errors import BoundExceededError
from metricmahler.measures import MeasureAtom, PrimePowerRational, eval_measure_function
from metricmahler.oracle import (
    definitional_classify,
    enumerate_factorizations,
    iter_factorizations,
    oracle_m_t,
    oracle_minimum,
    partition_count,
    vector_partition_count,
)

from conftest import SWEEP_PRIMES

# two-dimensional vector partitions of (n, n), frozen from the counting oracle
DIAGONAL_COUNTS = [1, 2, 9, 31, 109, 339, 1043, 2998, 8406, 22652, 59521, 151958, 379693]


class TestEnumeration:
    def test_2_2_over_3(self):
        parts = {f.parts for f in enumerate_factorizations(PrimePowerRational(2, 3, 2, 1)).factorizations}
        assert parts == {((2, 1),), ((0, 1), (2, 0)), ((1, 0), (1, 1)), ((0, 1), (1, 0), (1, 0))}

    def test_32_27_is_large(self, alpha_32_27):
        # at least j(5) * j(3) from splitting both exponents independently
        assert len(enumerate_factorizations(alpha_32_27)) >= partition_count(5) * partition_count(3) == 21
        assert len(enumerate_factorizations(alpha_32_27)) == 97

    @pytest.mark.parametrize("a", range(0, 13))
    def test_counts_match_generating_function(self, a):
        for b in range(0, 13):
            if (a, b) == (0, 0):
                continue
            got = sum(1 for _ in iter_factorizations(PrimePowerRational(2, 3, a, b)))
            assert got == vector_partition_count(a, b)

    def test_single_prime(self):
        assert len(enumerate_factorizations(PrimePowerRational(5, 7, 1, 0))) == 1

    def test_no_duplicates(self, alpha_256_243):
        facts = enumerate_factorizations(alpha_256_243).factorizations
        assert len({f.parts for f in facts}) == len(facts)

    def test_known_counts(self):
        assert [partition_count(n) for n in range(10)] == [1, 1, 2, 3, 5, 7, 11, 15, 22, 30]
        assert [vector_partition_count(n, n) for n in range(13)] == DIAGONAL_COUNTS
        assert vector_partition_count(8, 5) == 1576
        assert vector_partition_count(11, 7) == 19584
        assert vector_partition_count(7, 0) == partition_count(7)

    def test_bound(self):
        with pytest.raises(BoundExceededError):
            enumerate_factorizations(PrimePowerRational(2, 3, 30, 19))
        with pytest.raises(BoundExceededError):
            oracle_minimum(PrimePowerRational(2, 3, 5, 3), 2, bound=7)


class TestOracleMinimum:
    @pytest.mark.parametrize("t", ["1.5", "2", "4"])
    def test_bounded_by_every_factorization(self, alpha_32_27, t):
        value, argmin = oracle_m_t(alpha_32_27, t)
        for f in enumerate_factorizations(alpha_32_27).factorizations:
            assert value.lower <= eval_measure_function(f.measure_function(), t).upper
        for f in argmin:
            assert value.overlaps(eval_measure_function(f.measure_function(), t))

    def test_trivial_is_a_minimiser_at_t_one(self, alpha_32_27):
        _, argmin = oracle_m_t(alpha_32_27, 1)
        assert ((5, 3),) in {f.parts for f in argmin}

    def test_8_25(self):
        alpha = PrimePowerRational(2, 5, 3, 2)
        value, argmin = oracle_m_t(alpha, 2)
        assert {f.parts for f in argmin} == {((1, 1), (2, 1))}
        assert abs(float(value) - math.sqrt(2) * math.log(5)) < 1e-14
        _, at_one = oracle_m_t(alpha, 1)
        assert {f.parts for f in at_one} >= {((3, 2),), ((1, 1), (2, 1))}

    def test_matches_cf_at_t_3(self, alpha_32_27):
        from metricmahler.measures import m_t

        assert oracle_m_t(alpha_32_27, 3)[0].overlaps(m_t(alpha_32_27, 3, "cf_infimum_set"))

    def test_measure_function_atoms(self):
        f = enumerate_factorizations(PrimePowerRational(2, 3, 2, 1)).factorizations
        by_parts = {x.parts: x.measure_function().multiset() for x in f}
        assert by_parts[((1, 0), (1, 1))] == (MeasureAtom(3, 1), MeasureAtom(2, 1))


@pytest.mark.parametrize("p,q", SWEEP_PRIMES + [(q, p) for p, q in SWEEP_PRIMES])
def test_definitional_classification_agrees(p, q):
    xi = LogRatio(p, q)
    for a in range(41):
        for b in range(41):
            if (a, b) == (0, 0):
                continue
            assert definitional_classify((a, b), xi) == classify((a, b), xi), (p, q, a, b)


def test_definitional_examples(xi23):
    assert definitional_classify((19, 12), xi23).lower_best
    assert not definitional_classify((2, 2), xi23).in_G
    assert definitional_classify((5, 3), xi23).upper_best
