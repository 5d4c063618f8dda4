import mpmath
import pytest

from metricmahler.errors import BoundExceededError, DomainError
from metricmahler.golden import (
    FibSequence,
    GoldenPair,
    conjectured_family,
    find_golden_pair,
    golden_alpha,
    golden_char_transform,
    golden_size_bound,
    gr_conjecture_experiment,
)
from metricmahler.infimum_sets import enumerate_vectors
from metricmahler.measures import PrimePowerRational

from test_infimum_sets import brute_solutions

FIB = [0, 1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89]

# the infimum set printed for 31^34 / 257^21
S_LARGE = {
    (0, 0, 0, 0, 0, 0, 0, 0, 1), (0, 0, 0, 0, 0, 0, 1, 1, 0), (0, 0, 0, 0, 0, 1, 2, 0, 0),
    (0, 0, 0, 0, 2, 3, 0, 0, 0), (0, 0, 0, 3, 5, 0, 0, 0, 0), (0, 0, 5, 8, 0, 0, 0, 0, 0),
    (0, 8, 13, 0, 0, 0, 0, 0, 0), (13, 21, 0, 0, 0, 0, 0, 0, 0),
}


def primes_upto(n):
    return [k for k in range(2, n + 1) if all(k % d for d in range(2, int(k ** 0.5) + 1))]


def float_window_search(n, limit=300):
    """Smallest p, then smallest q, with h_n/h_{n-1} < log q/log p < h_{n+1}/h_n, using 100-digit logs."""
    lo, hi = mpmath.mpf(FIB[n]) / FIB[n - 1], mpmath.mpf(FIB[n + 1]) / FIB[n]
    ps = primes_upto(limit)
    with mpmath.workdps(100):
        for p in ps:
            for q in primes_upto(p * p):
                if lo < mpmath.log(q) / mpmath.log(p) < hi:
                    return p, q
    return None


class TestFibonacci:
    def test_first(self):
        assert list(FibSequence.first(12).values) == FIB

    def test_rejects_broken_sequence(self):
        with pytest.raises(DomainError):
            FibSequence((0, 1, 2))

    def test_convergents_interleave(self):
        even = [FIB[k] / FIB[k - 1] for k in range(2, 11, 2)]
        odd = [FIB[k] / FIB[k - 1] for k in range(3, 11, 2)]
        phi = (1 + 5 ** 0.5) / 2
        assert even == sorted(even) and odd == sorted(odd, reverse=True)
        assert max(even) < phi < min(odd)


class TestGoldenPair:
    @pytest.mark.parametrize("n,pair", [(2, (2, 3)), (4, (2, 3)), (6, (7, 23)), (8, (29, 233))])
    def test_smallest(self, n, pair):
        gp = find_golden_pair(n)
        assert (gp.p, gp.q) == pair == float_window_search(n)

    def test_31_257(self):
        gp = GoldenPair(8, 31, 257)
        assert gp.bounds == ((21, 13), (34, 21))
        assert golden_alpha(gp) == PrimePowerRational(31, 257, 34, 21)

    def test_n2_window(self):
        assert GoldenPair(2, 2, 3).bounds == ((1, 1), (2, 1))

    @pytest.mark.parametrize("n", [0, 1, 3, 7, -2])
    def test_odd_or_small_n_rejected(self, n):
        with pytest.raises(DomainError):
            find_golden_pair(n)

    def test_outside_window_rejected(self):
        with pytest.raises(DomainError):
            GoldenPair(8, 2, 3)
        with pytest.raises(DomainError):
            GoldenPair(4, 4, 9)

    def test_search_cap(self):
        with pytest.raises(BoundExceededError):
            find_golden_pair(8, p_cap=28)

    def test_p_start(self):
        gp = find_golden_pair(8, p_start=30)
        assert (gp.p, gp.q) == (31, 257)


class TestGoldenTransform:
    @pytest.mark.parametrize("n", [2, 4, 6, 8])
    def test_fibonacci_columns(self, n):
        T = golden_char_transform(find_golden_pair(n))
        assert T.pairs == tuple((FIB[k + 1], FIB[k]) for k in range(n + 1))

    def test_large_example(self):
        T = golden_char_transform(GoldenPair(8, 31, 257))
        assert set(conjectured_family(T)) == S_LARGE

    @pytest.mark.parametrize("n,count", [(4, 6), (6, 38), (8, 695)])
    def test_vector_counts(self, n, count):
        T = golden_char_transform(find_golden_pair(n))
        assert len(enumerate_vectors(T)) == count

    @pytest.mark.parametrize("n", [4, 6])
    def test_vectors_against_nested_loops(self, n):
        T = golden_char_transform(find_golden_pair(n))
        assert {v.entries for v in enumerate_vectors(T)} == brute_solutions(T.pairs, T.oriented.pair)

    @pytest.mark.parametrize("n", [2, 4, 6, 8])
    def test_size_bound(self, n):
        assert golden_size_bound(find_golden_pair(n)).holds


def test_experiment_small():
    reports = gr_conjecture_experiment(n_max=6)
    assert [r.n for r in reports] == [2, 4, 6]
    assert [r.exceptional_count for r in reports] == [1, 3, 5]
    assert all(r.verdict == "supports" for r in reports)
    assert reports[-1].as_dict()["p"] == 7


def test_experiment_records_errors():
    reports = gr_conjecture_experiment(n_max=4, pairs={4: (2, 5)})
    assert reports[-1].verdict == "error" and "DomainError" in reports[-1].error


def test_experiment_rejects_bad_n_max():
    with pytest.raises(DomainError):
        gr_conjecture_experiment(n_max=5)
