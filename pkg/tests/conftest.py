import pytest
from hypothesis import HealthCheck, settings

from metricmahler.approximations import LogRatio
from metricmahler.measures import PrimePowerRational

# derandomized so that repeated runs exercise the same examples
settings.register_profile("repo", derandomize=True, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")

SWEEP_PRIMES = [(2, 3), (2, 5), (3, 5)]


@pytest.fixture
def xi23():
    return LogRatio(2, 3)


@pytest.fixture
def alpha_32_27():
    return PrimePowerRational(2, 3, 5, 3)


@pytest.fixture
def alpha_256_243():
    return PrimePowerRational(2, 3, 8, 5)


@pytest.fixture
def alpha_large():
    return PrimePowerRational(31, 257, 34, 21)
