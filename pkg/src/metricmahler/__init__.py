"""t-metric Mahler measures of rationals ``p^a / q^b``."""

from .approximations import (
    CFExpansion,
    Classification,
    ExponentPair,
    LogRatio,
    best_approximations,
    cf_expand,
    classify,
    is_first_kind_best,
    is_irreducible,
)
from .core_numbers import CertifiedReal, Ordering, compare_power, is_prime, log_enclosure
from .errors import (
    AuditFailure,
    BoundExceededError,
    DomainError,
    HypothesisError,
    MetricMahlerError,
    UncertainError,
)
from .infimum_sets import (
    CharTransform,
    Factorization,
    FactorizationVector,
    MtProfile,
    characteristic_transformation,
    empirical_minimal_set,
    enumerate_vectors,
    hull_vertices,
    mt_profile,
    theorem_main_audit,
    vector_to_factorization,
)
from .measures import (
    MeasureAtom,
    MeasureFunction,
    PrimePowerRational,
    eval_measure_function,
    m_t,
    mahler_measure,
    parse_alpha,
)

__version__ = "0.1.0"
