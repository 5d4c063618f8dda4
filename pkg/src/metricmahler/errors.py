"""Exception hierarchy shared by every module."""


class MetricMahlerError(Exception):
    """Base class for all package errors."""


class DomainError(MetricMahlerError, ValueError):
    """An argument lies outside the domain of the operation."""


class UncertainError(MetricMahlerError, ArithmeticError):
    """A certified decision could not be reached within the precision cap.

    ``partial`` carries whatever was certified before giving up (a prefix of
    partial quotients, a list of still-tied candidates, ...).
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class HypothesisError(MetricMahlerError, ValueError):
    """The exponent pair is not an upper or lower best approximation."""


class BoundExceededError(MetricMahlerError, ValueError):
    """A brute-force routine was asked to work beyond its configured bound."""


class AuditFailure(MetricMahlerError, AssertionError):
    """A structural property of an optimal factorization was violated."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
