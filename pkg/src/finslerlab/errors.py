"""Exception hierarchy."""

from __future__ import annotations


class FinslerError(Exception):
    """Base class for all library errors."""


class DomainError(FinslerError):
    """Evaluation outside the admissible (b^2, s) region or chart domain."""

    def __init__(self, message, *, b2=None, s=None, point=None):
        super().__init__(message)
        self.b2 = b2
        self.s = s
        self.point = point


class RegularityError(FinslerError):
    """A strong-convexity denominator vanished where it must be positive."""


class SingularMetricError(FinslerError):
    """The fundamental tensor (or the Riemannian metric) is not invertible."""


class NonConformalError(FinslerError):
    """An operation requiring a closed conformal one-form was called without one."""


class InstanceFormatError(FinslerError):
    """An instance definition file failed validation."""

    def __init__(self, message, field=None):
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field


class QuadratureError(FinslerError):
    """Adaptive quadrature failed to converge on an interval."""

    def __init__(self, message, interval=None):
        super().__init__(message)
        self.interval = interval
