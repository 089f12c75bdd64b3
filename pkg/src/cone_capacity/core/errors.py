"""Exception hierarchy shared by all components."""
from typing import Optional


class ConeCapacityError(Exception):
    """Base class for every error raised by the package."""


class InvalidArgument(ConeCapacityError, ValueError):
    """A precondition on an argument was violated."""


class InvalidTruncation(InvalidArgument):
    """Truncation radius too close to the hypersurface."""


class ConfigError(ConeCapacityError):
    """Scenario or application config could not be validated."""


class InadmissibleCurve(ConeCapacityError):
    """Generating curve is not positive or does not meet the cone wall orthogonally."""


class DegenerateCurve(ConeCapacityError):
    """g^2 + g'^2 vanished somewhere on the curve."""


class NonPositiveCurvature(ConeCapacityError):
    """Mean curvature is not positive, the Heintze-Karcher bound does not apply."""


class SolverError(ConeCapacityError):
    """Base class for failures of the energy minimization."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class NonConvergence(SolverError):
    """Newton iteration budget exhausted before the gradient tolerance was met."""


class LineSearchFailure(SolverError):
    """Backtracking could not produce a monotone energy decrease."""


class MonotonicityViolation(ConeCapacityError):
    """Capacity increased with the truncation radius beyond tolerance."""


class FarFieldTooNoisy(ConeCapacityError):
    """Pointwise far-field gamma values vary too much across the shell."""


class MaximumPrincipleViolation(ConeCapacityError):
    """P-function exceeds its value on Sigma beyond tolerance."""

    def __init__(self, message: str, record: Optional[dict] = None):
        super().__init__(message)
        self.record = record
