"""Exception hierarchy shared by every module."""

from __future__ import annotations


class QuadsysError(Exception):
    """Base class for all toolkit errors."""


class InadmissibleCoefficients(QuadsysError, ValueError):
    pass


class DegenerateRadical(QuadsysError, ArithmeticError):
    pass


class DegenerateDenominator(QuadsysError, ArithmeticError):
    pass


class PoleEncountered(QuadsysError, ArithmeticError):
    """A quotient denominator vanished (within tolerance) at an evaluation point.

    ``mask`` flags the offending points when the evaluation was vectorized.
    """

    def __init__(self, message: str, mask=None):
        super().__init__(message)
        self.mask = mask


class EvaluationOverflow(QuadsysError, OverflowError):
    """An intermediate value left the floating range; use log-magnitude evaluation."""


class EmptyNullSpace(QuadsysError, ValueError):
    pass


class DimensionTooSmall(QuadsysError, ValueError):
    pass


class ZeroTarget(QuadsysError, ValueError):
    pass


class RequiresT1EqualsT2(QuadsysError, ValueError):
    pass


class RequiresT2Zero(QuadsysError, ValueError):
    pass


class ZeroShiftCoordinate(QuadsysError, ValueError):
    pass


class InfeasibleBranch(QuadsysError, ValueError):
    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class DegenerateFit(QuadsysError, ValueError):
    pass


class SchemaViolation(QuadsysError, ValueError):
    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = list(violations)


class IoFailure(QuadsysError, OSError):
    pass
