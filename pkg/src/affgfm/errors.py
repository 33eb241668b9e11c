"""Exception hierarchy.

Every error carries an ``exit_code`` so the command line front end can map
failures onto its documented contract without a lookup table.
"""

from __future__ import annotations


class GFMError(Exception):
    """Base class for all engine errors."""

    exit_code = 2


class ValidationError(GFMError):
    exit_code = 2


class UnsupportedFamilyRank(ValidationError):
    pass


class ZeroWeight(ValidationError):
    pass


class GroupTooLarge(GFMError):
    pass


class FieldMismatch(GFMError):
    pass


class Inhomogeneous(GFMError):
    def __init__(self, first, second):
        super().__init__(f"inhomogeneous element: degrees {first} and {second}")
        self.degrees = (first, second)


class NegativeLambdaExponent(GFMError):
    pass


class NotInvariant(GFMError):
    pass


class NotInRing(GFMError):
    pass


class ReductionStall(GFMError):
    pass


class RewriteFailure(GFMError):
    pass


class MismatchWithClosedForm(GFMError):
    pass


class NoSolution(GFMError):
    exit_code = 3


class SolverCapExceeded(GFMError):
    exit_code = 3


class NonRationalSolution(GFMError):
    exit_code = 3

    def __init__(self, message, minimal_polynomial=None):
        super().__init__(message)
        self.minimal_polynomial = minimal_polynomial


class NotLinearInLambda(GFMError):
    exit_code = 3

    def __init__(self, message, offending=()):
        super().__init__(message)
        self.offending = list(offending)


class DegenerateEta(GFMError):
    exit_code = 3


class SingularMetric(GFMError):
    pass


class ChartError(GFMError):
    """Base for failures while producing flat coordinates."""

    exit_code = 4


class NonConstantSpectrum(ChartError):
    pass


class NonRationalEigenvalue(ChartError):
    pass


class NonPositiveDegree(ChartError):
    pass


class NotDiagonalizable(ChartError):
    pass


class NoChartInField(ChartError):
    def __init__(self, message, minimal_polynomial=None):
        super().__init__(message)
        self.minimal_polynomial = minimal_polynomial


class UnderdeterminedNormalization(ChartError):
    def __init__(self, message, residual_group=None):
        super().__init__(message)
        self.residual_group = residual_group


class SingularChartJacobian(ChartError):
    pass


class IntegrabilityFailure(GFMError):
    pass


class ResonantShift(ChartError):
    pass


class BadBasePoint(ChartError):
    pass
