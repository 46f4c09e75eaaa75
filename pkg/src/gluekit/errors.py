"""Exception types.

Every error carries an ``exit_code`` used by the command line driver:
1 input error, 2 domain precondition, 3 protocol/correction failure,
4 resource guard.
"""

from __future__ import annotations


class GluekitError(Exception):
    exit_code = 1


class InvalidTensor(GluekitError):
    exit_code = 1


class InvalidArg(GluekitError):
    exit_code = 1


class InvalidBasis(GluekitError):
    exit_code = 1


class DimensionMismatch(GluekitError):
    exit_code = 1


class CanonicalizationFailed(GluekitError):
    exit_code = 2


class NotCanonical(GluekitError):
    exit_code = 2


class NotUnitary(GluekitError):
    exit_code = 2


class NotCoprime(GluekitError):
    exit_code = 2


class NonAbelianBasis(GluekitError):
    exit_code = 2


class ConversionFailed(GluekitError):
    exit_code = 2


class EmptyFamily(GluekitError):
    exit_code = 2


class NotUniform(GluekitError):
    exit_code = 2


class RuleViolation(GluekitError):
    exit_code = 2


class NoPush(GluekitError):
    """A virtual operator does not push through the tensor.

    ``residual`` is the best residual found, kept for diagnostics.
    """

    exit_code = 3

    def __init__(self, message: str, residual: float = float("nan")):
        super().__init__(message)
        self.residual = residual


class DegenerateMeasurement(GluekitError):
    exit_code = 3


class CorrectionFailed(GluekitError):
    exit_code = 3


class TooLarge(GluekitError):
    exit_code = 4
