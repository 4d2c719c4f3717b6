"""Exception hierarchy.

Every error raised on purpose by the library derives from PinchflowError.
ValidationError marks bad input (CLI exit code 1) and NumericalFailure
marks a computation that could not be carried through (CLI exit code 2).
"""


class PinchflowError(Exception):
    """Base class for all library errors."""


class ValidationError(PinchflowError, ValueError):
    """Input violates a documented precondition."""


class NumericalFailure(PinchflowError, ArithmeticError):
    """A numerical procedure left its domain of validity."""


class IndexOutOfRange(ValidationError):
    pass


class StructureViolation(ValidationError):
    pass


class ShapeMismatch(ValidationError):
    pass


class ZeroVector(ValidationError):
    pass


class UnsupportedPoint(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class DimensionTooLarge(ValidationError):
    pass


class InvalidPinch(ValidationError):
    pass


class EpsOutOfRange(ValidationError):
    pass


class InvalidXi(ValidationError):
    pass


class AlphaOutOfWindow(ValidationError):
    pass


class DomainError(ValidationError):
    pass


class NegativeDiscriminant(ValidationError):
    pass


class NotUnimodular(ValidationError):
    pass


class InfeasibleKL(ValidationError):
    pass


class EmptySeries(ValidationError):
    pass


class UnstableStep(NumericalFailure):
    pass


class NonGraphical(NumericalFailure):
    pass
