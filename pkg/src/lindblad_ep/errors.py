"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class LindbladEPError(Exception):
    """Base class for every error raised by this package."""


class NonHermitian(LindbladEPError):
    pass


class NotPSD(LindbladEPError):
    pass


class NonFiniteInput(LindbladEPError):
    pass


class DimensionMismatch(LindbladEPError):
    pass


class UnknownFrequency(LindbladEPError):
    pass


class MissingRates(LindbladEPError):
    pass


class NegativeTime(LindbladEPError):
    pass


class MultipleInvariantStates(LindbladEPError):
    pass


class NotFaithful(LindbladEPError):
    pass


class NotDiagonal(LindbladEPError):
    pass


class NumericalFailure(LindbladEPError):
    """A computed quantity missed its own residual check."""


class ComplexCoupling(LindbladEPError):
    pass


class RangeMismatch(LindbladEPError):
    pass


class DriftConditionFailed(LindbladEPError):
    pass


class NotAState(LindbladEPError):
    pass


class NonConvergent(LindbladEPError):
    pass


class InconsistentVerdicts(LindbladEPError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class HypothesisViolated(LindbladEPError):
    pass


class ParseError(LindbladEPError):
    def __init__(self, message, line=None, column=None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)
        self.line = line
        self.column = column


class ValidationError(LindbladEPError):
    def __init__(self, message, field=None):
        prefix = f"{field}: " if field else ""
        super().__init__(prefix + message)
        self.field = field


class UnsupportedFormat(LindbladEPError):
    pass
