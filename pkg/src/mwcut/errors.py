"""Exception hierarchy shared by every module of the package."""


class MwcError(Exception):
    """Base class for all package errors."""


class ValidationError(MwcError, ValueError):
    """Input failed a structural check."""


class NegativeCoordinate(ValidationError):
    pass


class SumNotOne(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class ZeroLengthSegment(ValidationError):
    pass


class UnalignedSegment(ValidationError):
    pass


class InvalidLabeling(ValidationError):
    pass


class UnknownEdge(ValidationError):
    pass


class NegativeWeight(ValidationError):
    pass


class MissingPoint(ValidationError):
    pass


class InvalidConfig(ValidationError):
    pass


class DomainError(ValidationError):
    pass


class BreakpointAtEvaluationPoint(DomainError):
    pass


class StraddlesCorner(DomainError):
    pass


class TooLarge(MwcError):
    """Instance exceeds the desk-scale limits of an exact routine."""


class LpFailed(MwcError):
    """The LP solver returned a non-optimal status."""

    def __init__(self, status, message=None):
        self.status = status
        super().__init__(message or f"LP solve failed with status {status}")
