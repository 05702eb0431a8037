"""Exception types shared across the package."""


class CircleDimError(Exception):
    """Base class for all package errors."""


class InvalidMap(CircleDimError, ValueError):
    pass


class UnboundedDistortion(CircleDimError, ArithmeticError):
    pass


class TooManyFixedPoints(CircleDimError):
    pass


class BudgetExceeded(CircleDimError):
    """An enumeration would exceed the caller-supplied word cap."""


class DegenerateFit(CircleDimError, ValueError):
    pass


class Unreliable(CircleDimError):
    """Cluster diagnostics failed for too many seeds."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NotContracting(CircleDimError):
    pass


class OverlapDetected(CircleDimError):
    pass


class NoBracket(CircleDimError):
    pass


class NotFound(CircleDimError):
    pass


class EmptySubsystem(CircleDimError):
    pass


class ConesOverlap(CircleDimError):
    pass


class UnknownFixture(CircleDimError, KeyError):
    pass


class PingpongViolation(CircleDimError):
    """A pingpong condition failed; ``condition`` is its index 1..6."""

    def __init__(self, condition: int, message: str, witness=None):
        super().__init__(f"condition ({condition}) violated: {message}")
        self.condition = condition
        self.witness = witness
