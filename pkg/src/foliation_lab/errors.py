"""Exception hierarchy.

Every error carries a ``code`` (the class name) so reports and the CLI can
emit a stable diagnostic identifier.
"""

from __future__ import annotations


class FoliationLabError(Exception):
    """Base class for all errors raised by this package."""

    @property
    def code(self) -> str:
        return type(self).__name__


class DegenerateMap(FoliationLabError, ValueError):
    pass


class InvalidRationalFunction(FoliationLabError, ValueError):
    pass


class RootFindingFailed(FoliationLabError, ArithmeticError):
    pass


class MultiplicityAmbiguous(FoliationLabError, ArithmeticError):
    pass


class NotProjectivelyInvariant(FoliationLabError, ValueError):
    pass


class NegativeSpeed(FoliationLabError, ValueError):
    pass


class NotTransverse(FoliationLabError, ValueError):
    pass


class NotTransverseAtPoint(FoliationLabError, ValueError):
    pass


class QuadratureNotConverged(FoliationLabError, ArithmeticError):
    pass


class TooCloseToDivisor(FoliationLabError, ValueError):
    pass


class OrbitNotClosed(FoliationLabError):
    """A divisor point is not periodic, so the scenario is outside the theorem's hypotheses."""


class InconsistentOrders(FoliationLabError):
    pass


class ContourThroughSingularity(FoliationLabError, ValueError):
    pass


class NotNearInteger(FoliationLabError, ArithmeticError):
    pass


class InvalidPatch(FoliationLabError, ValueError):
    pass


class NoDivisor(FoliationLabError, ValueError):
    pass


class ZeroInput(FoliationLabError, ValueError):
    pass


class FactorizationFailed(FoliationLabError, ArithmeticError):
    pass


class ParseError(FoliationLabError):
    def __init__(self, line: int | None, field: str, message: str = ""):
        self.line = line
        self.field = field
        where = f"line {line}" if line is not None else "document"
        super().__init__(f"{where}, field {field!r}: {message}".rstrip(": "))


class ValidationError(FoliationLabError):
    def __init__(self, field: str, reason: str, detail: str = ""):
        self.field = field
        self.reason = reason
        msg = f"{field}: {reason}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)
