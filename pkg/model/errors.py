"""
Exception hierarchy for the lethargy application.
Every numerical service raises one of these so the CLI can map them to exit codes.
"""

from typing import Any, Dict, List, Optional


class LethargyError(Exception):
    """Base class for all application errors."""

    exit_code: int = 3


class DimensionMismatchError(LethargyError, ValueError):
    """Raised when a point, functional or basis does not match the space dimension."""

    exit_code = 2

    def __init__(self, expected: int, actual: int, what: str = "vector"):
        self.expected = expected
        self.actual = actual
        super().__init__(f"{what} has dimension {actual}, expected {expected}")


class DegenerateInputError(LethargyError, ValueError):
    """Raised for inputs outside an operation's domain (zero vectors, points inside a span, ...)."""

    exit_code = 2


class ChainValidationError(LethargyError):
    """Raised when a chain fails validation before a construction runs."""

    exit_code = 2

    def __init__(self, report: Any):
        self.report = report
        failures = "; ".join(getattr(report, "failures", []) or [])
        super().__init__(f"chain validation failed: {failures}")


class SolverError(LethargyError):
    """Raised when an iterative solver exhausts its budget."""

    exit_code = 3

    def __init__(self, message: str, achieved_gap: Optional[float] = None):
        self.achieved_gap = achieved_gap
        if achieved_gap is not None:
            message = f"{message} (achieved gap {achieved_gap:.3e})"
        super().__init__(message)


class BracketError(LethargyError):
    """Raised when an intermediate-value bracket does not straddle its target."""

    exit_code = 3

    def __init__(self, lo: float, hi: float, g_lo: float, g_hi: float, target: float):
        self.lo = lo
        self.hi = hi
        self.g_lo = g_lo
        self.g_hi = g_hi
        self.target = target
        super().__init__(
            f"bracket [{lo:.6g}, {hi:.6g}] does not straddle target {target:.6g}: "
            f"g(lo)={g_lo:.6g}, g(hi)={g_hi:.6g}"
        )


class ProblemParseError(LethargyError, ValueError):
    """Raised when a problem file cannot be parsed or fails semantic validation."""

    exit_code = 2

    def __init__(
        self,
        message: str,
        line: Optional[int] = None,
        column: Optional[int] = None,
        field_errors: Optional[List[Dict[str, str]]] = None,
    ):
        self.line = line
        self.column = column
        self.field_errors = field_errors or []
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
