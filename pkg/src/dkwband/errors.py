"""Exception types shared across the package.

Validation failures subclass ValueError so callers can catch them either way;
the CLI maps ``DkwbandError`` to exit code 2.
"""

from __future__ import annotations


class DkwbandError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(DkwbandError, ValueError):
    """Invalid argument or precondition violation."""


class EmptySample(ValidationError):
    """A sample was required to contain at least one value."""


class InvalidValue(ValidationError):
    """A sample value is non-finite or outside the model's support."""


class InvalidDelta(ValidationError):
    """delta outside the admissible range for the requested band/statistic."""


class InvalidInput(ValidationError):
    """Generic invalid argument."""


class OutOfRange(ValidationError):
    """An argument lies outside the validity range of a formula."""


class DeltaInfeasible(ValidationError):
    """No delta <= 1/4 achieves the requested failure probability."""


class DeltaMTooSmall(ValidationError):
    """delta * m below the working-regime threshold of the envelope."""


class ExactInfeasible(ValidationError):
    """Exact enumeration was requested beyond the feasible path count."""


class CalibrationFailed(DkwbandError):
    """Constant calibration found no admissible pair; carries the frontier."""

    def __init__(self, message: str, frontier=None):
        super().__init__(message)
        self.frontier = frontier


class IoError(DkwbandError):
    """Input file missing or unreadable."""


class ParseError(DkwbandError):
    """Malformed input file; reports the offending line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line
