"""Exception hierarchy shared by every module.

Each class maps to one CLI exit code (see :mod:`semiring_dp.cli`).
"""


class SemiringDPError(Exception):
    exit_code = 1


class UsageError(SemiringDPError, ValueError):
    """Wrong descriptor, unknown element, incompatible arguments."""

    exit_code = 2


class ParseError(UsageError):
    """Malformed input text. Carries an optional (line, column) position."""

    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class LegalityError(SemiringDPError):
    """A join/union expression or decomposition violates a structural rule."""

    exit_code = 3


class BudgetError(SemiringDPError):
    exit_code = 4


class CostOverflowError(SemiringDPError, OverflowError):
    """Tropical cost left the signed 64-bit range."""

    exit_code = 1
