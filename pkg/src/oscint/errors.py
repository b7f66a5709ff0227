"""Exception hierarchy.

Every error raised on purpose by the library derives from `OscintError` and
carries the process exit code the CLI maps it to: 1 for invalid input, 2 for
numerical failure.
"""

from __future__ import annotations


class OscintError(Exception):
    exit_code: int = 1


class InvalidInputError(OscintError, ValueError):
    """The caller asked for something outside the valid domain."""

    exit_code = 1


class NonConvexError(InvalidInputError):
    pass


class DimensionMismatchError(InvalidInputError):
    pass


class BudgetExceededError(InvalidInputError):
    pass


class JetOverflowError(InvalidInputError):
    pass


class BadJetError(InvalidInputError):
    pass


class NotCriticalError(InvalidInputError):
    pass


class InvalidOrderError(InvalidInputError):
    pass


class OutOfRangeError(InvalidInputError):
    pass


class CurveFormatError(InvalidInputError):
    pass


class InadmissibleError(InvalidInputError):
    pass


class ConfigError(InvalidInputError):
    pass


class OutputError(OscintError):
    """The report could not be written."""

    exit_code = 1


class NumericalError(OscintError, ArithmeticError):
    """A computation ran but did not produce a trustworthy answer."""

    exit_code = 2


class QuadratureFailureError(NumericalError):
    pass


class NoDipFoundError(NumericalError):
    pass


class IllConditionedError(NumericalError):
    pass


class DegenerateModeError(NumericalError):
    pass


class CheckFailedError(NumericalError):
    pass
