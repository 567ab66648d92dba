"""Exception hierarchy shared by every module."""

from __future__ import annotations


class PotentSplitError(Exception):
    """Base class for all library errors."""


class FieldMismatch(PotentSplitError, ValueError):
    pass


class DivisionByZero(PotentSplitError, ZeroDivisionError):
    pass


class InvalidField(PotentSplitError, ValueError):
    pass


class DimensionMismatch(PotentSplitError, ValueError):
    pass


class SingularMatrix(PotentSplitError, ArithmeticError):
    pass


class NotNonderogatory(PotentSplitError, ValueError):
    pass


class PreconditionViolated(PotentSplitError, ValueError):
    pass


class CompletionFailed(PotentSplitError):
    """No trailing p-potent block exists under the required boundary shape."""


class NoViableA(PotentSplitError):
    pass


class TripotencyFailed(PotentSplitError):
    pass


class TraceNotPrimeSubfield(PotentSplitError, ValueError):
    pass


class Unverifiable(PotentSplitError):
    pass


class SearchSpaceTooLarge(PotentSplitError, ValueError):
    pass


class ParseError(PotentSplitError, ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)
