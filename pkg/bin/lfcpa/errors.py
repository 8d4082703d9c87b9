"""Exception classes shared by the analyzer. Problems with the analyzed
program are `ValueError` subclasses that carry the source position; problems
inside the analyzer itself are `RuntimeError` subclasses."""

from typing import Self


class ProgramError(ValueError):
    """Base class for errors in the program being analyzed."""

    def __init__(
        self: Self, message: str, line: int | None = None,
        column: int | None = None
    ) -> None:
        self.message = message
        self.line = line
        self.column = column
        super().__init__(self.describe())

    def describe(self: Self) -> str:
        """Render the message with its position, when one is known."""

        if self.line is None:
            return self.message
        if self.column is None:
            return f'line {self.line}: {self.message}'

        return f'line {self.line}, column {self.column}: {self.message}'


class ParseError(ProgramError):
    """A lexical or syntactic error."""


class TypeCheckError(ProgramError):
    """A declaration, typing or program-structure error."""


class AnalysisError(RuntimeError):
    """An internal failure of the analysis (a broken contract or a guard
    that should never trigger)."""
