"""Exception hierarchy shared by every pgclc module."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class SourceSpan:
    """Byte offsets ``[start, end)`` into the UTF-8 encoded source."""

    start: int
    end: int

    def __post_init__(self):
        if not 0 <= self.start <= self.end:
            raise ValueError(f"invalid span {self.start}..{self.end}")


class PgclError(Exception):
    """Base class for all errors raised by pgclc."""


class ParseError(PgclError):
    def __init__(self, message: str, span: SourceSpan | None = None):
        self.message = message
        self.span = span
        where = f" at bytes {span.start}..{span.end}" if span else ""
        super().__init__(f"{message}{where}")


class SemanticsError(PgclError):
    """An internal invariant of the semantics was violated (e.g. mass > 1)."""


class BackendError(PgclError):
    """An atomic program or condition could not be interpreted."""

    def __init__(self, message: str, config=None):
        self.config = config
        super().__init__(message)


class BudgetExceeded(PgclError):
    """A set-size, state-count or wall-time cap was hit."""

    def __init__(self, message: str, depth: int | None = None):
        self.depth = depth
        super().__init__(message)


class UnsupportedFormula(PgclError):
    """The formula lies outside the fragment the procedures can decide."""
