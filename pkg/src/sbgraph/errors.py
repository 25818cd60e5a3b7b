"""Exception hierarchy shared by every layer of the package."""

from __future__ import annotations

import os

DEFAULT_PIECE_LIMIT = 10_000


class SBGError(Exception):
    """Base class for all errors raised by sbgraph."""


class DimensionError(SBGError, ValueError):
    """Operands of different dimension were combined."""


class EmptyError(SBGError, ValueError):
    """An operation that needs at least one element got an empty operand."""


class PieceLimitError(SBGError):
    """A set or map grew past the configured piece ceiling."""


class MapInfPreconditionError(SBGError, ValueError):
    """A map handed to map_inf has a gain outside {0, 1} or increases some point."""


class ValidationError(SBGError, ValueError):
    """A graph failed validation; ``violations`` lists every problem found."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class ParseError(SBGError, ValueError):
    """Syntax or semantic error in a textual input, with a source location."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        if line is not None:
            message = f"{line}:{column}: {message}"
        super().__init__(message)


class UnboundParameterError(SBGError, KeyError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(name)

    def __str__(self) -> str:
        return f"unbound parameter {self.name!r}"


def piece_limit() -> int:
    """Current piece ceiling; ``SBG_PIECE_LIMIT`` overrides the default."""
    raw = os.environ.get("SBG_PIECE_LIMIT")
    if raw:
        return int(raw)
    return DEFAULT_PIECE_LIMIT


def check_piece_count(n: int, what: str = "set") -> None:
    limit = piece_limit()
    if n > limit:
        raise PieceLimitError(f"{what} has {n} pieces, limit is {limit}")
