"""Shared enums and exception types."""

from __future__ import annotations

from enum import IntEnum


class Level(IntEnum):
    """Incremental evaluation depth: value, value+gradient, value+gradient+Hessian."""

    F = 0
    FG = 1
    FGH = 2

    @classmethod
    def coerce(cls, level: "Level | int | str") -> "Level":
        if isinstance(level, str):
            return cls[level.upper()]
        return cls(int(level))


class GlmfabError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(GlmfabError, ValueError):
    """Operands have incompatible shapes."""


class DomainError(GlmfabError, ValueError):
    """An argument lies outside the domain of the function.

    ``index`` names the offending observation when there is one.
    """

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class NumericalError(GlmfabError, ArithmeticError):
    """A numerical procedure could not produce a finite answer."""


class SpecError(GlmfabError, ValueError):
    """A model specification or input file is invalid."""
