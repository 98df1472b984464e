"""Exception types shared across the package."""

from __future__ import annotations

__all__ = [
    "StructuralError",
    "PatternError",
    "PreconditionError",
    "PoleError",
    "ConditioningError",
    "ConvergenceError",
    "NumericalError",
]


class StructuralError(ValueError):
    """Shapes, lengths or field values are inconsistent with the data model."""


class PatternError(ValueError):
    """A sign pattern fails the pairwise consistency (triangle) rule."""


class PreconditionError(ValueError):
    """An operation was called outside its documented domain."""


class PoleError(ArithmeticError):
    """An energy parameter sits too close to a resolvent pole."""


class ConditioningError(ArithmeticError):
    """A matrix is too close to singular for the requested operation."""


class ConvergenceError(ArithmeticError):
    """An iteration exceeded its budget.  Carries the best bracket found."""

    def __init__(self, message: str, bracket: tuple[float, float] | None = None):
        super().__init__(message)
        self.bracket = bracket


class NumericalError(ArithmeticError):
    """A delegated numerical routine failed to converge."""
