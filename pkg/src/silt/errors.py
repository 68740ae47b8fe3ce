"""Shared exception types."""
from __future__ import annotations

__all__ = ["LawError", "BudgetError"]


class LawError(ValueError):
    """A step-law or renewal-law description fails validation."""


class BudgetError(RuntimeError):
    """A numerical budget (mass deficit, cap, tolerance) cannot be met."""
