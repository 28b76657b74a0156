"""Exceptions shared across modules (grid errors live in :mod:`lapoly.grid`)."""
from __future__ import annotations


class SingularOperatorError(ArithmeticError):
    """``P(A)`` (or a time-stepping matrix) has a vanishing eigenvalue."""

    def __init__(self, mode: int, multi_index: tuple[int, ...], value: float, what: str = "P(A)"):
        self.mode = mode
        self.multi_index = multi_index
        self.value = value
        super().__init__(f"{what} is singular: mode {mode} {multi_index} has eigenvalue {value:.6g}")


class SingularMatrixError(ArithmeticError):
    """Dense LU met a pivot below the singularity threshold."""

    def __init__(self, pivot_index: int, pivot: float):
        self.pivot_index = pivot_index
        self.pivot = pivot
        super().__init__(f"matrix is singular to working precision: pivot {pivot_index} = {pivot:.3g}")


class SizeGuardError(RuntimeError):
    """A dense operation was requested for more unknowns than the cap allows."""

    def __init__(self, n: int, limit: int, what: str = "dense matrix"):
        self.n = n
        self.limit = limit
        super().__init__(f"{what} with n = {n} unknowns exceeds the limit of {limit}")
