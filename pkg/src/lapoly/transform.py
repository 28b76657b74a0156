"""Separable sine transforms between nodal values and mode coefficients.

The reference path applies the dense ``N_p x N_p`` eigenvector matrix along
each axis in turn.  The fast path uses scipy's real-to-real transforms: DST-I
for Dirichlet axes, DST-III (analysis) and DST-II (synthesis) for mixed axes.
Both paths share the same normalisation, so ``synthesize`` inverts ``analyze``
exactly in either mode.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
import scipy.fft

from .grid import BoundaryKind, Field, Grid, GridMismatchError, check_same_grid
from .spectrum import AxisSpectrum, Spectrum


@dataclass(frozen=True, eq=False)
class CoefficientTensor:
    """Mode coefficients in flat mode-index order (same convention as Field)."""

    values: np.ndarray
    grid: Grid

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float).reshape(-1)
        if values.size != self.grid.n:
            raise GridMismatchError(f"{values.size} coefficients for a grid with {self.grid.n} modes")
        object.__setattr__(self, "values", values)

    def as_array(self) -> np.ndarray:
        return self.values.reshape(self.grid.N, order="F")

    @classmethod
    def from_array(cls, array: np.ndarray, grid: Grid) -> "CoefficientTensor":
        return cls(np.asarray(array).reshape(-1, order="F"), grid)


def _workers() -> int | None:
    raw = os.environ.get("LAPOLY_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        return None
    return n if n > 0 else None


def _apply_along(M: np.ndarray, X: np.ndarray, axis: int) -> np.ndarray:
    Y = np.tensordot(M, X, axes=([1], [axis]))
    return np.moveaxis(Y, 0, axis)


def _fast_analyze_axis(ax: AxisSpectrum, X: np.ndarray, axis: int) -> np.ndarray:
    if ax.bc is BoundaryKind.DIRICHLET:
        y = scipy.fft.dst(X, type=1, axis=axis, workers=_workers())
    else:
        y = scipy.fft.dst(X, type=3, axis=axis, workers=_workers())
    return 0.5 * ax.norm_factor * y


def _fast_synthesize_axis(ax: AxisSpectrum, C: np.ndarray, axis: int) -> np.ndarray:
    if ax.bc is BoundaryKind.DIRICHLET:
        y = scipy.fft.dst(C, type=1, axis=axis, workers=_workers())
    else:
        y = scipy.fft.dst(C, type=2, axis=axis, workers=_workers())
    return 0.5 * ax.norm_factor * y


def analyze_array(X: np.ndarray, spectrum: Spectrum, fast: bool = False) -> np.ndarray:
    """Coefficients of a ``grid.N``-shaped nodal array (returns the same shape)."""
    out = np.asarray(X, dtype=float)
    for p, ax in enumerate(spectrum.axes):
        if fast:
            out = _fast_analyze_axis(ax, out, p)
        else:
            out = _apply_along(ax.analysis_matrix, out, p)
    return out


def synthesize_array(C: np.ndarray, spectrum: Spectrum, fast: bool = False) -> np.ndarray:
    """Nodal values of a ``grid.N``-shaped coefficient array."""
    out = np.asarray(C, dtype=float)
    for p, ax in enumerate(spectrum.axes):
        if fast:
            out = _fast_synthesize_axis(ax, out, p)
        else:
            out = _apply_along(ax.basis.T, out, p)
    return out


def analyze(field: Field, spectrum: Spectrum, fast: bool = False) -> CoefficientTensor:
    """Expansion coefficients ``beta_k = sum_j w_j b_j v_{k,j}`` of a field."""
    check_same_grid(field.grid, spectrum.grid)
    return CoefficientTensor.from_array(analyze_array(field.as_array(), spectrum, fast), field.grid)


def synthesize(coeffs: CoefficientTensor, spectrum: Spectrum, fast: bool = False) -> Field:
    """Field ``x_j = sum_k c_k v_{k,j}``; exact inverse of :func:`analyze`."""
    check_same_grid(coeffs.grid, spectrum.grid)
    return Field.from_array(synthesize_array(coeffs.as_array(), spectrum, fast), coeffs.grid)
