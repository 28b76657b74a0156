"""Closed-form eigenpairs of the finite-difference Laplace matrix.

Per axis the discrete operator is the 3-point stencil ``(-1, 2, -1)/h^2``.
Dirichlet axes use the sampled sine modes ``sin(k pi j h)``.  Mixed axes
(Dirichlet at 0, Neumann at 1) use ghost-point reflection at the Neumann node,
which makes the last row ``(-2, 2)/h^2`` and admits the modes
``sin((2k-1) pi j h / 2)`` exactly.  That matrix is not symmetric, but it is
self-adjoint under the inner product with weight 1/2 on the Neumann node, so
eigenvectors are normalised in that weighted norm.

The d-dimensional operator is the Kronecker sum of the axis operators:
eigenvalues add and eigenvectors multiply.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .grid import BoundaryKind, Grid, GridError


def axis_eigenvalue(k: int, N: int, h: float, bc: BoundaryKind = BoundaryKind.DIRICHLET) -> float:
    """Eigenvalue ``lambda_k`` (k = 1..N) of the 1D Laplace matrix."""
    if not 1 <= k <= N:
        raise GridError(f"mode {k} out of range 1..{N}")
    if bc is BoundaryKind.DIRICHLET:
        return 4.0 / h**2 * math.sin(k * math.pi * h / 2) ** 2
    return 4.0 / h**2 * math.sin((2 * k - 1) * math.pi * h / 4) ** 2


def _norm_factor(N: int, bc: BoundaryKind) -> float:
    # Dirichlet: sum_j sin^2(k pi j h) = (N+1)/2; mixed: weighted sum = N/2
    if bc is BoundaryKind.DIRICHLET:
        return math.sqrt(2.0 / (N + 1))
    return math.sqrt(2.0 / N)


def axis_eigvec_entry(k: int, j: int, N: int, h: float, bc: BoundaryKind = BoundaryKind.DIRICHLET) -> float:
    """Entry ``j`` of the normalised eigenvector ``k`` (both 1-based)."""
    if not (1 <= k <= N and 1 <= j <= N):
        raise GridError(f"mode/node ({k}, {j}) out of range 1..{N}")
    return float(_norm_factor(N, bc) * _sine_table(np.array([k]), np.array([j]), N, bc)[0])


def _sine_table(k: np.ndarray, j: np.ndarray, N: int, bc: BoundaryKind) -> np.ndarray:
    """Unnormalised mode values ``sin(k pi j h)`` (or the half-shifted variant), broadcast over k, j.

    The integer phase is reduced modulo the period first, so the sine never
    sees an argument larger than 2 pi.
    """
    if bc is BoundaryKind.DIRICHLET:
        period = 2 * (N + 1)
        return np.sin(np.pi * ((k * j) % period) / (N + 1))
    period = 4 * N
    return np.sin(np.pi * (((2 * k - 1) * j) % period) / (2 * N))


@dataclass(frozen=True, eq=False)
class AxisSpectrum:
    """Eigenvalues, normalisation and node weights for one axis."""

    N: int
    h: float
    bc: BoundaryKind
    eigenvalues: np.ndarray = field(repr=False)
    norm_factor: float
    node_weight: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, N: int, h: float, bc: BoundaryKind) -> "AxisSpectrum":
        k = np.arange(1, N + 1)
        if bc is BoundaryKind.DIRICHLET:
            lam = 4.0 / h**2 * np.sin(k * np.pi * h / 2) ** 2
        else:
            lam = 4.0 / h**2 * np.sin((2 * k - 1) * np.pi * h / 4) ** 2
        weight = np.ones(N)
        if bc is BoundaryKind.DIRICHLET_NEUMANN:
            weight[-1] = 0.5
        lam.setflags(write=False)
        weight.setflags(write=False)
        return cls(N=N, h=h, bc=bc, eigenvalues=lam, norm_factor=_norm_factor(N, bc), node_weight=weight)

    @functools.cached_property
    def basis(self) -> np.ndarray:
        """Matrix ``V`` with ``V[k-1, j-1] = v_{k,j}``; rows are eigenvectors."""
        k = np.arange(1, self.N + 1)[:, None]
        j = np.arange(1, self.N + 1)[None, :]
        V = self.norm_factor * _sine_table(k, j, self.N, self.bc)
        V.setflags(write=False)
        return V

    @functools.cached_property
    def analysis_matrix(self) -> np.ndarray:
        """``V W``: maps nodal values to coefficients."""
        M = self.basis * self.node_weight[None, :]
        M.setflags(write=False)
        return M

    def eigenvector(self, k: int) -> np.ndarray:
        return np.array(self.basis[k - 1])


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Per-axis spectra of a grid; d-dimensional quantities are formed on demand."""

    grid: Grid
    axes: tuple[AxisSpectrum, ...]

    def eigenvalue_array(self) -> np.ndarray:
        """All eigenvalues shaped ``grid.N`` (mode index order, axis 1 first)."""
        total = np.zeros(self.grid.N)
        for p, ax in enumerate(self.axes):
            shape = [1] * self.grid.d
            shape[p] = ax.N
            total = total + ax.eigenvalues.reshape(shape)
        return total

    def leading_eigenvalue_array(self) -> np.ndarray:
        """Kronecker sum over all axes but the last, shaped ``grid.N[:-1]``."""
        total = np.zeros(self.grid.N[:-1])
        for p, ax in enumerate(self.axes[:-1]):
            shape = [1] * (self.grid.d - 1)
            shape[p] = ax.N
            total = total + ax.eigenvalues.reshape(shape)
        return total

    def eigenvalues_flat(self) -> np.ndarray:
        return self.eigenvalue_array().reshape(-1, order="F")

    def weight_array(self) -> np.ndarray:
        """Node weights shaped ``grid.N`` (product of per-axis weights)."""
        total = np.ones(self.grid.N)
        for p, ax in enumerate(self.axes):
            shape = [1] * self.grid.d
            shape[p] = ax.N
            total = total * ax.node_weight.reshape(shape)
        return total

    @property
    def min_eigenvalue(self) -> float:
        return float(sum(ax.eigenvalues[0] for ax in self.axes))

    @property
    def max_eigenvalue(self) -> float:
        return float(sum(ax.eigenvalues[-1] for ax in self.axes))


@functools.lru_cache(maxsize=64)
def build_spectrum(grid: Grid) -> Spectrum:
    axes = tuple(AxisSpectrum.build(N, h, bc) for N, h, bc in zip(grid.N, grid.h, grid.bc))
    return Spectrum(grid=grid, axes=axes)


def _check_multi(spectrum: Spectrum, idx: Sequence[int], what: str) -> None:
    if len(idx) != spectrum.grid.d:
        raise GridError(f"{what} needs {spectrum.grid.d} indices, got {len(idx)}")
    for i, ax in zip(idx, spectrum.axes):
        if not 1 <= i <= ax.N:
            raise GridError(f"{what} {tuple(idx)} out of range for grid {spectrum.grid.N}")


def eigenvalue_nd(spectrum: Spectrum, kvec: Sequence[int]) -> float:
    """Eigenvalue of mode ``kvec``: sum of the axis eigenvalues."""
    _check_multi(spectrum, kvec, "mode")
    return float(sum(ax.eigenvalues[k - 1] for k, ax in zip(kvec, spectrum.axes)))


def eigvec_entry_nd(spectrum: Spectrum, kvec: Sequence[int], jvec: Sequence[int]) -> float:
    """Entry at node ``jvec`` of the normalised eigenvector for mode ``kvec``."""
    _check_multi(spectrum, kvec, "mode")
    _check_multi(spectrum, jvec, "node")
    return float(math.prod(ax.basis[k - 1, j - 1] for k, j, ax in zip(kvec, jvec, spectrum.axes)))


# n above which mode-wise factors are formed one slowest-axis slice at a time
CACHE_LIMIT = 2**20


def scale_modes(spectrum: Spectrum, C: np.ndarray, factor) -> np.ndarray:
    """Multiply a ``grid.N``-shaped coefficient array by ``factor(lambda)`` per mode."""
    if spectrum.grid.n <= CACHE_LIMIT or spectrum.grid.d == 1:
        return C * factor(spectrum.eigenvalue_array())
    leading = spectrum.leading_eigenvalue_array()
    out = np.empty_like(C, dtype=float)
    for s, lam_s in enumerate(spectrum.axes[-1].eigenvalues):
        out[..., s] = C[..., s] * factor(leading + lam_s)
    return out
