"""Spectral solves and inverse entries for ``P(A) x = b``.

Everything goes through the eigen-expansion: coefficients of ``b`` are
divided mode-wise by ``P(lambda)`` and synthesised back.  ``P(A)`` and its
inverse are never formed unless :func:`inverse_matrix` is called explicitly.
"""
from __future__ import annotations

import numpy as np

from .errors import SingularOperatorError, SizeGuardError
from .grid import BoundaryKind, Field, Grid, GridError, check_same_grid, make_grid, unflatten
from .polynomial import MatrixPolynomial, certify_invertible, eval_poly
from .spectrum import Spectrum, build_spectrum, scale_modes
from .transform import analyze_array, synthesize_array

FULL_INVERSE_LIMIT = 4096


def _certified_spectrum(grid: Grid, P: MatrixPolynomial) -> Spectrum:
    spectrum = build_spectrum(grid)
    cert = certify_invertible(P, spectrum)
    if not cert.ok:
        raise SingularOperatorError(cert.mode, cert.multi_index, cert.value)
    return spectrum


def solve(grid: Grid, P: MatrixPolynomial, b: Field, fast: bool = False) -> Field:
    """Solve ``P(A) x = b``.

    Raises :class:`SingularOperatorError` if ``P`` vanishes (relative to its
    largest value) on some eigenvalue, and
    :class:`~lapoly.grid.GridMismatchError` if ``b`` lives on another grid.
    """
    check_same_grid(grid, b.grid)
    spectrum = _certified_spectrum(grid, P)
    C = analyze_array(b.as_array(), spectrum, fast)
    C = scale_modes(spectrum, C, lambda lam: 1.0 / eval_poly(P, lam))
    return Field.from_array(synthesize_array(C, spectrum, fast), grid)


def _axis_indices(grid: Grid, flat: int) -> tuple[int, ...]:
    if not 1 <= flat <= grid.n:
        raise GridError(f"flat index {flat} out of range 1..{grid.n}")
    return unflatten(grid, flat)


def inverse_entry(grid: Grid, P: MatrixPolynomial, i: int, k: int) -> float:
    """Entry ``(i, k)`` (1-based flat indices) of ``P(A)^{-1}``.

    Computed as ``sum_m v_{m,i} v_{m,k} w_k / P(lambda_m)`` with the mode
    products built separably, O(n) work.
    """
    spectrum = _certified_spectrum(grid, P)
    ii = _axis_indices(grid, i)
    kk = _axis_indices(grid, k)
    prod = np.ones(())
    for ax, ip, kp in zip(spectrum.axes, ii, kk):
        col = ax.basis[:, ip - 1] * ax.basis[:, kp - 1] * ax.node_weight[kp - 1]
        prod = np.multiply.outer(prod, col)
    return float(np.sum(prod / eval_poly(P, spectrum.eigenvalue_array())))


def inverse_column(grid: Grid, P: MatrixPolynomial, k: int) -> Field:
    """Column ``k`` of ``P(A)^{-1}``, i.e. the solution for ``b = e_k``."""
    return solve(grid, P, Field.basis(grid, k))


def inverse_matrix(grid: Grid, P: MatrixPolynomial) -> np.ndarray:
    """Dense ``P(A)^{-1}``; refuses grids with more than 4096 unknowns."""
    if grid.n > FULL_INVERSE_LIMIT:
        raise SizeGuardError(grid.n, FULL_INVERSE_LIMIT, "full inverse")
    spectrum = _certified_spectrum(grid, P)
    # columns of the identity, transformed as a batch along a trailing axis
    E = np.eye(grid.n).reshape(grid.N + (grid.n,), order="F")
    C = analyze_array(E, spectrum)
    C = C / eval_poly(P, spectrum.eigenvalue_array())[..., None]
    X = synthesize_array(C, spectrum)
    return X.reshape(grid.n, grid.n, order="F")


def inverse_1d_closed_form(N: int, i: int, k: int) -> float:
    """Closed-form ``(A^{-1})_{ik} = h^2 ((N+1-k)/(N+1) i - (i-k)_+)`` for the 1D Dirichlet matrix."""
    if N < 1 or not (1 <= i <= N and 1 <= k <= N):
        raise GridError(f"indices ({i}, {k}) out of range 1..{N}")
    h = 1.0 / (N + 1)
    return h * h * ((N + 1 - k) / (N + 1) * i - max(i - k, 0))


def dirichlet_grid(*N: int) -> Grid:
    """Shorthand for an all-Dirichlet grid."""
    return make_grid(len(N), N, [BoundaryKind.DIRICHLET] * len(N))
