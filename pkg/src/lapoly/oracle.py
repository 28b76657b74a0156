"""Dense brute-force ground truth.

Nothing here uses the closed-form eigenpairs: the Laplace matrix is assembled
entry by entry from the stencil, ``P(A)`` by matrix Horner, and systems are
solved by LU with partial pivoting.  The analytic sums that appear in the
1D consistency proof are provided together with their direct summations.
"""
from __future__ import annotations

import math
import warnings
from fractions import Fraction

import numpy as np
import scipy.linalg

from .errors import SingularMatrixError, SizeGuardError
from .grid import BoundaryKind, Grid
from .polynomial import MatrixPolynomial

DENSE_LIMIT = 4096
PIVOT_TOL = 1e-13
REFINE_MAX_ITER = 10


def _guard(n: int) -> None:
    if n > DENSE_LIMIT:
        raise SizeGuardError(n, DENSE_LIMIT)


def assemble_axis(N: int, h: float, bc: BoundaryKind) -> np.ndarray:
    """1D stencil matrix ``(-1, 2, -1)/h^2``; ghost-point last row for a Neumann end."""
    A = np.zeros((N, N))
    for j in range(N):
        A[j, j] = 2.0
        if j > 0:
            A[j, j - 1] = -1.0
        if j < N - 1:
            A[j, j + 1] = -1.0
    if bc is BoundaryKind.DIRICHLET_NEUMANN:
        # ghost value u_{N+1} = u_{N-1}; for N = 1 that is the Dirichlet zero
        if N > 1:
            A[N - 1, N - 2] = -2.0
    elif bc is not BoundaryKind.DIRICHLET:
        raise ValueError(f"unsupported boundary kind {bc!r}")
    # spacings are 1/(N+1) or 1/N; scale by the exact integer 1/h^2 so A holds no rounding
    inv = round(1.0 / h)
    if abs(inv * h - 1.0) < 1e-12:
        return A * float(inv * inv)
    return A / h**2


def assemble_laplacian(grid: Grid) -> np.ndarray:
    """Dense ``A = sum_p I x ... x A_p x ... x I`` in flat-index order (axis 1 fastest)."""
    _guard(grid.n)
    A = np.zeros((grid.n, grid.n))
    for p in range(grid.d):
        term = np.ones((1, 1))
        # kron(B, C) puts C's index fastest, so build from the slowest axis down
        for q in reversed(range(grid.d)):
            if q == p:
                factor = assemble_axis(grid.N[q], grid.h[q], grid.bc[q])
            else:
                factor = np.eye(grid.N[q])
            term = np.kron(term, factor)
        A += term
    return A


def assemble_poly(A: np.ndarray, P: MatrixPolynomial) -> np.ndarray:
    """``P(A)`` by Horner: ``(...(b_m A + b_{m-1} I) A + ...) + b_0 I``."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    n = A.shape[0]
    _guard(n)
    eye = np.eye(n)
    if P.degree == 0:
        return P.coeffs[0] * eye
    # the first Horner step needs no product: b_m A + b_{m-1} I
    M = P.coeffs[-1] * A + P.coeffs[-2] * eye
    for c in reversed(P.coeffs[:-2]):
        M = M @ A + c * eye
    return M


def lu_factor(M: np.ndarray):
    """LU with partial pivoting; raises :class:`SingularMatrixError` on a tiny pivot."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    _guard(M.shape[0])
    scale = np.abs(M).sum(axis=1).max() if M.size else 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(M, check_finite=True)
    pivots = np.abs(np.diag(lu))
    bad = np.nonzero(pivots <= PIVOT_TOL * scale)[0]
    if bad.size:
        i = int(bad[0])
        raise SingularMatrixError(i + 1, float(np.diag(lu)[i]))
    return lu, piv


def dense_solve(M: np.ndarray, b: np.ndarray) -> np.ndarray:
    lu = lu_factor(M)
    return scipy.linalg.lu_solve(lu, np.asarray(b, dtype=float))


def dense_invert(M: np.ndarray) -> np.ndarray:
    """Inverse via one factorisation and ``n`` solves against the basis vectors."""
    lu = lu_factor(M)
    return scipy.linalg.lu_solve(lu, np.eye(np.asarray(M).shape[0]))


def _dyadic_ints(values) -> tuple[list[int], int]:
    """Integers ``m`` and a common power-of-two ``D`` with ``values == m / D`` exactly."""
    ratios = [float(v).as_integer_ratio() for v in values]
    D = max(den for _, den in ratios)
    return [num * (D // den) for num, den in ratios], D


def exact_residual(A: np.ndarray, P: MatrixPolynomial, b: np.ndarray, x: np.ndarray) -> np.ndarray:
    """``b - P(A) x`` evaluated in exact integer arithmetic, then rounded once.

    Requires an integer-valued ``A``, which holds for every grid here since
    ``1/h^2`` is an integer.  Doubles are dyadic rationals, so the products
    never round and the cancellation inside ``P(A) x`` costs nothing.
    """
    A = np.asarray(A, dtype=float)
    if not np.array_equal(A, np.rint(A)):
        raise ValueError("exact residual needs an integer-valued matrix")
    rows, cols = np.nonzero(A)
    entries = [(int(r), int(c), int(A[r, c])) for r, c in zip(rows, cols)]
    n = A.shape[0]

    def matvec(v: list[int]) -> list[int]:
        out = [0] * n
        for r, c, a in entries:
            out[r] += a * v[c]
        return out

    X, Dx = _dyadic_ints(x)
    B, Dc = _dyadic_ints(P.coeffs)
    y = [B[-1] * xi for xi in X]
    for Bj in reversed(B[:-1]):
        y = [u + Bj * xi for u, xi in zip(matvec(y), X)]
    scale = Dx * Dc
    return np.array([float(Fraction(bi) - Fraction(yi, scale)) for bi, yi in zip(np.asarray(b, dtype=float), y)])


def refined_solve(A: np.ndarray, P: MatrixPolynomial, b: np.ndarray, max_iter: int = REFINE_MAX_ITER) -> np.ndarray:
    """Dense LU solve of ``P(A) x = b`` polished by iterative refinement.

    The residual is exact, so refinement converges to full working accuracy
    whenever ``cond(P(A)) * eps`` is well below one, even when the plain LU
    answer has lost many digits.
    """
    lu = lu_factor(assemble_poly(A, P))
    b = np.asarray(b, dtype=float)
    x = scipy.linalg.lu_solve(lu, b)
    for _ in range(max_iter):
        dx = scipy.linalg.lu_solve(lu, exact_residual(A, P, b, x))
        x = x + dx
        if np.max(np.abs(dx)) <= np.finfo(float).eps * np.max(np.abs(x)):
            break
    return x


def dense_spectral_solve(grid: Grid, P: MatrixPolynomial, b: np.ndarray, refine: bool = False) -> np.ndarray:
    """Convenience: assemble ``P(A)`` for ``grid`` and solve densely.

    With ``refine`` the LU answer is polished against the exact residual, which
    matters once ``P(A)`` is badly conditioned (high degree on fine 1D grids).
    """
    A = assemble_laplacian(grid)
    if refine:
        return refined_solve(A, P, b)
    return dense_solve(assemble_poly(A, P), b)


# --- analytic sums ---------------------------------------------------------


def weighted_geometric_sum(n: int, z: float) -> float:
    """``s_n(z) = sum_{k=1}^n k z^k`` in closed form."""
    if z == 1:
        return 0.5 * n * (n + 1)
    return z * (1 - (n + 1) * z**n + n * z ** (n + 1)) / (1 - z) ** 2


def _check_pole(x: float) -> float:
    s = math.sin(x / 2)
    if abs(s) < 1e-12:
        raise ValueError(f"x = {x!r} is a multiple of 2*pi")
    return 4 * s * s


def weighted_sine_sum(n: int, x: float) -> float:
    """``sum_{k=1}^n k sin(kx)`` in closed form; undefined at multiples of 2 pi."""
    denom = _check_pole(x)
    return ((n + 1) * math.sin(n * x) - n * math.sin((n + 1) * x)) / denom


def weighted_cosine_sum(n: int, x: float) -> float:
    """``sum_{k=1}^n k cos(kx)`` in closed form; undefined at multiples of 2 pi."""
    denom = _check_pole(x)
    return ((n + 1) * math.cos(n * x) - n * math.cos((n + 1) * x) - 1) / denom


def shifted_sine_sum(n: int, k: int, l: int) -> float:
    """Closed form of ``sum_{j=1}^n (j-k)_+ sin(j l pi h)`` with ``h = 1/(n+1)``."""
    h = 1.0 / (n + 1)
    t = l * math.pi * h
    return ((n - k + 1) * math.sin(n * t) - math.sin(k * t)) / (4 * math.sin(t / 2) ** 2)


def direct_weighted_geometric_sum(n: int, z: float) -> float:
    return math.fsum(k * z**k for k in range(1, n + 1))


def direct_weighted_sine_sum(n: int, x: float) -> float:
    return math.fsum(k * math.sin(k * x) for k in range(1, n + 1))


def direct_weighted_cosine_sum(n: int, x: float) -> float:
    return math.fsum(k * math.cos(k * x) for k in range(1, n + 1))


def direct_shifted_sine_sum(n: int, k: int, l: int) -> float:
    h = 1.0 / (n + 1)
    return math.fsum(max(j - k, 0) * math.sin(j * l * math.pi * h) for j in range(1, n + 1))
