"""Scalar polynomials P(x) = b_0 + b_1 x + ... + b_m x^m applied to the Laplace matrix."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .grid import unflatten
from .spectrum import CACHE_LIMIT, Spectrum

REL_TOL = 1e-12


class PolynomialError(ValueError):
    pass


@dataclass(frozen=True)
class MatrixPolynomial:
    """Ascending coefficients; trailing zeros are trimmed at construction."""

    coeffs: tuple[float, ...]

    def __post_init__(self) -> None:
        c = [float(x) for x in self.coeffs]
        if not c or not all(np.isfinite(c)):
            raise PolynomialError("polynomial needs at least one finite coefficient")
        while len(c) > 1 and c[-1] == 0.0:
            c.pop()
        if c == [0.0]:
            raise PolynomialError("the zero polynomial is not allowed")
        object.__setattr__(self, "coeffs", tuple(c))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def parse(cls, text: str) -> "MatrixPolynomial":
        """Parse ``"b0,b1,..."``, e.g. ``"1,1,1"`` for I + A + A^2."""
        parts = [p.strip() for p in str(text).split(",")]
        try:
            coeffs = [float(p) for p in parts]
        except ValueError:
            raise PolynomialError(f"invalid polynomial {text!r}: expected comma-separated numbers") from None
        return cls(tuple(coeffs))

    def __call__(self, lam):
        return eval_poly(self, lam)

    def __str__(self) -> str:
        return ",".join(repr(c) for c in self.coeffs)


def eval_poly(P: MatrixPolynomial, lam):
    """Horner evaluation; works elementwise on arrays."""
    acc = P.coeffs[-1] * np.ones_like(lam, dtype=float) if isinstance(lam, np.ndarray) else P.coeffs[-1]
    for c in reversed(P.coeffs[:-1]):
        acc = acc * lam + c
    return acc


@dataclass(frozen=True)
class Certificate:
    """Outcome of :func:`certify_invertible`.

    ``mode`` is the 1-based flat mode index of the smallest ``|P(lambda)|``
    and ``value`` that smallest value; ``positive_coeffs`` records whether
    the cheap sufficient condition (no negative coefficient) holds.
    """

    ok: bool
    mode: int
    multi_index: tuple[int, ...]
    value: float
    max_abs: float
    positive_coeffs: bool


def poly_values(P: MatrixPolynomial, spectrum: Spectrum) -> np.ndarray:
    """``P(lambda_k)`` for every mode, shaped ``grid.N``."""
    return eval_poly(P, spectrum.eigenvalue_array())


def _min_max(P: MatrixPolynomial, spectrum: Spectrum) -> tuple[int, float, float]:
    """Flat 0-based index and signed value of the smallest |P|, and the largest |P|."""
    if spectrum.grid.n <= CACHE_LIMIT:
        vals = poly_values(P, spectrum).reshape(-1, order="F")
        i = int(np.argmin(np.abs(vals)))
        return i, float(vals[i]), float(np.abs(vals).max())
    last = spectrum.axes[-1]
    inner = spectrum.grid.n // last.N
    sub = spectrum.leading_eigenvalue_array()
    best_i, best, top = 0, np.inf, 0.0
    for s, lam_s in enumerate(last.eigenvalues):
        vals = eval_poly(P, sub + lam_s).reshape(-1, order="F")
        i = int(np.argmin(np.abs(vals)))
        if abs(vals[i]) < abs(best):
            best_i, best = s * inner + i, float(vals[i])
        top = max(top, float(np.abs(vals).max()))
    return best_i, best, top


def certify_invertible(P: MatrixPolynomial, spectrum: Spectrum) -> Certificate:
    """Check that ``P(A)`` is numerically nonsingular over ``spectrum``.

    Passes iff ``min |P(lambda)| > 1e-12 * max |P(lambda)|``.  Never raises.
    """
    i, smallest, largest = _min_max(P, spectrum)
    ok = abs(smallest) > REL_TOL * largest
    positive = all(c >= 0 for c in P.coeffs) and any(c > 0 for c in P.coeffs)
    return Certificate(
        ok=ok,
        mode=i + 1,
        multi_index=unflatten(spectrum.grid, i + 1),
        value=smallest,
        max_abs=largest,
        positive_coeffs=positive,
    )


def power_sum(coeffs: Sequence[float], lam: float) -> float:
    """Naive ``sum_j b_j lam^j``; used as a cross-check for Horner."""
    return float(sum(c * lam**j for j, c in enumerate(coeffs)))
