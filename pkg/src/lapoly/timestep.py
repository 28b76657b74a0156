"""Closed-form time stepping for ``u' + P(A) u = 0``.

Each mode is multiplied by its per-step amplification factor raised to the
step count, so the cost of reaching step ``tau`` does not depend on ``tau``.
The iterative oracle performs the literal step-by-step dense solves.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import SingularOperatorError
from .grid import Field, Grid, check_same_grid, unflatten
from .oracle import assemble_laplacian, assemble_poly, dense_solve
from .polynomial import MatrixPolynomial, eval_poly
from .spectrum import Spectrum, build_spectrum, scale_modes
from .transform import analyze_array, synthesize_array

BINOMIAL_MAX_STEPS = 30
_LOG_TINY = math.log(np.finfo(float).tiny)


class Scheme(enum.Enum):
    BACKWARD_EULER = "be"
    TRAPEZOIDAL = "trapezoidal"

    @classmethod
    def parse(cls, value: "str | Scheme") -> "Scheme":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "-")
        aliases = {
            "be": cls.BACKWARD_EULER,
            "backward-euler": cls.BACKWARD_EULER,
            "euler": cls.BACKWARD_EULER,
            "trapezoidal": cls.TRAPEZOIDAL,
            "crank-nicolson": cls.TRAPEZOIDAL,
            "cn": cls.TRAPEZOIDAL,
        }
        if key not in aliases:
            raise ValueError(f"unknown time scheme {value!r} (expected 'be' or 'trapezoidal')")
        return aliases[key]


def _denominator(scheme: Scheme, dt: float, mu):
    if scheme is Scheme.BACKWARD_EULER:
        return 1.0 + dt * mu
    return 1.0 + 0.5 * dt * mu


def amplification(scheme: Scheme, dt: float, mu):
    """Per-step factor: ``1/(1+dt mu)`` (BE) or ``(1-dt mu/2)/(1+dt mu/2)``.

    ``mu`` is ``P(lambda)`` for a mode and may be an array.
    """
    scheme = Scheme.parse(scheme)
    den = _denominator(scheme, dt, mu)
    if np.any(np.asarray(den) == 0):
        raise ZeroDivisionError(f"amplification factor has a zero denominator (dt={dt}, scheme={scheme.value})")
    if scheme is Scheme.BACKWARD_EULER:
        return 1.0 / den
    return (1.0 - 0.5 * dt * mu) / den


def step_power(g, tau: int) -> np.ndarray:
    """``g**tau`` elementwise, with results below the smallest normal double set to zero.

    libm's ``pow`` takes a slow path when the result underflows, which would
    make large ``tau`` measurably dearer; skipping those modes keeps the cost flat.
    """
    g = np.asarray(g, dtype=float)
    if tau == 0:
        return np.ones_like(g)
    with np.errstate(divide="ignore"):
        keep = tau * np.log(np.abs(g)) > _LOG_TINY
    out = np.zeros_like(g)
    out[keep] = np.power(g[keep], tau)
    return out


@dataclass(frozen=True)
class EvolutionSpec:
    scheme: Scheme
    dt: float
    steps: int
    operator: MatrixPolynomial = field(default_factory=lambda: MatrixPolynomial((0.0, 1.0)))

    def __post_init__(self) -> None:
        object.__setattr__(self, "scheme", Scheme.parse(self.scheme))
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError(f"time step must be positive, got {self.dt!r}")
        if isinstance(self.steps, bool) or int(self.steps) != self.steps or self.steps < 0:
            raise ValueError(f"step count must be a non-negative integer, got {self.steps!r}")
        object.__setattr__(self, "steps", int(self.steps))

    def certify(self, spectrum: Spectrum) -> None:
        """Raise :class:`SingularOperatorError` if a step matrix is singular on ``spectrum``."""
        den = _denominator(self.scheme, self.dt, eval_poly(self.operator, spectrum.eigenvalue_array()))
        flat = np.abs(den).reshape(-1, order="F")
        i = int(np.argmin(flat))
        if flat[i] <= 1e-12 * max(1.0, float(flat.max())):
            raise SingularOperatorError(i + 1, unflatten(spectrum.grid, i + 1), float(flat[i]), "time-step matrix")


@dataclass(frozen=True)
class SnapshotPlan:
    steps: tuple[int, ...]

    def __post_init__(self) -> None:
        s = tuple(sorted(int(x) for x in self.steps))
        if not s:
            raise ValueError("snapshot plan is empty")
        if s[0] < 0:
            raise ValueError("snapshot steps must be non-negative")
        object.__setattr__(self, "steps", s)

    def check(self, total: int) -> None:
        if self.steps[-1] > total:
            raise ValueError(f"snapshot step {self.steps[-1]} beyond final step {total}")

    @classmethod
    def final(cls, spec: EvolutionSpec) -> "SnapshotPlan":
        return cls((spec.steps,))


def evolve(grid: Grid, spec: EvolutionSpec, u0: Field, plan: SnapshotPlan | None = None, fast: bool = False) -> list[Field]:
    """Fields at every step listed in ``plan`` (default: only the final step)."""
    check_same_grid(grid, u0.grid)
    plan = plan or SnapshotPlan.final(spec)
    plan.check(spec.steps)
    spectrum = build_spectrum(grid)
    spec.certify(spectrum)
    coeffs = analyze_array(u0.as_array(), spectrum, fast)
    out = []
    for s in plan.steps:
        if s == 0:
            out.append(Field(u0.values.copy(), grid))
            continue
        scaled = scale_modes(
            spectrum, coeffs, lambda lam: step_power(amplification(spec.scheme, spec.dt, eval_poly(spec.operator, lam)), s)
        )
        out.append(Field.from_array(synthesize_array(scaled, spectrum, fast), grid))
    return out


def evolve_iterative_oracle(grid: Grid, spec: EvolutionSpec, u0: Field, plan: SnapshotPlan | None = None) -> list[Field]:
    """Step-by-step dense time integration; every step is a fresh dense LU solve."""
    check_same_grid(grid, u0.grid)
    plan = plan or SnapshotPlan.final(spec)
    plan.check(spec.steps)
    if spec.steps < 1 and plan.steps != (0,):
        raise ValueError("iterative oracle needs at least one step")
    M = assemble_poly(assemble_laplacian(grid), spec.operator)
    eye = np.eye(grid.n)
    if spec.scheme is Scheme.BACKWARD_EULER:
        lhs, rhs = eye + spec.dt * M, None
    else:
        lhs, rhs = eye + 0.5 * spec.dt * M, eye - 0.5 * spec.dt * M
    wanted = set(plan.steps)
    u = u0.values.copy()
    out = {0: u.copy()} if 0 in wanted else {}
    for step in range(1, spec.steps + 1):
        u = dense_solve(lhs, u if rhs is None else rhs @ u)
        if step in wanted:
            out[step] = u.copy()
    return [Field(out[s], grid) for s in plan.steps]


def binomial_expansion_check(dt: float, lam: float, tau: int) -> float:
    """``sum_i C(tau, i) (dt lam)^i``, which must equal ``(1 + dt lam)^tau``."""
    if tau < 0 or tau > BINOMIAL_MAX_STEPS:
        raise OverflowError(f"binomial expansion limited to 0 <= tau <= {BINOMIAL_MAX_STEPS}, got {tau}")
    x = dt * lam
    return math.fsum(math.comb(tau, i) * x**i for i in range(tau + 1))


def steps_from_text(text: str | Sequence[int]) -> tuple[int, ...]:
    if isinstance(text, str):
        try:
            return tuple(int(s) for s in text.split(",") if s.strip())
        except ValueError:
            raise ValueError(f"invalid step list {text!r}") from None
    return tuple(int(s) for s in text)
