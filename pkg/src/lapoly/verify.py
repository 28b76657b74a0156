"""Oracle cross-checks used by ``lapoly verify``."""
from __future__ import annotations

import time
from dataclasses import asdict, dataclass

import numpy as np

from . import oracle
from .grid import Field, Grid, make_grid
from .polynomial import MatrixPolynomial
from .solver import inverse_matrix, solve
from .timestep import EvolutionSpec, Scheme, SnapshotPlan, evolve, evolve_iterative_oracle

LAPLACIAN = MatrixPolynomial((0.0, 1.0))


@dataclass
class CheckResult:
    name: str
    max_error: float
    tolerance: float
    passed: bool
    seconds: float
    detail: str = ""

    def as_dict(self) -> dict:
        return asdict(self)


def rel_max_error(x: np.ndarray, ref: np.ndarray) -> float:
    scale = float(np.max(np.abs(ref)))
    return float(np.max(np.abs(np.asarray(x) - ref))) / (scale if scale > 0 else 1.0)


def check_inverse_1d(max_n: int = 100, tol: float = 1e-12) -> CheckResult:
    """Spectral ``A^{-1}`` vs the closed form for every N up to ``max_n``; error in units of h^2."""
    t0 = time.perf_counter()
    worst = 0.0
    worst_n = 0
    for N in range(1, max_n + 1):
        h2 = (1.0 / (N + 1)) ** 2
        spectral = inverse_matrix(make_grid(1, [N]), LAPLACIAN)
        i = np.arange(1, N + 1)[:, None]
        k = np.arange(1, N + 1)[None, :]
        closed = h2 * ((N + 1 - k) / (N + 1) * i - np.maximum(i - k, 0))
        err = float(np.max(np.abs(spectral - closed))) / h2
        if err > worst:
            worst, worst_n = err, N
    return CheckResult(
        "inverse1d", worst, tol, worst < tol, time.perf_counter() - t0, f"N = 1..{max_n}, worst at N = {worst_n}, error / h^2"
    )


def check_solve(grid: Grid, P: MatrixPolynomial, b: Field, tol: float = 1e-10, name: str = "solve") -> CheckResult:
    t0 = time.perf_counter()
    x = solve(grid, P, b).values
    ref = oracle.dense_spectral_solve(grid, P, b.values, refine=True)
    err = rel_max_error(x, ref)
    return CheckResult(name, err, tol, err < tol, time.perf_counter() - t0, f"grid {list(grid.N)}, P = {P}")


def check_evolve(grid: Grid, spec: EvolutionSpec, u0: Field, tol: float = 1e-8, name: str = "evolve") -> CheckResult:
    t0 = time.perf_counter()
    plan = SnapshotPlan((spec.steps,))
    fast = evolve(grid, spec, u0, plan)[0].values
    slow = evolve_iterative_oracle(grid, spec, u0, plan)[0].values
    err = rel_max_error(fast, slow)
    return CheckResult(
        name,
        err,
        tol,
        err < tol,
        time.perf_counter() - t0,
        f"grid {list(grid.N)}, {spec.scheme.value}, P = {spec.operator}, dt = {spec.dt}, tau = {spec.steps}",
    )


def evolve_suite(grid: Grid | None = None, dt: float = 1e-3, steps: int = 200, tol: float = 1e-8) -> list[CheckResult]:
    grid = grid or make_grid(1, [32])
    out = []
    for scheme in Scheme:
        for P in (LAPLACIAN, MatrixPolynomial((0.0, 1.0, 1.0))):
            spec = EvolutionSpec(scheme, dt, steps, P)
            out.append(check_evolve(grid, spec, Field.ones(grid), tol, f"evolve[{scheme.value},{P}]"))
    return out
