"""Wall-clock comparison of the spectral jump against step-by-step dense stepping."""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Sequence

from .grid import Field, Grid
from .polynomial import MatrixPolynomial
from .spectrum import build_spectrum
from .timestep import EvolutionSpec, Scheme, evolve, evolve_iterative_oracle


def best_time(fn: Callable[[], object], repeats: int = 3) -> float:
    """Minimum wall time over ``repeats`` calls."""
    best = float("inf")
    for _ in range(max(1, repeats)):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


@dataclass
class BenchRow:
    tau: int
    poly: str
    spectral_seconds: float
    iterative_seconds: float | None

    def as_dict(self) -> dict:
        return {
            "tau": self.tau,
            "poly": self.poly,
            "spectral_seconds": self.spectral_seconds,
            "iterative_seconds": self.iterative_seconds,
        }


def time_spectral(grid: Grid, spec: EvolutionSpec, u0: Field, repeats: int = 5, fast: bool = False) -> float:
    # spectra are cached per grid; build once so every repeat measures the same work
    build_spectrum(grid)
    return best_time(lambda: evolve(grid, spec, u0, fast=fast), repeats)


def time_iterative(grid: Grid, spec: EvolutionSpec, u0: Field, repeats: int = 1) -> float:
    return best_time(lambda: evolve_iterative_oracle(grid, spec, u0), repeats)


def run_bench(
    grid: Grid,
    polys: Sequence[MatrixPolynomial],
    taus: Sequence[int],
    dt: float = 1e-3,
    scheme: Scheme = Scheme.BACKWARD_EULER,
    skip_iterative_above: int | None = None,
    repeats: int = 5,
    fast: bool = False,
) -> list[BenchRow]:
    u0 = Field.ones(grid)
    rows = []
    for P in polys:
        for tau in taus:
            spec = EvolutionSpec(scheme, dt, tau, P)
            spectral = time_spectral(grid, spec, u0, repeats, fast)
            iterative = None
            if tau >= 1 and (skip_iterative_above is None or tau <= skip_iterative_above):
                iterative = time_iterative(grid, spec, u0)
            rows.append(BenchRow(tau, str(P), spectral, iterative))
    return rows
