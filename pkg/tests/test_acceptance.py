"""Acceptance criteria, one test each; every test prints a single PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` (the lines are printed even
under output capture).  Criterion 7 times the step-by-step dense oracle for a
thousand steps on a 32x32 grid and takes about two minutes.
"""
import math
import time

import numpy as np
import pytest

from lapoly import oracle
from lapoly.bench import best_time
from lapoly.grid import Field, make_grid
from lapoly.polynomial import MatrixPolynomial, certify_invertible
from lapoly.solver import solve
from lapoly.spectrum import build_spectrum
from lapoly.timestep import EvolutionSpec, Scheme, evolve, evolve_iterative_oracle
from lapoly.transform import CoefficientTensor, analyze, analyze_array, synthesize, synthesize_array
from lapoly.verify import check_inverse_1d, rel_max_error

LAP = MatrixPolynomial((0.0, 1.0))
LAP_BIHARM = MatrixPolynomial((0.0, 1.0, 1.0))


@pytest.fixture
def report(capsys):
    def emit(number, title, passed, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if passed else 'FAIL'}] criterion {number}: {title} ({detail})")

    return emit


def basis_matrix(grid):
    """Columns are the closed-form eigenvectors, flat mode order."""
    s = build_spectrum(grid)
    E = np.eye(grid.n).reshape(grid.shape + (grid.n,), order="F")
    return synthesize_array(E, s).reshape(grid.n, grid.n, order="F"), s.eigenvalues_flat()


def test_c1_closed_form_inverse(report):
    t0 = time.perf_counter()
    res = check_inverse_1d(max_n=100, tol=1e-12)
    seconds = time.perf_counter() - t0
    ok = res.passed and seconds < 10
    report(1, "1D inverse vs closed form, N = 1..100", ok, f"max error {res.max_error:.2e} h^2, {seconds:.2f} s")
    assert res.max_error < 1e-12
    assert seconds < 10


def test_c2_poisson_2d(report):
    t0 = time.perf_counter()
    g = make_grid(2, [16, 16])
    x = solve(g, LAP, Field.ones(g)).values
    ref = oracle.dense_spectral_solve(g, LAP, np.ones(g.n))
    err = rel_max_error(x, ref)
    seconds = time.perf_counter() - t0
    report(2, "2D Poisson 16x16 vs dense LU", err < 1e-10 and seconds < 5, f"rel error {err:.2e}, {seconds:.2f} s")
    assert err < 1e-10
    assert seconds < 5


def test_c3_fourth_order_2d(report):
    g = make_grid(2, [12, 12])
    P = MatrixPolynomial((1.0, 1.0, 1.0))
    x = solve(g, P, Field.ones(g)).values
    ref = oracle.dense_spectral_solve(g, P, np.ones(g.n))
    err = rel_max_error(x, ref)
    report(3, "P = 1 + l + l^2 on 12x12 vs dense LU", err < 1e-10, f"rel error {err:.2e}")
    assert err < 1e-10


def test_c4_polynomial_sweep(report):
    # Plain LU on P(A) loses about cond(P(A)) * eps, which for cubic P on the
    # N = 64 line is ~1e-6, so the dense reference is polished by refinement
    # against an exactly computed residual.
    rng = np.random.default_rng(4)
    grids = [make_grid(1, [64]), make_grid(2, [16, 16]), make_grid(3, [6, 6, 6])]
    worst, count, rejected = 0.0, 0, 0
    failures = []
    for g in grids:
        s = build_spectrum(g)
        A = oracle.assemble_laplacian(g)
        done = 0
        while done < 50:
            degree = int(rng.integers(0, 4))
            P = MatrixPolynomial(tuple(rng.uniform(-2.0, 5.0, degree + 1)))
            if not certify_invertible(P, s).ok:
                rejected += 1
                continue
            b = rng.standard_normal(g.n)
            err = rel_max_error(solve(g, P, Field(b, g)).values, oracle.refined_solve(A, P, b))
            worst = max(worst, err)
            if err >= 1e-10:
                failures.append((g.N, P.coeffs, err))
            done += 1
            count += 1
    report(4, "random certified polynomials, 1D/2D/3D", not failures, f"{count} cases, worst {worst:.2e}, {rejected} rejected")
    assert not failures, failures[:3]


def test_c5_quadratic_exactness(report):
    g = make_grid(1, [63])
    x = g.coordinates(0)
    err = float(np.max(np.abs(solve(g, LAP, Field.ones(g)).values - x * (1 - x) / 2)))
    report(5, "-u'' = 1, N = 63 vs x(1-x)/2", err < 1e-12, f"max error {err:.2e}")
    assert err < 1e-12


def test_c6_time_jump(report):
    cases = []
    for grid, steps in ((make_grid(1, [32]), 200), (make_grid(2, [8, 8]), 50)):
        u0 = Field.ones(grid)
        for scheme in Scheme:
            for P in (LAP, LAP_BIHARM):
                spec = EvolutionSpec(scheme, 1e-3, steps, P)
                jump = evolve(grid, spec, u0)[0].values
                iterated = evolve_iterative_oracle(grid, spec, u0)[0].values
                cases.append((grid.N, scheme.value, str(P), rel_max_error(jump, iterated)))
    worst = max(c[-1] for c in cases)
    report(6, "jump vs step-by-step, be/trapezoidal, l and l + l^2", worst < 1e-8, f"{len(cases)} cases, worst {worst:.2e}")
    assert all(c[-1] < 1e-8 for c in cases), cases


@pytest.mark.slow
def test_c7_runtime_shape(report):
    g = make_grid(2, [32, 32])
    u0 = Field.ones(g)
    build_spectrum(g)

    def spectral(tau):
        return best_time(lambda: evolve(g, EvolutionSpec(Scheme.BACKWARD_EULER, 1e-3, tau), u0), repeats=25)

    def iterative(tau):
        return best_time(lambda: evolve_iterative_oracle(g, EvolutionSpec(Scheme.BACKWARD_EULER, 1e-3, tau), u0), repeats=2)

    # linear cost plus a small fixed setup puts the iterative ratio just around 10,
    # so both sides use the same best-of-two estimator to damp scheduler noise
    s1, s4 = spectral(1), spectral(10**4)
    i2, i3 = iterative(10**2), iterative(10**3)
    flat = s4 < 2 * s1
    linear = i3 >= 10 * i2
    report(
        7,
        "runtime shape on 32x32",
        flat and linear,
        f"spectral tau=1 {s1 * 1e3:.2f} ms, tau=1e4 {s4 * 1e3:.2f} ms; iterative tau=1e2 {i2:.2f} s, tau=1e3 {i3:.2f} s",
    )
    assert flat
    assert linear


def test_c8_identities(report, rng):
    errs = {}
    # orthonormality and the sine-square sum
    ortho = 0.0
    sines = 0.0
    for N in range(1, 129):
        for bc in ("dirichlet", "dirichlet-neumann"):
            ax = build_spectrum(make_grid(1, [N], [bc])).axes[0]
            G = ax.basis @ ax.analysis_matrix.T
            ortho = max(ortho, float(np.max(np.abs(G - np.eye(N)))))
        ax = build_spectrum(make_grid(1, [N])).axes[0]
        S = ax.basis / ax.norm_factor
        sines = max(sines, float(np.max(np.abs((S**2).sum(axis=1) - (N + 1) / 2))))
    errs["orthonormality"] = ortho
    errs["sine squares"] = sines
    # analytic sums against direct summation
    sums = 0.0
    for n in range(1, 41):
        for z in (-0.9, -0.3, 0.5, 0.97, 1.0):
            ref = oracle.direct_weighted_geometric_sum(n, z)
            sums = max(sums, abs(oracle.weighted_geometric_sum(n, z) - ref) / max(1.0, abs(ref)))
        for x in np.linspace(0.3, 2 * np.pi - 0.3, 13):
            for f, g in ((oracle.weighted_sine_sum, oracle.direct_weighted_sine_sum), (oracle.weighted_cosine_sum, oracle.direct_weighted_cosine_sum)):
                ref = g(n, x)
                sums = max(sums, abs(f(n, x) - ref) / max(1.0, abs(ref)))
    errs["weighted sums"] = sums
    # round trip and Parseval
    trip = 0.0
    pars = 0.0
    for grid in (make_grid(1, [100]), make_grid(2, [17, 12], ["dirichlet", "dirichlet-neumann"]), make_grid(3, [7, 6, 5])):
        s = build_spectrum(grid)
        for fast in (False, True):
            u = Field(rng.standard_normal(grid.n), grid)
            c = analyze(u, s, fast)
            trip = max(trip, float(np.max(np.abs(synthesize(c, s, fast).values - u.values))))
            # node weights are one except half at a Neumann end
            w = s.weight_array().reshape(-1, order="F")
            energy = float(np.sum(w * u.values**2))
            pars = max(pars, abs(float(c.values @ c.values) - energy) / energy)
    errs["round trip"] = trip
    errs["Parseval"] = pars
    ok = all(v <= 1e-12 for v in errs.values())
    report(8, "identity suite", ok, ", ".join(f"{k} {v:.1e}" for k, v in errs.items()))
    assert ok, errs


def test_c9_mixed_boundary(report, rng):
    worst_res = 0.0
    for N in range(1, 33):
        for grid in (make_grid(1, [N], ["dirichlet-neumann"]),):
            V, lam = basis_matrix(grid)
            A = oracle.assemble_laplacian(grid)
            worst_res = max(worst_res, float(np.max(np.max(np.abs(A @ V - V * lam), axis=0) / lam)))
    for N in ((32, 32), (32, 17), (5, 32), (1, 9)):
        for bcs in (["dirichlet-neumann"] * 2, ["dirichlet", "dirichlet-neumann"], ["dirichlet-neumann", "dirichlet"]):
            grid = make_grid(2, list(N), bcs)
            V, lam = basis_matrix(grid)
            A = oracle.assemble_laplacian(grid)
            worst_res = max(worst_res, float(np.max(np.max(np.abs(A @ V - V * lam), axis=0) / lam)))
    worst_solve = 0.0
    for grid in (make_grid(1, [32], ["dirichlet-neumann"]), make_grid(2, [16, 12], ["dirichlet-neumann", "dirichlet"]), make_grid(2, [10, 10], ["dirichlet-neumann"] * 2)):
        for P in (LAP, MatrixPolynomial((1.0, 1.0, 1.0)), MatrixPolynomial((0.5, 2.0))):
            b = rng.standard_normal(grid.n)
            err = rel_max_error(solve(grid, P, Field(b, grid)).values, oracle.dense_spectral_solve(grid, P, b))
            worst_solve = max(worst_solve, err)
    ok = worst_res < 1e-10 and worst_solve < 1e-10
    report(9, "mixed Dirichlet-Neumann eigenpairs and solves", ok, f"residual {worst_res:.2e} lambda, solve {worst_solve:.2e}")
    assert worst_res < 1e-10
    assert worst_solve < 1e-10
