"""Command-line front end.

Subcommands: ``solve``, ``inverse``, ``evolve``, ``verify``, ``bench``.
Exit codes: 0 success, 1 verification failed, 2 invalid input,
3 singular operator, 4 internal size guard exceeded.
"""
from __future__ import annotations

import argparse
import contextlib
import io
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import verify as checks
from .bench import run_bench
from .errors import SingularMatrixError, SingularOperatorError, SizeGuardError
from .grid import Field, Grid, GridError, GridMismatchError, make_grid
from .polynomial import MatrixPolynomial, PolynomialError
from .solver import FULL_INVERSE_LIMIT, inverse_column, inverse_entry, inverse_matrix, solve
from .spectrum import build_spectrum
from .timestep import EvolutionSpec, Scheme, SnapshotPlan, evolve, steps_from_text
from .transform import CoefficientTensor, synthesize

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INVALID = 2
EXIT_SINGULAR = 3
EXIT_GUARD = 4

CONFIG_KEYS = {"grid", "poly", "rhs", "evolution", "output", "format"}
EVOLUTION_KEYS = {"scheme", "dt", "steps", "snapshots"}


class ConfigError(ValueError):
    pass


@dataclass
class EvolutionBlock:
    scheme: str = "be"
    dt: float = 1e-3
    steps: int = 0
    snapshots: list[int] | None = None


@dataclass
class ProblemConfig:
    grid: Grid
    poly: MatrixPolynomial
    rhs: str = "ones"
    evolution: EvolutionBlock = field(default_factory=EvolutionBlock)
    output: str | None = None
    format: str = "csv"


# --- parsing -----------------------------------------------------------------


def _int_list(text: str, what: str) -> list[int]:
    try:
        return [int(s) for s in str(text).split(",") if s.strip()]
    except ValueError:
        raise ConfigError(f"invalid {what} {text!r}: expected comma-separated integers") from None


def _broadcast(values: list, d: int | None, what: str) -> list:
    if d is not None and len(values) == 1 and d > 1:
        return values * d
    if d is not None and len(values) != d:
        raise ConfigError(f"{what} has {len(values)} entries but --dim is {d}")
    return values


def load_config_file(path: str) -> dict[str, Any]:
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(raw) - CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    evo = raw.get("evolution")
    if evo is not None:
        if not isinstance(evo, dict):
            raise ConfigError("'evolution' must be a JSON object")
        unknown = set(evo) - EVOLUTION_KEYS
        if unknown:
            raise ConfigError(f"unknown evolution keys: {sorted(unknown)}")
    return raw


def build_config(args: argparse.Namespace, default_grid: Grid | None = None, default_poly: str = "0,1") -> ProblemConfig:
    """Merge ``--config`` with command-line flags (flags win) and validate."""
    raw = load_config_file(args.config) if getattr(args, "config", None) else {}

    grid_cfg = dict(raw.get("grid") or {})
    if getattr(args, "n", None) is not None:
        d = args.dim
        N = _broadcast(_int_list(args.n, "--n"), d, "--n")
        grid_cfg["n_per_axis"] = N
        grid_cfg["dim"] = d if d is not None else len(N)
        if len(grid_cfg.get("bc_per_axis", N)) != len(N):
            # config boundary kinds belong to a different grid shape
            del grid_cfg["bc_per_axis"]
    elif getattr(args, "dim", None) is not None:
        grid_cfg["dim"] = args.dim
    if getattr(args, "bc", None) is not None:
        kinds = [s.strip() for s in args.bc.split(",") if s.strip()]
        grid_cfg["bc_per_axis"] = _broadcast(kinds, grid_cfg.get("dim"), "--bc")
    if "n_per_axis" in grid_cfg:
        grid = Grid.from_config(grid_cfg)
    elif default_grid is not None:
        grid = default_grid
    else:
        raise ConfigError("no grid given: use --n (and --dim/--bc) or a config file with a 'grid' block")

    poly_text = getattr(args, "poly", None)
    if poly_text is None:
        poly_text = raw.get("poly", default_poly)
    poly = MatrixPolynomial.parse(poly_text)

    evo_raw = dict(raw.get("evolution") or {})
    for key in ("scheme", "dt", "steps", "snapshots"):
        value = getattr(args, key, None)
        if value is not None:
            evo_raw[key] = value
    snapshots = evo_raw.get("snapshots")
    if snapshots is not None:
        snapshots = list(steps_from_text(snapshots))
    try:
        evolution = EvolutionBlock(
            scheme=str(evo_raw.get("scheme", "be")),
            dt=float(evo_raw.get("dt", 1e-3)),
            steps=int(evo_raw.get("steps", max(snapshots) if snapshots else 0)),
            snapshots=snapshots,
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid evolution block: {exc}") from None

    fmt = getattr(args, "format", None) or raw.get("format") or "csv"
    if fmt not in ("csv", "json"):
        raise ConfigError(f"unknown output format {fmt!r}")
    return ProblemConfig(
        grid=grid,
        poly=poly,
        rhs=getattr(args, "rhs", None) or raw.get("rhs") or "ones",
        evolution=evolution,
        output=getattr(args, "output", None) or raw.get("output"),
        format=fmt,
    )


def make_rhs(spec: str, grid: Grid) -> Field:
    """``ones``, ``file:<path>`` (one value per line, flat order) or ``mode:<k>`` (eigenvector k)."""
    spec = str(spec).strip()
    if spec == "ones":
        return Field.ones(grid)
    if spec.startswith("file:"):
        path = spec[len("file:"):]
        try:
            lines = [ln.strip() for ln in Path(path).read_text().splitlines() if ln.strip()]
            values = np.array([float(ln) for ln in lines])
        except OSError as exc:
            raise ConfigError(f"cannot read rhs file {path}: {exc.strerror}") from None
        except ValueError:
            raise ConfigError(f"rhs file {path} must contain one number per line") from None
        if values.size != grid.n:
            raise ConfigError(f"rhs file has {values.size} values, grid needs {grid.n}")
        return Field(values, grid)
    if spec.startswith("mode:"):
        try:
            k = int(spec[len("mode:"):])
        except ValueError:
            raise ConfigError(f"invalid mode rhs {spec!r}") from None
        if not 1 <= k <= grid.n:
            raise ConfigError(f"mode {k} out of range 1..{grid.n}")
        e = np.zeros(grid.n)
        e[k - 1] = 1.0
        return synthesize(CoefficientTensor(e, grid), build_spectrum(grid))
    raise ConfigError(f"unknown rhs {spec!r} (expected ones, file:<path> or mode:<k>)")


# --- output ------------------------------------------------------------------


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def field_csv(fld: Field) -> str:
    grid = fld.grid
    buf = io.StringIO()
    header = ["index"] + [f"coord_{p + 1}" for p in range(grid.d)] + ["value"]
    buf.write(",".join(header) + "\n")
    coords = [grid.coordinates(p) for p in range(grid.d)]
    for flat, (j, v) in enumerate(zip(grid.multi_indices(), fld.values), start=1):
        row = [str(flat)] + [_fmt(coords[p][jp - 1]) for p, jp in enumerate(j)] + [_fmt(v)]
        buf.write(",".join(row) + "\n")
    return buf.getvalue()


def field_json(fld: Field) -> dict[str, Any]:
    return {"grid": fld.grid.to_config(), "values": [float(v) for v in fld.values]}


@contextlib.contextmanager
def _sink(path: str | None):
    if path:
        with open(path, "w") as fh:
            yield fh
    else:
        yield sys.stdout


# --- commands ----------------------------------------------------------------


def cmd_solve(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    b = make_rhs(cfg.rhs, cfg.grid)
    x = solve(cfg.grid, cfg.poly, b, fast=args.fast)
    with _sink(cfg.output) as out:
        if cfg.format == "json":
            payload = field_json(x)
            payload["poly"] = list(cfg.poly.coeffs)
            json.dump(payload, out)
            out.write("\n")
        else:
            out.write(field_csv(x))
    return EXIT_OK


def _pair(text: str) -> tuple[int, int]:
    vals = _int_list(text, "--entry")
    if len(vals) != 2:
        raise ConfigError(f"--entry needs two flat indices 'i,k', got {text!r}")
    return vals[0], vals[1]


def cmd_inverse(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    grid, P = cfg.grid, cfg.poly
    with _sink(cfg.output) as out:
        if args.full:
            if grid.n > FULL_INVERSE_LIMIT:
                raise ConfigError(f"--full refused: n = {grid.n} exceeds the full-inverse limit of {FULL_INVERSE_LIMIT}")
            M = inverse_matrix(grid, P)
            if cfg.format == "json":
                json.dump({"grid": grid.to_config(), "matrix": M.tolist()}, out)
                out.write("\n")
            else:
                for row in M:
                    out.write(",".join(_fmt(v) for v in row) + "\n")
        elif args.column is not None:
            if not 1 <= args.column <= grid.n:
                raise ConfigError(f"column {args.column} out of range 1..{grid.n}")
            col = inverse_column(grid, P, args.column)
            if cfg.format == "json":
                json.dump(field_json(col) | {"column": args.column}, out)
                out.write("\n")
            else:
                out.write(field_csv(col))
        else:
            i, k = _pair(args.entry)
            for idx in (i, k):
                if not 1 <= idx <= grid.n:
                    raise ConfigError(f"entry index {idx} out of range 1..{grid.n}")
            value = inverse_entry(grid, P, i, k)
            if cfg.format == "json":
                json.dump({"i": i, "k": k, "value": value}, out)
                out.write("\n")
            else:
                out.write(_fmt(value) + "\n")
    return EXIT_OK


def cmd_evolve(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    evo = cfg.evolution
    try:
        spec = EvolutionSpec(Scheme.parse(evo.scheme), evo.dt, evo.steps, cfg.poly)
        plan = SnapshotPlan(tuple(evo.snapshots) if evo.snapshots else (spec.steps,))
        plan.check(spec.steps)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    u0 = make_rhs(cfg.rhs, cfg.grid)
    fields = evolve(cfg.grid, spec, u0, plan, fast=args.fast)
    with _sink(cfg.output) as out:
        if cfg.format == "json":
            payload = {
                "grid": cfg.grid.to_config(),
                "scheme": spec.scheme.value,
                "dt": spec.dt,
                "poly": list(cfg.poly.coeffs),
                "snapshots": [{"step": s, "values": [float(v) for v in f.values]} for s, f in zip(plan.steps, fields)],
            }
            json.dump(payload, out)
            out.write("\n")
        else:
            for n, (s, f) in enumerate(zip(plan.steps, fields)):
                if n:
                    out.write("\n")
                out.write(f"# step={s} time={_fmt(s * spec.dt)}\n")
                out.write(field_csv(f))
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    presets = ["inverse1d", "solve", "evolve"] if args.preset == "all" else [args.preset]
    results: list[checks.CheckResult] = []
    if "inverse1d" in presets:
        results.append(checks.check_inverse_1d(args.max_n))
    if "solve" in presets:
        cfg = build_config(args, default_grid=make_grid(2, [16, 16]))
        results.append(checks.check_solve(cfg.grid, cfg.poly, make_rhs(cfg.rhs, cfg.grid)))
    if "evolve" in presets:
        results.extend(checks.evolve_suite(steps=args.steps_check))
    report = [r.as_dict() for r in results]
    with _sink(args.output) as out:
        json.dump(report, out, indent=2)
        out.write("\n")
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name}: max error {r.max_error:.3e} (tol {r.tolerance:.0e})", file=sys.stderr)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAILED


def cmd_bench(args: argparse.Namespace) -> int:
    cfg = build_config(args, default_grid=make_grid(2, [16, 16]))
    polys = [MatrixPolynomial.parse(p) for p in (args.bench_poly or ["0,1", "0,1,1"])]
    taus = steps_from_text(args.taus)
    if not taus or min(taus) < 0:
        raise ConfigError("--taus must list non-negative step counts")
    rows = run_bench(
        cfg.grid,
        polys,
        taus,
        dt=cfg.evolution.dt,
        scheme=Scheme.parse(cfg.evolution.scheme),
        skip_iterative_above=args.skip_iterative_above,
        repeats=args.repeats,
        fast=args.fast,
    )
    with _sink(cfg.output) as out:
        if args.format == "csv":
            out.write("tau,poly,spectral_seconds,iterative_seconds\n")
            for r in rows:
                it = "" if r.iterative_seconds is None else _fmt(r.iterative_seconds)
                out.write(f"{r.tau},\"{r.poly}\",{_fmt(r.spectral_seconds)},{it}\n")
        else:
            json.dump([r.as_dict() for r in rows], out, indent=2)
            out.write("\n")
    return EXIT_OK


# --- argument parser ---------------------------------------------------------


def _add_problem_args(p: argparse.ArgumentParser, poly: bool = True) -> None:
    p.add_argument("--config", help="JSON problem config; command-line flags override it")
    p.add_argument("--dim", type=int, help="spatial dimension")
    p.add_argument("--n", help="unknowns per axis, e.g. 63 or 16,16")
    p.add_argument("--bc", help="per-axis boundary kinds: dirichlet | dirichlet-neumann")
    if poly:
        p.add_argument("--poly", help='ascending coefficients of P, e.g. "0,1" (A) or "1,1,1" (I + A + A^2)')
    p.add_argument("--rhs", help="ones | file:<path> | mode:<k>")
    p.add_argument("--output", "-o", help="write to this file instead of stdout")
    p.add_argument("--fast", action="store_true", help="use FFT-based sine transforms")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lapoly", description="Spectral solver for polynomials of discrete Laplace matrices.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve P(A) x = b")
    _add_problem_args(p)
    p.add_argument("--format", choices=["csv", "json"])
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("inverse", help="entries, a column or all of P(A)^-1")
    _add_problem_args(p)
    p.add_argument("--format", choices=["csv", "json"])
    what = p.add_mutually_exclusive_group(required=True)
    what.add_argument("--entry", help="1-based flat indices 'i,k'")
    what.add_argument("--column", type=int, help="1-based flat column index")
    what.add_argument("--full", action="store_true", help=f"dense inverse (n <= {FULL_INVERSE_LIMIT})")
    p.set_defaults(func=cmd_inverse)

    p = sub.add_parser("evolve", help="jump to time steps of u' + P(A) u = 0")
    _add_problem_args(p)
    p.add_argument("--u0", dest="rhs", help="alias of --rhs for the initial condition")
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--scheme", help="be | trapezoidal")
    p.add_argument("--dt", type=float)
    p.add_argument("--steps", type=int, help="final step (default: largest snapshot)")
    p.add_argument("--snapshots", help="comma-separated steps to emit, e.g. 1,10,100")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("verify", help="cross-check against the dense oracle")
    _add_problem_args(p)
    p.add_argument("--preset", choices=["all", "inverse1d", "solve", "evolve"], default="all")
    p.add_argument("--max-n", type=int, default=100, help="largest N in the 1D inverse sweep")
    p.add_argument("--steps-check", type=int, default=200, help="steps in the evolve scenarios")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="spectral jump vs step-by-step wall clock")
    _add_problem_args(p, poly=False)
    p.add_argument("--poly", dest="bench_poly", action="append", help="operator polynomial; repeat to compare (default 0,1 and 0,1,1)")
    p.add_argument("--format", choices=["csv", "json"], default="json")
    p.add_argument("--taus", default="1,10,100,1000,10000")
    p.add_argument("--dt", type=float)
    p.add_argument("--scheme")
    p.add_argument("--skip-iterative-above", type=int, help="omit the iterative timing for larger tau")
    p.add_argument("--repeats", type=int, default=5, help="spectral timing is the best of this many runs")
    p.set_defaults(func=cmd_bench)
    return parser


def _thread_limit():
    raw = os.environ.get("LAPOLY_THREADS", "").strip()
    if not raw:
        return contextlib.nullcontext()
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"LAPOLY_THREADS must be an integer, got {raw!r}") from None
    if n <= 0:
        return contextlib.nullcontext()
    from threadpoolctl import threadpool_limits

    return threadpool_limits(limits=n)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with _thread_limit():
            return args.func(args)
    except SingularOperatorError as exc:
        print(f"lapoly: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except SizeGuardError as exc:
        print(f"lapoly: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except SingularMatrixError as exc:
        print(f"lapoly: oracle: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except (ConfigError, GridError, GridMismatchError, PolynomialError, ValueError) as exc:
        print(f"lapoly: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
