"""Tensor-product grids on the unit hyperbox.

A :class:`Grid` fixes the number of unknowns per axis, the boundary condition
per axis and the resulting spacing.  Flat indices are 1-based and axis 1
varies fastest, i.e. ``flat = j_1 + N_1 (j_2 - 1) + N_1 N_2 (j_3 - 1) + ...``.
Internally arrays of nodal values are reshaped with ``order="F"`` so that the
same convention holds for numpy.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Any, Iterator, Sequence

import numpy as np


class GridError(ValueError):
    """Invalid grid construction or index."""


class GridMismatchError(ValueError):
    """Operands were built on different grids."""


class BoundaryKind(enum.Enum):
    DIRICHLET = "dirichlet"
    DIRICHLET_NEUMANN = "dirichlet-neumann"

    @classmethod
    def parse(cls, value: "str | BoundaryKind") -> "BoundaryKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            choices = ", ".join(k.value for k in cls)
            raise GridError(f"unknown boundary kind {value!r} (expected one of: {choices})") from None


@dataclass(frozen=True)
class Grid:
    """Uniform grid of interior unknowns on ``(0, 1)^d``.

    Use :func:`make_grid` rather than the constructor; it derives the spacing
    from the boundary kinds.
    """

    d: int
    N: tuple[int, ...]
    bc: tuple[BoundaryKind, ...]
    h: tuple[float, ...]

    @property
    def n(self) -> int:
        return math.prod(self.N)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.N

    def coordinates(self, axis: int) -> np.ndarray:
        """Node positions ``j h`` (j = 1..N) along a 0-based axis."""
        return np.arange(1, self.N[axis] + 1) * self.h[axis]

    def multi_indices(self) -> Iterator[tuple[int, ...]]:
        """All 1-based multi-indices in flat order."""
        for flat in range(1, self.n + 1):
            yield unflatten(self, flat)

    def to_config(self) -> dict[str, Any]:
        return {
            "dim": self.d,
            "n_per_axis": list(self.N),
            "bc_per_axis": [k.value for k in self.bc],
        }

    @classmethod
    def from_config(cls, config: dict[str, Any]) -> "Grid":
        if not isinstance(config, dict):
            raise GridError("grid config must be a JSON object")
        unknown = set(config) - {"dim", "n_per_axis", "bc_per_axis"}
        if unknown:
            raise GridError(f"unknown grid keys: {sorted(unknown)}")
        if "n_per_axis" not in config:
            raise GridError("grid config requires 'n_per_axis'")
        N = config["n_per_axis"]
        if not isinstance(N, list):
            raise GridError("'n_per_axis' must be an array")
        d = config.get("dim", len(N))
        bc = config.get("bc_per_axis", ["dirichlet"] * len(N))
        if not isinstance(bc, list):
            raise GridError("'bc_per_axis' must be an array")
        return make_grid(d, N, bc)


def _spacing(N: int, kind: BoundaryKind) -> float:
    if kind is BoundaryKind.DIRICHLET:
        return 1.0 / (N + 1)
    # the Neumann node x_N = 1 is itself an unknown
    return 1.0 / N


def make_grid(d: int, N: Sequence[int], bc: Sequence["str | BoundaryKind"] | None = None) -> Grid:
    """Build a grid with ``d`` axes, ``N[p]`` unknowns and boundary ``bc[p]`` per axis.

    ``bc`` defaults to Dirichlet on every axis.  Raises :class:`GridError` on
    a dimension mismatch, ``d < 1`` or a non-positive node count.
    """
    if isinstance(d, bool) or not isinstance(d, (int, np.integer)) or d < 1:
        raise GridError(f"dimension must be a positive integer, got {d!r}")
    N = list(N)
    if bc is None:
        bc = [BoundaryKind.DIRICHLET] * len(N)
    bc = [BoundaryKind.parse(k) for k in bc]
    if len(N) != d or len(bc) != d:
        raise GridError(f"expected {d} axes, got {len(N)} node counts and {len(bc)} boundary kinds")
    for m in N:
        if isinstance(m, bool) or not isinstance(m, (int, np.integer)) or m < 1:
            raise GridError(f"node counts must be positive integers, got {m!r}")
    N = tuple(int(m) for m in N)
    h = tuple(_spacing(m, k) for m, k in zip(N, bc))
    return Grid(d=int(d), N=N, bc=tuple(bc), h=h)


def flatten(grid: Grid, j: Sequence[int]) -> int:
    """Map a 1-based multi-index to its 1-based flat index."""
    if len(j) != grid.d:
        raise GridError(f"expected {grid.d} indices, got {len(j)}")
    flat = 0
    stride = 1
    for jp, Np in zip(j, grid.N):
        if not 1 <= jp <= Np:
            raise GridError(f"index {tuple(j)} out of range for grid {grid.N}")
        flat += (jp - 1) * stride
        stride *= Np
    return flat + 1


def unflatten(grid: Grid, flat: int) -> tuple[int, ...]:
    """Inverse of :func:`flatten`: 1-based flat index to 1-based multi-index."""
    if not 1 <= flat <= grid.n:
        raise GridError(f"flat index {flat} out of range 1..{grid.n}")
    rest = flat - 1
    out = []
    for Np in grid.N:
        rest, r = divmod(rest, Np)
        out.append(r + 1)
    return tuple(out)


@dataclass(frozen=True, eq=False)
class Field:
    """Flat nodal vector of length ``grid.n`` in flat-index order."""

    values: np.ndarray
    grid: Grid

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float).reshape(-1)
        if values.size != self.grid.n:
            raise GridMismatchError(f"field has {values.size} values, grid has {self.grid.n} unknowns")
        object.__setattr__(self, "values", values)

    def as_array(self) -> np.ndarray:
        """View shaped ``grid.N`` with axis 1 first (Fortran order)."""
        return self.values.reshape(self.grid.N, order="F")

    @classmethod
    def from_array(cls, array: np.ndarray, grid: Grid) -> "Field":
        return cls(np.asarray(array).reshape(-1, order="F"), grid)

    @classmethod
    def ones(cls, grid: Grid) -> "Field":
        return cls(np.ones(grid.n), grid)

    @classmethod
    def basis(cls, grid: Grid, k: int) -> "Field":
        """Standard basis vector e_k (1-based flat index)."""
        if not 1 <= k <= grid.n:
            raise GridError(f"flat index {k} out of range 1..{grid.n}")
        e = np.zeros(grid.n)
        e[k - 1] = 1.0
        return cls(e, grid)


def check_same_grid(a: Grid, b: Grid) -> None:
    if a != b:
        raise GridMismatchError(f"grid mismatch: {a.N}/{[k.value for k in a.bc]} vs {b.N}/{[k.value for k in b.bc]}")
