"""The 2-D Dirichlet grid problem and its exports.

On the interior nodes (i, j) of an m x n grid with zero boundary values,

    [u(i+1,j) - 2u(i,j) + u(i-1,j)] + [u(i,j+1) - 2u(i,j) + u(i,j-1)]
        + lambda f((i,j), u(i,j)) + h(u(i,j)) = 0.

Reindexing w_k = u(v^{-1}(k)) with v(i,j) = i + m(j-1) turns this into the
algebraic system A w = lambda g(w) + h(w) with the block Laplacian A.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Union

import numpy as np

from .energy import EnergyFunctional, ProblemInstance
from .matrix_core import assemble_grid_laplacian
from .nonlinearity import ComponentFunction, Nonlinearity, Perturbation
from .solver import SolveConfig, cascade, multistart_solve

__all__ = [
    "GridProblemSpec",
    "GridRun",
    "alternate_grid_constant",
    "emit_plot_data",
    "grid_residual",
    "run_grid",
    "write_grid_csv",
]


@dataclass
class GridProblemSpec:
    """Grid dimensions, nonlinearity f (shared or node-dependent), h with L_h, lambda.

    ``f`` is either one :class:`ComponentFunction` used at every node or a
    callable ``(i, j) -> ComponentFunction`` with 1-based node indices.
    """

    m: int
    n: int
    f: Union[ComponentFunction, Callable]
    h: ComponentFunction
    lipschitz_h: float
    lam: float

    def assemble(self):
        matrix, index = assemble_grid_laplacian(self.m, self.n)
        if isinstance(self.f, ComponentFunction):
            g = Nonlinearity.broadcast(self.f, self.m * self.n)
        else:
            g = Nonlinearity([self.f(*index.inverse(k)) for k in range(1, self.m * self.n + 1)])
        h = Perturbation.broadcast(self.h, self.m * self.n, self.lipschitz_h)
        return ProblemInstance(matrix, g, h, self.lam), index

    def node_function(self, i, j):
        return self.f if isinstance(self.f, ComponentFunction) else self.f(i, j)


def alternate_grid_constant(m, n, lipschitz_h):
    """(2 + L_h)(m + n), an alternative closed form for the grid constant, reported for comparison."""
    return (2.0 + lipschitz_h) * (m + n)


def framed(grid):
    """Embed an m x n interior grid in an (m+2) x (n+2) array with zero boundary."""
    m, n = grid.shape
    out = np.zeros((m + 2, n + 2))
    out[1:-1, 1:-1] = grid
    return out


def grid_residual(spec, grid):
    """Left-hand side of the difference equation at every interior node (m x n)."""
    u = framed(np.asarray(grid, dtype=float))
    inner = u[1:-1, 1:-1]
    second = (u[2:, 1:-1] - 2.0 * inner + u[:-2, 1:-1]) + (u[1:-1, 2:] - 2.0 * inner + u[1:-1, :-2])
    forcing = np.empty_like(inner)
    for i in range(spec.m):
        for j in range(spec.n):
            forcing[i, j] = spec.lam * float(spec.node_function(i + 1, j + 1)(inner[i, j]))
    return second + forcing + np.asarray(spec.h(inner), dtype=float)


@dataclass
class GridRun:
    spec: GridProblemSpec
    problem: ProblemInstance
    records: list
    grids: list
    max_roundtrip_error: float
    result: object


def run_grid(spec: GridProblemSpec, cfg: SolveConfig, mode="cascade", regime="infinity",
             profile=None, witness_peaks=None, plateau_ends=None, out_dir=None):
    """Solve the grid problem, map solutions back to grids and check the round trip.

    The round trip compares the grid-form residual with the algebraic
    residual -(A w - lambda g(w) - h(w)) node by node.
    """
    problem, index = spec.assemble()
    J = EnergyFunctional(problem)
    if mode == "cascade":
        result = cascade(J, cfg, regime, profile, witness_peaks, plateau_ends)
    else:
        result = multistart_solve(J, cfg)
    records = list(result.records)
    grids = [index.to_grid(rec.u) for rec in records]
    worst = 0.0
    for rec, grid in zip(records, grids):
        algebraic = index.to_grid(-J.gradient(rec.u))
        worst = max(worst, float(np.max(np.abs(grid_residual(spec, grid) - algebraic))))
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for k, grid in enumerate(grids, start=1):
            write_grid_csv(out / f"solution_{k}.csv", grid)
    return GridRun(spec, problem, records, grids, worst, result)


def write_grid_csv(path, grid):
    """Row-major (m+2) x (n+2) matrix including the zero Dirichlet frame."""
    np.savetxt(path, framed(np.asarray(grid, dtype=float)), delimiter=",", fmt="%.17g")


def emit_plot_data(records, path, index_map=None):
    """Write cascade series (m, Phi) and (m, sup-norm); grid heatmaps if ``index_map``."""
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, column, attr in (("phi_series.csv", "phi", "phi"), ("supnorm_series.csv", "norm_inf", "norm_inf")):
        target = out / name
        with target.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["m", column])
            for k, rec in enumerate(records, start=1):
                writer.writerow([k, f"{getattr(rec, attr):.17g}"])
        written.append(target)
    if index_map is not None:
        for k, rec in enumerate(records, start=1):
            target = out / f"heatmap_{k}.csv"
            write_grid_csv(target, index_map.to_grid(rec.u))
            written.append(target)
    return written
