import csv
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from varsys.energy import EnergyFunctional
from varsys.grid import (
    GridProblemSpec,
    emit_plot_data,
    grid_residual,
    alternate_grid_constant,
    run_grid,
    write_grid_csv,
)
from varsys.nonlinearity import ZERO, polynomial, sine
from varsys.solver import SolveConfig, make_record

CUBE = polynomial([0.0, 0.0, 0.0, 1.0])


def test_zero_problem_has_only_zero_grid():
    spec = GridProblemSpec(3, 2, ZERO, ZERO, 0.0, 1.0)
    run = run_grid(spec, SolveConfig(n_random_starts=5, seed=0), mode="multistart")
    assert len(run.records) == 1
    assert np.allclose(run.grids[0], 0.0, atol=1e-10)


def test_two_by_two_cubic_constant_grids():
    spec = GridProblemSpec(2, 2, CUBE, ZERO, 0.0, 1.0)
    starts = [np.full(4, c) for c in (-1.2, 0.0, 1.2)]
    run = run_grid(spec, SolveConfig(starts=starts), mode="multistart")
    constants = sorted(float(g[0, 0]) for g in run.grids)
    assert constants == pytest.approx([-math.sqrt(2), 0.0, math.sqrt(2)], abs=1e-8)
    for g in run.grids:
        assert np.allclose(g, g[0, 0])
    assert run.max_roundtrip_error <= 1e-10


def test_node_dependent_nonlinearity():
    spec = GridProblemSpec(2, 3, lambda i, j: polynomial([0.0, 0.0, 0.0, float(i + j)]), ZERO, 0.0, 1.0)
    run = run_grid(spec, SolveConfig(n_random_starts=6, seed=3, start_radius=2.0), mode="multistart")
    assert run.max_roundtrip_error <= 1e-10
    for g in run.grids:
        assert np.max(np.abs(grid_residual(spec, g))) <= 1e-7


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 10_000))
def test_roundtrip_on_random_vectors(m, n, seed):
    rng = np.random.default_rng(seed)
    spec = GridProblemSpec(m, n, polynomial([0.0, 0.3, 0.0, 1.0]), sine(0.05, 1.0), 0.05, 1.7)
    problem, index = spec.assemble()
    J = EnergyFunctional(problem)
    w = rng.uniform(-3, 3, size=m * n)
    diff = grid_residual(spec, index.to_grid(w)) - index.to_grid(-J.gradient(w))
    assert np.max(np.abs(diff)) <= 1e-10


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 10), st.integers(1, 10), st.floats(0, 0.5))
def test_interval_constant_for_grids(m, n, lh):
    spec = GridProblemSpec(m, n, ZERO, sine(lh, 1.0) if lh else ZERO, lh, 1.0)
    problem, _ = spec.assemble()
    assert problem.constant_T == pytest.approx(2 * (m + n) + m * n * lh, abs=1e-10)
    assert alternate_grid_constant(m, n, 0.0) == 2 * (m + n)


def test_grid_csv_has_zero_frame(tmp_path):
    path = tmp_path / "g.csv"
    write_grid_csv(path, np.arange(1, 7, dtype=float).reshape(2, 3))
    data = np.loadtxt(path, delimiter=",")
    assert data.shape == (4, 5)
    assert np.all(data[0] == 0) and np.all(data[-1] == 0)
    assert np.all(data[:, 0] == 0) and np.all(data[:, -1] == 0)
    assert data[1:-1, 1:-1].tolist() == [[1, 2, 3], [4, 5, 6]]


def test_emit_plot_data(tmp_path):
    files = emit_plot_data([], tmp_path / "empty")
    for f in files:
        assert f.read_text().strip() in ("m,phi", "m,norm_inf")
    spec = GridProblemSpec(2, 2, CUBE, ZERO, 0.0, 1.0)
    problem, index = spec.assemble()
    J = EnergyFunctional(problem)
    recs = [make_record(J, np.full(4, c)) for c in (0.1, 0.2, 0.3, 0.4, 0.5)]
    emit_plot_data(recs, tmp_path / "five", index_map=index)
    with open(tmp_path / "five" / "phi_series.csv") as fh:
        rows = list(csv.reader(fh))[1:]
    assert len(rows) == 5
    phis = [float(r[1]) for r in rows]
    assert all(a < b for a, b in zip(phis, phis[1:]))
    assert np.loadtxt(tmp_path / "five" / "heatmap_3.csv", delimiter=",").shape == (4, 4)
