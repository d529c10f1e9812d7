import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from varsys.errors import InvalidDimensionError, StructuralError
from varsys.matrix_core import (
    GridIndexMap,
    SpdMatrix,
    assemble_grid_laplacian,
    assemble_second_difference,
    format_spectrum,
    jacobi_eigenvalues,
    load_matrix,
    quadratic_form,
    spectrum,
    sup_norm_radius,
)


def test_second_difference_small_cases():
    assert assemble_second_difference(1).entries.tolist() == [[2.0]]
    a = assemble_second_difference(3)
    assert np.allclose(a.spectrum, [2 - math.sqrt(2), 2, 2 + math.sqrt(2)], atol=1e-12)
    assert assemble_second_difference(4).ones_form == pytest.approx(2.0, abs=1e-14)


def test_grid_small_cases():
    a, _ = assemble_grid_laplacian(1, 1)
    assert a.entries.tolist() == [[4.0]]
    a, _ = assemble_grid_laplacian(2, 2)
    assert a.lambda1 == pytest.approx(2.0, abs=1e-12)
    assert np.allclose(a.spectrum, [2, 4, 4, 6], atol=1e-12)
    a, _ = assemble_grid_laplacian(3, 2)
    assert a.ones_form == pytest.approx(10.0, abs=1e-12)


def test_spectrum_examples():
    assert np.allclose(spectrum(np.eye(3)), [1, 1, 1])
    expected = [2 - 2 * math.cos(k * math.pi / 5) for k in range(1, 5)]
    assert np.allclose(spectrum(assemble_second_difference(4)), expected, atol=1e-10)


def test_quadratic_form_examples():
    assert quadratic_form(np.eye(2), [3, 4]) == pytest.approx(25.0)
    assert quadratic_form(assemble_second_difference(2), [1, 1]) == pytest.approx(2.0)
    assert quadratic_form(assemble_second_difference(5), np.zeros(5)) == 0.0


def test_sup_norm_radius_examples():
    assert sup_norm_radius(np.eye(3), 2.0) == pytest.approx(2.0)
    a = assemble_second_difference(3)
    assert sup_norm_radius(a, (2 - math.sqrt(2)) / 2) == pytest.approx(1.0, abs=1e-12)
    g, _ = assemble_grid_laplacian(2, 2)
    assert sup_norm_radius(g, 1.0) == pytest.approx(1.0, abs=1e-12)


def test_invalid_inputs():
    with pytest.raises(InvalidDimensionError):
        assemble_second_difference(0)
    with pytest.raises(InvalidDimensionError):
        assemble_grid_laplacian(0, 3)
    with pytest.raises(StructuralError):
        SpdMatrix([[1.0, 2.0], [0.0, 1.0]])
    with pytest.raises(StructuralError):
        SpdMatrix([[1.0, 2.0], [2.0, 1.0]]).require_positive_definite()


def test_entries_are_read_only():
    a = assemble_second_difference(3)
    with pytest.raises(ValueError):
        a.entries[0, 0] = 5.0


def test_matrix_free_matches_dense(rng):
    dense, _ = assemble_grid_laplacian(3, 5)
    free, _ = assemble_grid_laplacian(3, 5, matrix_free=True)
    for _ in range(5):
        u = rng.normal(size=15)
        assert np.allclose(dense.matvec(u), free.matvec(u), atol=1e-13)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 12), st.integers(0, 10_000))
def test_jacobi_matches_reference(n, seed):
    rng = np.random.default_rng(seed)
    b = rng.normal(size=(n, n))
    a = 0.5 * (b + b.T)
    # numpy is used here only as an independent reference
    assert np.allclose(jacobi_eigenvalues(a), np.linalg.eigvalsh(a), atol=1e-10 * max(1.0, np.abs(a).max()))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 8), st.integers(1, 8))
def test_index_map_is_bijective(m, n):
    idx = GridIndexMap(m, n)
    seen = set()
    for j in range(1, n + 1):
        for i in range(1, m + 1):
            k = idx.forward(i, j)
            assert k == i + m * (j - 1)
            assert idx.inverse(k) == (i, j)
            seen.add(k)
    assert seen == set(range(1, m * n + 1))
    w = np.arange(m * n, dtype=float)
    assert np.array_equal(idx.to_vector(idx.to_grid(w)), w)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 10), st.integers(1, 10))
def test_grid_ones_form(m, n):
    a, _ = assemble_grid_laplacian(m, n)
    assert a.ones_form == pytest.approx(2.0 * (m + n), abs=1e-12)
    assert a.ones_form == pytest.approx(a.trace + 2.0 * a.upper_sum, abs=1e-12)


def test_format_spectrum_is_exact_text():
    text = format_spectrum([0.1, 2.0])
    assert text == "0.10000000000000001\n2\n"


def test_load_matrix_formats(tmp_path):
    doc = tmp_path / "a.json"
    doc.write_text(json.dumps({"entries": [[2, -1], [-1, 2]]}))
    assert load_matrix(doc).lambda1 == pytest.approx(1.0)
    dense = tmp_path / "a.txt"
    dense.write_text("2 -1\n-1 2\n")
    assert load_matrix(dense).lambda1 == pytest.approx(1.0)


@pytest.mark.parametrize("m,n", [(1, 4), (3, 4), (5, 2)])
def test_grid_factor_spectrum_matches_full_jacobi(m, n):
    a, _ = assemble_grid_laplacian(m, n)
    assert np.allclose(a.spectrum, jacobi_eigenvalues(a.entries), atol=1e-11)


def test_grid_tag_with_foreign_entries_uses_full_solver():
    a, _ = assemble_grid_laplacian(2, 2)
    tweaked = np.array(a.entries)
    tweaked[0, 0] = 5.0
    b = SpdMatrix(tweaked, structural_tag=a.structural_tag, grid_shape=(2, 2))
    assert np.allclose(b.spectrum, np.linalg.eigvalsh(tweaked), atol=1e-12)
