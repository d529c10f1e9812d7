
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from varsys.energy import EnergyFunctional, ProblemInstance
from varsys.errors import InvalidDimensionError, StructuralError
from varsys.matrix_core import SpdMatrix, assemble_second_difference
from varsys.nonlinearity import ZERO, Nonlinearity, Perturbation, polynomial, sine
from varsys.spike_train import SpikeTrain

IDENTITY = polynomial([0.0, 1.0])


def make(a, f=ZERO, h=None, lam=1.0, L=None):
    n = a.order
    hp = Perturbation.zero(n) if h is None else Perturbation.broadcast(h, n, L)
    return EnergyFunctional(ProblemInstance(a, Nonlinearity.broadcast(f, n), hp, lam))


def test_phi_examples():
    a = assemble_second_difference(2)
    assert make(a).phi(np.zeros(2)) == 0.0
    assert make(a).phi(np.ones(2)) == pytest.approx(1.0)
    half = polynomial([0.0, 0.5])
    # u^t A u / 2 = 1 and H_k(1) = 1/4 for both components
    assert make(a, h=half).phi(np.ones(2)) == pytest.approx(0.5)


def test_j_lambda_examples():
    a = assemble_second_difference(2)
    J = make(a, f=IDENTITY)
    assert J.j_lambda(np.zeros(2)) == 0.0
    assert J.j_lambda(np.ones(2)) == pytest.approx(0.0, abs=1e-15)


def test_gradient_linear_oracle():
    a = assemble_second_difference(3)
    J = make(a, f=IDENTITY)
    u = np.array([0.3, -1.0, 2.0])
    assert np.allclose(J.gradient(u), (a.entries - np.eye(3)) @ u)
    assert np.allclose(J.gradient(np.zeros(3)), 0.0)


def test_dimension_and_lambda_checks():
    a = assemble_second_difference(3)
    with pytest.raises(InvalidDimensionError):
        ProblemInstance(a, Nonlinearity.broadcast(ZERO, 2), Perturbation.zero(3), 1.0)
    with pytest.raises(StructuralError):
        ProblemInstance(a, Nonlinearity.broadcast(ZERO, 3), Perturbation.zero(3), 0.0)
    with pytest.raises(InvalidDimensionError):
        make(a).phi(np.zeros(4))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.floats(0.1, 5), st.floats(0, 0.9), st.integers(0, 10_000))
def test_gradient_and_hessian_match_finite_differences(n, lam, frac, seed):
    rng = np.random.default_rng(seed)
    a = assemble_second_difference(n)
    L = frac * a.lambda1
    f = polynomial(rng.uniform(-1, 1, size=4))
    J = make(a, f=f, h=sine(L, 1.0), lam=lam)
    u = rng.uniform(-2, 2, size=n)
    g = J.gradient(u)
    fd = np.empty(n)
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1e-6
        fd[i] = (J.j_lambda(u + e) - J.j_lambda(u - e)) / 2e-6
    assert np.linalg.norm(fd - g) <= 1e-6 * max(1.0, np.linalg.norm(g))
    hd = np.column_stack([(J.gradient(u + 1e-6 * e) - J.gradient(u - 1e-6 * e)) / 2e-6 for e in np.eye(n)])
    assert np.allclose(hd, J.hessian(u), atol=1e-5 * max(1.0, np.abs(hd).max()))


def test_coercivity_sandwich(rng):
    a = assemble_second_difference(5)
    J = make(a, h=sine(0.2, 1.0))
    assert J.coercivity_certificate(np.zeros(5)).ok
    for _ in range(300):
        u = rng.normal(scale=10 ** rng.uniform(-3, 3), size=5)
        assert J.coercivity_certificate(u).ok


def test_unperturbed_bounds_reduce_to_rayleigh(rng):
    a = assemble_second_difference(4)
    J = make(a)
    for _ in range(50):
        u = rng.normal(size=4)
        sq = u @ u
        assert a.lambda1 * sq / 2 - 1e-12 <= J.phi(u) <= a.lambda_max * sq / 2 + 1e-12


def test_varphi_bound_examples():
    a = SpdMatrix([[2.0]])
    assert make(a).varphi_upper_bound(1.0).value == 0.0
    bound = make(a, f=IDENTITY).varphi_upper_bound(1.0)
    assert bound.box_radius == pytest.approx(1.0)
    assert bound.value == pytest.approx(0.5, abs=1e-9)


def test_varphi_bound_decays_along_spike_plateaus():
    train = SpikeTrain(1e-4)
    a = assemble_second_difference(4)
    J = make(a, f=train.component(), h=sine(0.1, 1.0))
    gap = a.lambda1 - 0.1
    values = [J.varphi_upper_bound(0.5 * gap * c * c).value for c in train.plateau_ends(6)]
    # sum_k F(c_m) / r_m = n (c_m^2 / q_m) / (gap c_m^2 / 2) = 2 n / (q_m gap) -> 0
    expected = [2 * 4 / (train.quotient(m) * gap) for m in range(1, 7)]
    assert values == pytest.approx(expected, rel=1e-9)
    assert all(x > y for x, y in zip(values, values[1:]))


def test_counters_track_evaluations():
    J = make(assemble_second_difference(2), f=IDENTITY)
    J.j_lambda(np.ones(2))
    J.gradient(np.ones(2))
    assert J.counters["phi"] == 1 and J.counters["psi"] == 1 and J.counters["gradient"] == 1
