import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from varsys.asymptotics import AsymptoticProfile
from varsys.energy import EnergyFunctional, ProblemInstance
from varsys.errors import HypothesisError
from varsys.matrix_core import SpdMatrix, assemble_second_difference
from varsys.nonlinearity import ZERO, Nonlinearity, Perturbation, polynomial, sine
from varsys.solver import (
    NonConvergence,
    SolutionRecord,
    SolveConfig,
    cascade,
    dedupe,
    local_minimize,
    make_record,
    minimize_on_sublevel,
    multistart_solve,
    unboundedness_witness,
)
from varsys.spike_train import SpikeTrain

CUBE = polynomial([0.0, 0.0, 0.0, 1.0])
IDENTITY = polynomial([0.0, 1.0])
ROOT2 = math.sqrt(2.0)


def make(a, f=ZERO, h=None, lam=1.0):
    n = a.order
    hp = Perturbation.zero(n) if h is None else Perturbation.broadcast(h, n)
    return EnergyFunctional(ProblemInstance(a, Nonlinearity.broadcast(f, n), hp, lam))


@pytest.fixture
def cubic():
    return make(SpdMatrix([[2.0]]), f=CUBE)


def test_trivial_start_converges_immediately(cubic):
    rec = local_minimize(cubic, [0.0], SolveConfig())
    assert isinstance(rec, SolutionRecord)
    assert rec.residual == 0.0 and rec.iterations == 0


def test_cubic_root_from_one(cubic):
    rec = local_minimize(cubic, [1.0], SolveConfig())
    assert rec.u[0] == pytest.approx(ROOT2, abs=1e-8)
    assert rec.stationary_type == "saddle"


def test_linear_nonresonant_converges_to_zero():
    J = make(assemble_second_difference(3), f=IDENTITY, lam=1.5)
    rec = local_minimize(J, [1.0, -2.0, 0.5], SolveConfig())
    assert np.allclose(rec.u, 0.0, atol=1e-8)


def test_divergent_start_reports_nonconvergence():
    J = make(SpdMatrix([[1.0]]), f=polynomial([1.0, 2.0]))  # u = 1 + 2u... J unbounded, root at -1
    out = local_minimize(J, [5.0], SolveConfig(max_iters=50))
    assert isinstance(out, SolutionRecord) and out.u[0] == pytest.approx(-1.0)
    shifted = make(SpdMatrix([[1.0]]), f=polynomial([1.0, 0.0, 1.0]))  # u = 1 + u^2 has no real root
    out = local_minimize(shifted, [0.0], SolveConfig(max_iters=20_000))
    assert isinstance(out, NonConvergence)
    assert out.gradient_norm > 0.5 and out.reason


def test_sublevel_interior_and_boundary(cubic):
    cfg = SolveConfig()
    big = minimize_on_sublevel(make(SpdMatrix([[2.0]]), f=IDENTITY, lam=0.5), 100.0, cfg, start=[3.0])
    assert big.status == "interior" and abs(big.u[0]) < 1e-8
    # J = u^2 - 2.5 u^2 is unbounded below: the constrained minimizer sits on Phi = r
    steep = make(SpdMatrix([[2.0]]), f=IDENTITY, lam=5.0)
    edge = minimize_on_sublevel(steep, 1.0, cfg, start=[0.5])
    assert edge.status == "boundary" and edge.record is None
    assert edge.phi == pytest.approx(1.0, rel=1e-5)
    # for 2u = u^3 the roots +-sqrt(2) are local maxima of J; inside {Phi < 1} the minimizer is 0
    inner = minimize_on_sublevel(cubic, 1.0, cfg, start=[0.5])
    assert inner.status == "interior" and abs(inner.u[0]) < 1e-8


def test_multistart_cubic_three_roots(cubic):
    res = multistart_solve(cubic, SolveConfig(starts=[[-3.0], [0.0], [3.0]]))
    roots = sorted(float(r.u[0]) for r in res.records)
    assert roots == pytest.approx([-ROOT2, 0.0, ROOT2], abs=1e-8)


def test_multistart_zero_starts_and_duplicates(cubic):
    assert len(multistart_solve(cubic, SolveConfig(starts=[[0.0]] * 4))) == 1
    res = multistart_solve(cubic, SolveConfig(starts=[[3.0], [3.0], [2.5]]))
    assert len(res) == 1


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=1, max_size=6))
def test_dedupe_property(values):
    J = make(SpdMatrix([[2.0]]), f=CUBE)
    recs = [make_record(J, [v]) for v in values] * 2
    kept = dedupe(recs, SolveConfig())
    for i, a in enumerate(kept):
        for b in kept[i + 1:]:
            assert abs(a.u[0] - b.u[0]) > 1e-6 * max(abs(a.u[0]), abs(b.u[0]))


def test_linear_case_outside_interval_gives_trivial_record():
    a = assemble_second_difference(3)
    J = make(a, f=IDENTITY, lam=0.1)
    res = multistart_solve(J, SolveConfig(n_random_starts=8, seed=2))
    assert len(res) == 1 and np.allclose(res.records[0].u, 0.0, atol=1e-10)


def test_hypothesis_refusal_and_override():
    a = assemble_second_difference(3)
    J = make(a, f=IDENTITY, h=sine(1.0, 1.0))
    with pytest.raises(HypothesisError):
        multistart_solve(J, SolveConfig(starts=[[0.0, 0.0, 0.0]]))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        res = multistart_solve(J, SolveConfig(starts=[[0.0, 0.0, 0.0]], override_hypotheses=True))
    assert res.overridden
    J2 = make(a, f=IDENTITY)
    failing = AsymptoticProfile.analytic(a_inf=1, b_sup=1)
    with pytest.raises(HypothesisError):
        cascade(J2, SolveConfig(), profile=failing)


def test_workers_give_same_records(cubic):
    cfg = dict(n_random_starts=12, seed=4, start_radius=3.0)
    serial = multistart_solve(cubic, SolveConfig(**cfg))
    threaded = multistart_solve(cubic, SolveConfig(workers=4, **cfg))
    assert [r.u.tolist() for r in serial] == [r.u.tolist() for r in threaded]


def test_cascade_infinity_regime():
    train = SpikeTrain(1e-4)
    J = make(assemble_second_difference(4), f=train.component(), h=sine(0.1, 1.0))
    res = cascade(J, SolveConfig(n_random_starts=10, seed=1), "infinity",
                  AsymptoticProfile.analytic(a_inf=0, b_sup="inf"), train.peaks(6), train.plateau_ends(6))
    assert len(res) >= 5
    phis = [r.phi for r in res]
    sups = [r.norm_inf for r in res]
    assert all(x < y for x, y in zip(phis, phis[1:]))
    assert all(x < y for x, y in zip(sups, sups[1:]))
    assert "finite prefix" in res.evidence


def test_cascade_without_multiplicity_reports_it():
    J = make(assemble_second_difference(2), f=ZERO)
    res = cascade(J, SolveConfig(n_random_starts=2, schedule_count=3))
    assert len(res) == 1  # only the trivial solution, then nothing new
    J0 = make(assemble_second_difference(2), f=polynomial([0.0, 0.0, 0.0, -1.0]))
    res0 = cascade(J0, SolveConfig(n_random_starts=3, schedule_count=3), regime="zero")
    assert len(res0) == 0 and "no multiplicity evidence" in res0.evidence


def test_witness_examples():
    a = assemble_second_difference(4)
    flat = unboundedness_witness(make(a), [1.0, 2.0, 3.0])
    assert flat.verdict == "bounded-below evidence"
    assert flat.values == pytest.approx([0.5 * a.ones_form * b * b for b in (1, 2, 3)])
    train = SpikeTrain(1e-4)
    J = make(a, f=train.component(), h=sine(0.1, 1.0))
    rep = unboundedness_witness(J, train.peaks(6))
    assert rep.verdict == "unbounded-below evidence"
    assert all(rep.inequality_holds)
