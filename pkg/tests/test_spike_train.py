import numpy as np
import pytest

from varsys.errors import StructuralError
from varsys.spike_train import SpikeTrain


@pytest.mark.parametrize("direction,first", [("infinity", 1e-4), ("zero", 0.05)])
def test_quotients_at_peaks_and_plateaus(direction, first):
    train = SpikeTrain(first, direction)
    for m, (start, peak, end) in enumerate(train.stages(6), start=1):
        assert float(train.F(peak)) / peak**2 > 10
        assert float(train.F(end)) / end**2 < 0.1
        assert 0 < start < peak


def test_stage_order():
    up = SpikeTrain(1e-4).peaks(6)
    assert np.all(np.diff(up) > 0)
    down = SpikeTrain(0.05, "zero").peaks(6)
    assert np.all(np.diff(down) < 0)


def test_nonnegative_odd_primitive():
    train = SpikeTrain(1e-3)
    ts = np.geomspace(1e-5, 1e4, 400)
    assert np.all(train.f(ts) >= 0)
    assert np.allclose(train.F(-ts), -train.F(ts))
    assert np.all(np.diff(train.F(ts)) >= -1e-12 * train.F(ts[1:]))


def test_primitive_matches_fine_integration():
    train = SpikeTrain(1e-2)
    start, peak, end = train.stages(2)[1]
    xs = np.linspace(0.0, end, 200_001)
    trapezoid = np.trapezoid if hasattr(np, "trapezoid") else np.trapz
    integral = trapezoid(train.f(xs), xs)
    assert float(train.F(end)) == pytest.approx(integral, rel=1e-6)


def test_derivative_matches_differences():
    train = SpikeTrain(1e-2)
    start, peak, _ = train.stages(2)[1]
    for frac in (0.125, 0.375, 0.625, 0.875):  # avoid the apex, where f has a kink
        t = start + frac * (peak - start)
        h = 1e-7 * t
        fd = (float(train.f(t + h)) - float(train.f(t - h))) / (2 * h)
        assert float(train.df(t)) == pytest.approx(fd, rel=1e-5)


def test_invalid_parameters():
    with pytest.raises((StructuralError, ValueError)):
        SpikeTrain(-1.0)
    with pytest.raises((StructuralError, ValueError)):
        SpikeTrain(1e-3, direction="sideways")
