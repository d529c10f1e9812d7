import numpy as np
import pytest

from varsys.matrix_core import SpdMatrix


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_spd(rng, n, shift=0.5):
    """Random symmetric positive-definite matrix with lambda_1 >= shift."""
    b = rng.normal(size=(n, n))
    return SpdMatrix(b @ b.T + shift * np.eye(n))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[k])
