import math

import pytest

from freqhom.converter import PumpCurve
from freqhom.io import paper_config
from freqhom.params import Bandwidths, ExperimentConfig, LossBudget

REF_BW = Bandwidths(740.0, 93.0, 140.0, 70.0, 92.0)


@pytest.fixture(scope="session")
def bundled():
    return paper_config()


@pytest.fixture
def ideal_twin():
    """Balanced, lossless, noiseless, identical single photons through a flat converter at R = 1/2."""
    return ExperimentConfig(
        Bandwidths(100.0, 100.0, math.inf, math.inf, math.inf),
        LossBudget(1.0, 1.0, 1.0),
        PumpCurve(1.0, 0.0),
        input_kind="single-photon",
    )


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
