import math

import numpy as np
import pytest

from ramseyfringe.core import SequenceConfig

HALF_PI = math.pi / 2

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(20061019)


@pytest.fixture
def reference_sequence():
    """tau=1, T=5, Omega=pi/2 mesa pulses, opposite detunings."""

    def make(delta, t0=0.0, **kw):
        return SequenceConfig.opposite(delta, rabi=HALF_PI, tau=1.0, gap=5.0, entrance_time=t0, **kw)

    return make


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
