import math
import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from ftgraph import Coupling, DefectArray

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("thorough", parent=settings.get_profile("default"), max_examples=600)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@st.composite
def couplings(draw, allow_phase=True):
    mag = draw(st.floats(0.2, 5.0))
    sign = draw(st.sampled_from([1.0, -1.0]))
    phi = draw(st.floats(0.0, 2 * math.pi, exclude_max=True)) if allow_phase else 0.0
    return Coupling(sign * mag, phi)


@st.composite
def defect_arrays(draw, min_n=0, max_n=8, min_gap=0.05, span=10.0):
    n = draw(st.integers(min_n, max_n))
    start = draw(st.floats(-span, span))
    gaps = draw(st.lists(st.floats(min_gap, 3.0), min_size=n, max_size=n))
    return DefectArray(tuple(start + np.cumsum([0.0] + gaps[:-1]))) if n else DefectArray()


momenta = st.floats(1e-3, 50.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# pass/fail lines collected by the acceptance suite, echoed in the terminal summary
ACCEPTANCE_LOG = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LOG:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LOG:
            terminalreporter.write_line(line)
