import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from pmlopt.core import Mechanism, make_prior

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# property suites run at least this many cases
MANY = 1000

EXAMPLE1_PRIOR = (0.4, 0.2, 0.2, 0.2)
EXAMPLE1_EPS = math.log(9 / 8)
EXAMPLE1_MATRIX = np.array([
    [0.325, 0.225, 0.225, 0.225],
    [0.45, 0.1, 0.225, 0.225],
    [0.45, 0.225, 0.1, 0.225],
    [0.45, 0.225, 0.225, 0.1],
])
UNIFORM4_MATRIX = np.array([
    [0.75, 0.25, 0, 0],
    [0, 0.75, 0.25, 0],
    [0, 0, 0.75, 0.25],
    [0.25, 0, 0, 0.75],
])


@st.composite
def priors(draw, min_n=2, max_n=6, floor=0.01):
    n = draw(st.integers(min_n, max_n))
    w = draw(st.lists(st.floats(floor, 1.0), min_size=n, max_size=n))
    return make_prior(np.asarray(w) / sum(w))


@st.composite
def mechanisms(draw, n, min_m=1, max_m=6, sparse=True):
    m = draw(st.integers(min_m, max_m))
    lo = 0.0 if sparse else 0.01
    rows = draw(st.lists(st.lists(st.floats(lo, 1.0), min_size=m, max_size=m), min_size=n, max_size=n))
    mat = np.asarray(rows)
    mat[mat.sum(axis=1) == 0, 0] = 1.0
    return Mechanism(mat / mat.sum(axis=1, keepdims=True))


@st.composite
def prior_and_mechanism(draw, max_n=6, max_m=6):
    p = draw(priors(max_n=max_n))
    return p, draw(mechanisms(p.n, max_m=max_m))


@st.composite
def prior_and_eps(draw, min_n=2, max_n=6, frac_hi=0.999):
    p = draw(priors(min_n=min_n, max_n=max_n))
    frac = draw(st.floats(0.0, frac_hi))
    return p, frac * p.eps_max


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def criterion():
    """``report(number, ok, detail)``: record one acceptance line, then assert."""

    def report(number, ok, detail):
        _ACCEPTANCE[number] = (bool(ok), detail)
        print(f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")
        assert ok, detail

    return report


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[number]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {number:2d}: {detail}")
