import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def random_simplex(rng, L, faithful=True, floor=1e-3):
    w = rng.dirichlet(np.ones(L))
    if faithful:
        w = w + floor
    return w / w.sum()


def random_stochastic(rng, n, m):
    rows = rng.random((n, m)) + 1e-3
    return rows / rows.sum(axis=1, keepdims=True)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
