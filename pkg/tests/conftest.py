import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from ccr_reduce import gbmodel as G
from ccr_reduce.scenario import bundled

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def grid5():
    return G.GBGrid(5, 2.0)


@pytest.fixture(scope="session")
def grid3():
    return G.GBGrid(3, 1.0)


@pytest.fixture(scope="session")
def gb_small():
    return bundled("gb_small")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(RESULTS):
            terminalreporter.write_line(line)
