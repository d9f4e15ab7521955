import warnings

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from nftnoise import TimeGrid, sech_pulse

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


_ACCEPTANCE = pytest.StashKey[dict]()


def pytest_configure(config):
    warnings.filterwarnings("ignore", category=UserWarning, module="nftnoise")
    config.stash[_ACCEPTANCE] = {}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, {})
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(lines):
        terminalreporter.write_line(lines[n])


@pytest.fixture
def acceptance(request):
    """``acceptance(n, title, passed, detail)`` records one criterion line."""

    def record(n: int, title: str, passed: bool, detail: str = "") -> None:
        line = f"criterion {n:>2}: {'PASS' if passed else 'FAIL'}  {title}"
        request.config.stash[_ACCEPTANCE][n] = line + (f"  ({detail})" if detail else "")
        print(request.config.stash[_ACCEPTANCE][n])

    return record


@pytest.fixture(scope="session")
def grid():
    return TimeGrid.symmetric(16.0, 2048)


@pytest.fixture(scope="session")
def two_sech(grid):
    return sech_pulse(2.0, grid)


@pytest.fixture(scope="session")
def one_sech(grid):
    return sech_pulse(1.0, grid)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
