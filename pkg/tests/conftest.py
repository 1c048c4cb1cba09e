import numpy as np
import pytest

from cuspnp.frequency import default_grid
from cuspnp.geometry import DomainSpec

CRESCENT = DomainSpec.crescent(1.0, 0.5)
TOUCHING = DomainSpec.touching(1.0, 0.5)


@pytest.fixture(scope="session")
def crescent():
    return CRESCENT


@pytest.fixture(scope="session")
def touching():
    return TOUCHING


@pytest.fixture(scope="session", params=["crescent", "touching"])
def domain(request):
    return CRESCENT if request.param == "crescent" else TOUCHING


_GRIDS = {}


def grid_for(domain):
    key = (domain.kind, domain.R, domain.r)
    if key not in _GRIDS:
        _GRIDS[key] = default_grid(domain)
    return _GRIDS[key]


@pytest.fixture
def grid(domain):
    return grid_for(domain)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


_CRITERIA = []


@pytest.fixture
def record():
    """Record one acceptance line: ``record(label, passed, detail)``."""
    def _record(label, passed, detail):
        _CRITERIA.append((label, bool(passed), detail))
        return passed
    return _record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, detail in _CRITERIA:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {label}: {detail}")
