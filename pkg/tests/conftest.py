import sys

import numpy as np
import pytest

from homstruct.models import make_h2xr, make_h2xr_solv, make_s2xr


@pytest.fixture(scope="session")
def s2xr():
    return make_s2xr()


@pytest.fixture(scope="session")
def h2xr():
    return make_h2xr()


@pytest.fixture(scope="session")
def h2xr_solv():
    return make_h2xr_solv()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion that ran."""
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for line in sorted(results, key=lambda s: int(s.split("] ")[1].split(".")[0])):
            terminalreporter.write_line(line)
