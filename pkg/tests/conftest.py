import numpy as np
import pytest

from _shared import ACCEPTANCE_RESULTS, polydecay, stewart


@pytest.fixture(scope="session")
def stewart1000():
    return stewart(1000)


@pytest.fixture(scope="session")
def stewart300():
    return stewart(300)


@pytest.fixture(scope="session")
def polydecay1000():
    return polydecay(1000)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num, ok, detail in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(f"criterion {num:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
