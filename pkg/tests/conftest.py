import numpy as np
import pytest

from hiddendriver.dynamics import LogisticTriadParams, logistic_triad_simulate


@pytest.fixture(scope="session")
def demo_sim():
    return logistic_triad_simulate(LogisticTriadParams.demo(), (0.4, 0.2, 0.3), 20000, seed=11)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
