import numpy as np
import pytest

from tstein import params as P


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


FAMILIES = {
    "laplace": P.laplace(2.0),
    "gamma": P.gamma(2.0, 1.0),
    "svg": P.symmetric(1.0, 0.0, 2.0),
    "ts": P.tsd(1.0, 0.5, 2.0, 1.0, 0.5, 2.0),
}


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
