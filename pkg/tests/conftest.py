import numpy as np
import pytest

from qcpd.models import CpdFactors
from qcpd.qmatrix import QMatrix

# filled by tests/test_acceptance.py, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_factors(rng, dims=(6, 5, 4), F=3) -> CpdFactors:
    N1, N2, N3 = dims
    return CpdFactors(QMatrix.random(N1, F, rng), rng.standard_normal((N2, F)),
                      QMatrix.random(N3, F, rng))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
