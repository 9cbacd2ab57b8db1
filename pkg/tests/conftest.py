import numpy as np
import pytest

from mollowcav.models import TwoLevelParams, build_two_level

# one line per acceptance criterion, filled by test_acceptance.py
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def resonant_system():
    """Two-level model at g = kappa = gamma, Omega = Delta0 = 25 gamma."""
    system = build_two_level(TwoLevelParams(kappa=1.0, g=1.0))
    return system, system.steady_state()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
