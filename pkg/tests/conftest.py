import math

import pytest

from fermionic_mi import PowerLawHopping, hopping_model, kitaev_model

# filled by tests/test_acceptance.py, printed after the run
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])


@pytest.fixture
def tb8():
    """Tight-binding ring, 8 sites, closed-shell filling 3/8."""
    return hopping_model(8, PowerLawHopping(math.inf), 0.375)


@pytest.fixture
def kitaev8():
    return kitaev_model(8, 1000.0, 1.5)
