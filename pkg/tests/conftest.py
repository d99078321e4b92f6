import sys

import pytest

from ncspectra.model import PotentialParams


@pytest.fixture
def reference_params():
    """Linear plus harmonic potential with the n=0, m=0 admissible Coulomb strength."""
    return PotentialParams(2.0, 1.0, -1.0)


@pytest.fixture
def oscillator():
    return PotentialParams(0.0, 1.0, 0.0)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number].line())
