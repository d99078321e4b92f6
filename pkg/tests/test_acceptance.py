"""One test per acceptance criterion; each records a PASS/FAIL line with its numbers.

The lines are printed in the terminal summary of every pytest run (see
``conftest.py``); ``nc-spectra check`` prints the same lines without pytest.
"""

import pytest

from ncspectra.checks import CHECKS

RESULTS = {}


@pytest.mark.parametrize("check", CHECKS, ids=[f"criterion_{i:02d}" for i in range(1, len(CHECKS) + 1)])
def test_criterion(check):
    result = check()
    RESULTS[result.number] = result
    print(result.line())
    assert result.passed, result.line()
