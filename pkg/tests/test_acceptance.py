"""One test per acceptance criterion, at the stated tolerances.

Each test prints a PASS/FAIL line; the lines are repeated in the terminal
summary so they are visible without ``-s``.
"""
import pytest

from levylap.checks import CHECKS, run_check


@pytest.mark.parametrize("number", [n for n, *_ in CHECKS], ids=[f"criterion_{n:02d}" for n, *_ in CHECKS])
def test_criterion(number, acceptance_log):
    result = run_check(number)
    line = result.line()
    print(line)
    acceptance_log(line)
    assert result.passed, line
    assert result.elapsed_s <= result.budget_s, f"{line}: over the runtime budget"
