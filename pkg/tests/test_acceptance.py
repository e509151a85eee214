"""Acceptance battery: one line per criterion, printed even without ``-s``."""

import pytest

from hyperexp.checks import CHECKS, run_checks

TITLES = {
    "C1": "three-way agreement",
    "C2": "first non-vanishing order",
    "C3": "reduction correctness",
    "C4": "elementary symmetric identities",
    "C5": "one-form consistency",
    "C6": "hyperlogarithm calculus",
    "C7": "binomial sums",
    "C8": "closed-form desk check",
}


def test_battery_is_complete():
    assert set(CHECKS) == set(TITLES)


@pytest.mark.parametrize("key", sorted(TITLES), ids=lambda k: f"{k}-{TITLES[k].replace(' ', '_')}")
def test_criterion(key, capsys):
    (result,) = run_checks([key])
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.summary
