"""Acceptance suite: one test per criterion, each printing a single pass/fail line."""

import pytest

from nlslab.acceptance import CRITERIA, run_acceptance

RESULTS = []


@pytest.mark.parametrize("number", [n for n, _ in CRITERIA],
                         ids=[f"{n:02d}_{fn.__name__}" for n, fn in CRITERIA])
def test_criterion(number):
    (result,) = run_acceptance(only={number}, seed=0, stream=False)
    RESULTS.append(result.line())
    print(result.line())
    for name in result.failed_checks():
        print(f"  {name}: {result.checks[name]}")
    assert result.passed, result.line()
