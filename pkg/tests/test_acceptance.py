"""The twelve acceptance criteria, one test each, with a pass/fail line per criterion.

Thresholds and runtime limits live on the criteria themselves so the CLI
`accept` command and this file check exactly the same thing.
"""

import pytest

from skeintrace.acceptance import CRITERIA, Context, run_criterion


@pytest.fixture(scope="module")
def ctx():
    return Context()


@pytest.mark.parametrize("criterion", CRITERIA, ids=lambda c: f"{c.number:02d}-{c.slug.replace(' ', '-')}")
def test_acceptance_criterion(criterion, ctx, capsys):
    result = run_criterion(criterion, ctx)
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.measured


def test_criteria_are_numbered_one_to_twelve():
    assert [c.number for c in CRITERIA] == list(range(1, 13))
