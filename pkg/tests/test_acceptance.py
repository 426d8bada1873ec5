"""Acceptance suite: every shipped criterion must pass, with one visible
result line per criterion in the test output."""

import pytest

from pdc_lab.acceptance import CRITERIA


@pytest.mark.parametrize(
    "criterion", CRITERIA, ids=[fn.__name__ for fn in CRITERIA]
)
def test_criterion(criterion, capsys):
    result = criterion()
    with capsys.disabled():
        print()
        print(result.line())
    assert result.passed, f"{result.name}: {result.details}"
