"""End-to-end acceptance criteria, one test per criterion.

Each test prints a single PASS/FAIL line; the lines are also repeated in
the pytest terminal summary so they show up without ``-s``.
"""
import pytest

from vecsched.harness.acceptance import CRITERIA

ACCEPTANCE_LINES: list[str] = []


@pytest.mark.acceptance
@pytest.mark.parametrize("criterion", CRITERIA, ids=[c.cell_name for c in CRITERIA])
def test_criterion(criterion):
    cell = criterion(0)
    line = cell.line()
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert cell.passed, line
