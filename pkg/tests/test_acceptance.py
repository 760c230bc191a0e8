"""Acceptance criteria, one test per criterion.

Run directly (``python tests/test_acceptance.py``) or under pytest; either
way one PASS/FAIL line is printed per criterion.
"""

import sys

import pytest

from modfrac.acceptance import CHECKS, run_check


@pytest.mark.parametrize("number", sorted(CHECKS))
def test_criterion(number, capsys):
    res = run_check(number)
    with capsys.disabled():
        print("\n" + res.line())
    assert res.passed, res.line()


if __name__ == "__main__":
    failed = 0
    for number in sorted(CHECKS):
        res = run_check(number)
        print(res.line(), flush=True)
        failed += not res.passed
    sys.exit(1 if failed else 0)
