"""The acceptance gate: every criterion runs at its stated tolerance and
prints one pass/fail line (visible with ``pytest -s`` or in the CLI
``suite`` report)."""

import pytest

from hyperseries.acceptance import CRITERIA
from hyperseries.report import jsonable


@pytest.mark.parametrize("name", list(CRITERIA))
def test_criterion(name, env):
    result = CRITERIA[name](env)
    print("%-4s %s" % (result.status.upper(), name))
    assert result.passed, jsonable(result.details)
