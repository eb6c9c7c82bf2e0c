"""Every acceptance criterion at its stated tolerance, one PASS/FAIL line each."""

import pytest

from hypmax.acceptance import CHECKS, run_check


@pytest.mark.parametrize("key", list(CHECKS))
def test_criterion(key, capsys):
    result = run_check(key)
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.detail
