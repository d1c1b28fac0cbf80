"""All nine acceptance criteria at their stated tolerances and time limits."""

import pytest

from twisted_sutherland.acceptance import CRITERIA, run_criterion


@pytest.mark.parametrize("number", [num for num, *_ in CRITERIA], ids=[f"criterion-{num}" for num, *_ in CRITERIA])
def test_criterion(number, record_acceptance):
    result = run_criterion(number)
    record_acceptance(result.line())
    print(result.line())
    assert result.passed, result.detail
    assert result.within_time, f"took {result.seconds:.1f}s, limit {result.time_limit}s"
