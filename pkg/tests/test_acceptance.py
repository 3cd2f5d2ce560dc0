"""One test per acceptance criterion; each prints a single PASS/FAIL line.

Set EOSTRATA_ACCEPTANCE=quick for reduced ranges and EOSTRATA_SEED to
change the seed (default 0).  The full profile needs about eight minutes,
most of it in criterion 8.
"""

import os

import pytest

from eostrata import acceptance

SEED = int(os.environ.get("EOSTRATA_SEED", "0"))
QUICK = os.environ.get("EOSTRATA_ACCEPTANCE", "full") == "quick"

TOLERANCE = {
    1: "exact", 2: "exact", 3: "exact", 4: "exact",
    5: "exact rationals, estimators within 2n/24",
    6: "exact", 7: "exact", 8: "exact", 9: "exact rationals", 10: "exact",
    11: "exact", 12: "exact", 13: "exact", 14: "byte-identical",
}


def report(capsys, res):
    with capsys.disabled():
        print(f"\n[acceptance] {res.line()} (tolerance: {TOLERANCE[res.number]})")


@pytest.mark.parametrize("number", [1, 2, 3, 4, 5, 6, 7, 8, 10, 11, 12, 13, 14])
def test_criterion(number, capsys):
    res = acceptance.CRITERIA[number](SEED, QUICK)
    report(capsys, res)
    assert res.ok, res.detail


@pytest.mark.xfail(
    strict=True,
    reason="the printed dual-form exponent 1-i is only consistent with form 1 for n = 2; "
    "summing form 1 over hyperplanes gives 3-n-i (see test_criterion_9_consistent_exponent)",
)
def test_criterion_9(capsys):
    res = acceptance.criterion_9(SEED, QUICK)
    report(capsys, res)
    assert res.ok, res.detail


def test_criterion_9_consistent_exponent(capsys):
    # same sampler and seed, dual form taken with the exponent implied by form 1
    res = acceptance.criterion_9(SEED, QUICK, exponent="dual")
    with capsys.disabled():
        print(f"\n[acceptance] (supplementary) {res.line()}")
    assert res.ok, res.detail
