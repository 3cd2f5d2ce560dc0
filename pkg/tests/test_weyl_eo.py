from collections import Counter

import pytest

from eostrata.weyl_eo import (
    EOLabel,
    closure,
    enumerate_jw,
    extremes,
    in_jw,
    is_supersingular,
    label_of,
    order_is_partial,
    psi_order_leq,
    strata_rows,
)


@pytest.mark.parametrize("n", range(2, 9))
def test_census(n):
    labels = enumerate_jw(n)
    assert len(labels) == n * n
    for lab in labels:
        assert in_jw(lab.w)
        assert label_of(lab.w) == lab
        assert lab.length == lab.dimension == lab.a - lab.b + n - 1


def test_n3_dimension_multiset():
    dims = Counter(lab.dimension for lab in enumerate_jw(3))
    assert dims == Counter({0: 1, 1: 2, 2: 3, 3: 2, 4: 1})


@pytest.mark.parametrize("n", [2, 3, 4])
def test_order_extremes(n):
    assert order_is_partial(n)
    assert extremes(n) == ([(n, 1)], [(1, n)])
    assert len(closure(EOLabel(n, n, 1))) == n * n
    assert closure(EOLabel(n, 1, n)) == [EOLabel(n, 1, n)]


def test_order_refines_dimension():
    labels = enumerate_jw(4)
    for u in labels:
        for v in labels:
            if u != v and psi_order_leq(u, v):
                assert u.dimension < v.dimension


def test_supersingular_labels():
    n = 4
    ss = [lab for lab in enumerate_jw(n) if is_supersingular(lab)]
    assert len(ss) == n * (n + 1) // 2
    # closed under specialisation
    for lab in ss:
        assert all(is_supersingular(c) for c in closure(lab))


def test_rows_for_report():
    rows = strata_rows(3)
    assert len(rows) == 9
    top = next(r for r in rows if (r["a"], r["b"]) == (3, 1))
    assert top["dimension"] == 4 and len(top["closure"]) == 9


def test_bad_labels():
    with pytest.raises(ValueError):
        EOLabel(3, 0, 1)
    with pytest.raises(ValueError):
        enumerate_jw(1)
