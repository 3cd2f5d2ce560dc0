import itertools

import pytest

from eostrata.exact_core import Coeff
from eostrata.hecke_chow import build_window, ihara_n2_matrices, random_model
from eostrata.strata_complex import (
    IncidenceComplex,
    Stratum,
    e1_bottom_row,
    iwahori_pattern,
    k1_pattern,
    row_cohomology,
)


def test_pattern_shapes():
    for cx in (k1_pattern(2), k1_pattern(3), k1_pattern(2, hecke=True)):
        assert cx.validate() == []
        assert [len(cx.level(k)) for k in range(3)] == [4, 5, 2]
    iw = iwahori_pattern()
    assert iw.validate() == []
    assert [len(iw.level(k)) for k in range(3)] == [9, 9, 1]
    assert sorted(s.name for s in iw.level(0) if s.tag == "1") == ["Z01", "Z10"]
    assert iw.unspecified
    with pytest.raises(ValueError):
        k1_pattern(3, hecke=True)


def test_validate_reports_problems():
    bad = IncidenceComplex(
        "bad",
        [Stratum("A", 0, "V"), Stratum("B", 0, "E"), Stratum("A&B", 1, "V", {"A": "id", "B": "id"})],
        ["A", "B"],
    )
    assert any("id between" in msg for msg in bad.validate())
    with pytest.raises(ValueError):
        e1_bottom_row(bad, random_model(2, 2, 0))


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_d_squared_zero(seed):
    for cx, n in ((k1_pattern(2), 2), (k1_pattern(3), 3), (iwahori_pattern(), 3)):
        model = random_model(n, 2, seed)
        for drop in (False, True):
            for coeff in (Coeff(), Coeff(5)):
                rc = e1_bottom_row(cx, model, coeff, drop)
                assert rc.d_squared_zero()
                h = row_cohomology(rc)
                assert h[0] - h[1] + h[2] == rc.dims[0] - rc.dims[1] + rc.dims[2]


def test_euler_characteristic_matches_dims():
    cx = iwahori_pattern()
    m = random_model(3, 2, 4)
    rc = e1_bottom_row(cx, m)
    assert cx.euler_characteristic(m) == rc.dims[0] - rc.dims[1] + rc.dims[2]


def test_cohomology_independent_of_order():
    cx = k1_pattern(2)
    m = random_model(2, 2, 5)
    base = row_cohomology(e1_bottom_row(cx, m))
    for order in itertools.permutations(cx.order):
        assert row_cohomology(e1_bottom_row(cx.reordered(list(order)), m)) == base


@pytest.mark.parametrize("window", [(2, 2, 1), (2, 3, 1), (2, 2, 2)])
def test_hecke_row_is_ihara(window):
    M = build_window(*window).to_model()
    rc = e1_bottom_row(k1_pattern(2, hecke=True), M, Coeff(), drop_connected=True)
    im = ihara_n2_matrices(M)
    assert rc.d0.shape == im.alpha.shape and rc.d1.shape == im.beta.shape
    assert (rc.d0 != im.alpha).nnz == 0
    assert (rc.d1 != im.beta).nnz == 0
    assert rc.d_squared_zero()
    assert sum(rc.certified) == sum(im.beta_rows_ok)


def test_drop_connected_removes_point_summands():
    cx = k1_pattern(2)
    m = random_model(2, 2, 0)
    full = e1_bottom_row(cx, m)
    dropped = e1_bottom_row(cx, m, drop_connected=True)
    assert full.dims[0] - dropped.dims[0] == 2
    assert full.dims[1:] == dropped.dims[1:]
