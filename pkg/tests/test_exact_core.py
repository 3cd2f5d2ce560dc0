import pytest
from fractions import Fraction

from eostrata.exact_core import (
    Coeff,
    PrecisionError,
    TruncatedWittRing,
    WittLattice,
    count_subspaces,
    all_subspaces,
    default_precision,
    gf,
    is_irreducible,
    kernel,
    rank,
)


@pytest.mark.parametrize("p,m", [(2, 2), (3, 2), (2, 4), (5, 2)])
def test_field_axioms(p, m):
    F = gf(p, m)
    assert F.q == p**m
    for a in range(1, F.q):
        assert F.mul(a, F.inv(a)) == 1
    # Frobenius has order m
    for a in F.elements():
        assert F.frobenius(a, m) == a


def test_conway_modulus_irreducible():
    F = gf(3, 2)
    assert is_irreducible(F.modulus, 3)


def test_subspace_counts_match_enumeration():
    F = gf(2, 2)
    for n, k in [(3, 1), (3, 2), (4, 2)]:
        assert len(list(all_subspaces(F, n, k))) == count_subspaces(4, n, k)
    assert count_subspaces(4, 3, 1) == 21


def test_coeff_parse_and_convert():
    assert Coeff.parse("Q") == Coeff()
    c = Coeff.parse("Fl:7")
    assert c.ell == 7 and str(c) == "Fl:7"
    assert c.convert(Fraction(1, 2)) == 4
    with pytest.raises(ValueError):
        Coeff.parse("Fl:9")
    with pytest.raises(ValueError):
        Coeff.parse("R")


def test_kernel_and_rank_over_q_and_fl():
    M = [[1, 2, 3], [2, 4, 6], [1, 0, 1]]
    assert rank(M, Coeff()) == 2
    ker = kernel(M, Coeff())
    assert len(ker) == 1
    v = ker[0]
    assert all(sum(Fraction(a) * b for a, b in zip(row, v)) == 0 for row in M)
    # mod 2 the rows become (1,0,1), 0, (1,0,1)
    assert rank(M, Coeff(2)) == 1


def test_witt_sigma_is_involution():
    R = TruncatedWittRing(3, 10)
    for u in range(0, 40, 7):
        for v in range(0, 40, 5):
            x = R.elt(u, v)
            assert R.sigma(R.sigma(x)) == x
    assert R.valuation(R.p_power(4)) == 4


def test_lattice_canonical_form_and_window():
    R = TruncatedWittRing(2, 8)
    L0 = WittLattice.standard(R, 2, 2)
    pL0 = WittLattice.standard(R, 2, 2, 1)
    assert L0.contains(pL0) and not pL0.contains(L0)
    assert pL0.colength_in(L0) == 2
    # the same lattice from a different basis has the same key
    basis = [[R.elt(1), R.elt(1)], [R.elt(0), R.elt(1)]]
    assert WittLattice.from_basis(R, 2, 2, basis) == L0
    assert L0.scale(1) == pL0
    with pytest.raises(PrecisionError):
        L0.scale(3)
    with pytest.raises(PrecisionError):
        WittLattice(TruncatedWittRing(2, 4), 2, 2, [])


def test_elementary_divisors():
    R = TruncatedWittRing(2, 10)
    L0 = WittLattice.standard(R, 3, 2)
    M = WittLattice.from_basis(R, 3, 2, [[R.elt(1), R.elt(0), R.elt(0)],
                                         [R.elt(0), R.elt(2), R.elt(0)],
                                         [R.elt(0), R.elt(0), R.elt(4)]])
    assert M.elementary_divisors(L0) == (2, 1, 0)


def test_precision_env(monkeypatch):
    monkeypatch.setenv("EOSTRATA_PRECISION", "30")
    assert default_precision() == 30
    monkeypatch.setenv("EOSTRATA_PRECISION", "1")
    with pytest.raises(ValueError):
        default_precision()
    monkeypatch.delenv("EOSTRATA_PRECISION")
    assert default_precision() == 24
