import random
from fractions import Fraction

import pytest

from eostrata.dieudonne import standard_module
from eostrata.exact_core import TruncatedWittRing, WittLattice
from eostrata.newton import (
    LinearFrobenius,
    NewtonPolygon,
    S,
    T,
    canonical_lift,
    corr_table,
    dominance_edges,
    exact_slopes,
    hasse_criteria,
    in_lat1,
    lambda_max,
    monomial_lambda_min,
    mu_ordinary_polygon,
    newton_strata,
    polygon_dominance,
    random_lat1,
    slope_zero_calculus,
    supersingular_polygon,
    truncated_lambda_min,
)

R2 = TruncatedWittRing(2, 24)


@pytest.mark.parametrize("n", range(2, 7))
def test_lift_reduces_to_standard_module(n):
    for a in range(1, n + 1):
        for b in range(1, n + 1):
            W = canonical_lift(n, a, b).to_witt(R2)
            assert W.check_fv()
            m, s = W.reduce(), standard_module(n, a, b, p=2)
            assert (m.F1, m.F2, m.V1, m.V2) == (s.F1, s.F2, s.V1, s.V2)


@pytest.mark.parametrize("n", range(2, 7))
def test_exact_slopes(n):
    for a in range(1, n + 1):
        for b in range(1, n + 1):
            P = exact_slopes(canonical_lift(n, a, b))
            assert P.width == 2 * n and P.rise == n and P.has_even_multiplicities()
            if a <= b:
                assert P == supersingular_polygon(n)
    want = NewtonPolygon.from_multiset([(0, 2), (Fraction(1, 2), 2 * n - 4), (1, 2)])
    assert exact_slopes(canonical_lift(n, n, 1)) == want == mu_ordinary_polygon(n)


def test_estimators_bracket_exact_values():
    for n in (2, 3, 4):
        for a in range(1, n + 1):
            for b in range(1, n + 1):
                L = canonical_lift(n, a, b)
                P = exact_slopes(L)
                W = L.to_witt(R2)
                for m in (1, 2, 5, 11):
                    lo = truncated_lambda_min(W, m)
                    assert lo.value == monomial_lambda_min(L, m)
                    assert abs(lo.value - P.slopes[0][0]) <= lo.error_bound
                    hi = lambda_max(W, m)
                    assert abs(hi.value - P.slopes[-1][0]) <= hi.error_bound


def test_hasse_booleans_follow_extreme_slopes():
    for n in (2, 3, 4):
        for a in range(1, n + 1):
            for b in range(1, n + 1):
                L = canonical_lift(n, a, b)
                P = exact_slopes(L)
                got = hasse_criteria(L.to_witt(R2))
                assert got == (P.slopes[0][0] >= Fraction(1, 4), P.slopes[-1][0] <= Fraction(3, 4))
        assert hasse_criteria(canonical_lift(n, n, 1).to_witt(R2)) == (False, False)


@pytest.mark.parametrize("n", range(2, 9))
def test_strata_count(n):
    strata = newton_strata(n)
    assert len(strata) == n * (n - 1) // 2 + 1
    assert len({s.polygon for s in strata}) == len(strata)


def test_n3_dominance():
    edges = set(dominance_edges(3))
    assert ("N1,2", "N1,1") in edges and ("N1,2", "N2,2") in edges
    assert ("N1,1", "ss") in edges and ("N2,2", "ss") in edges
    assert ("N1,1", "N2,2") not in edges and ("N2,2", "N1,1") not in edges
    P = {s.label: s.polygon for s in newton_strata(3)}
    assert polygon_dominance(P["N1,1"], P["N2,2"]) == "incomparable"


def test_slope_zero_calculus_table():
    rng = random.Random(3)
    for _ in range(40):
        p = rng.choice([2, 3])
        r = rng.randint(2, 4)
        F = LinearFrobenius.random_unit(TruncatedWittRing(p, 24), r, rng)
        H = random_lat1(F, rng)
        assert in_lat1(F, H)
        d = slope_zero_calculus(F, H)
        assert d.s <= r - 1 and d.t <= r - 1
        assert (d.s == 0) == (d.t == 0) == (F.apply_lattice(H) == H)
        for i in range(d.s + 2):
            Si = S(F, H, i)
            for j in range(d.s + d.t + 2):
                assert T(F, Si, j) == corr_table(F, H, i, j, d)


def test_identity_frobenius_is_stable():
    R = TruncatedWittRing(2, 24)
    F = LinearFrobenius.random_unit(R, 3, random.Random(0))
    L0 = WittLattice.standard(R, 3, 2)
    assert F.apply_lattice(L0) == L0
    assert slope_zero_calculus(F, L0).s == 0
