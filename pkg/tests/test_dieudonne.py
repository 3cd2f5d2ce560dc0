import random

import pytest

from eostrata.dieudonne import (
    ModificationError,
    UnclassifiableError,
    eo_classify,
    formula_module,
    invariants_distinct,
    is_stable,
    modification_signature_direct,
    modification_signature_formula,
    modify,
    random_invertible,
    random_modification,
    standard_module,
    supersingular_chain_exists,
    supersingular_chain_indices,
    validate,
)
from eostrata.exact_core import TruncatedWittRing, gf
from eostrata.newton import canonical_lift


@pytest.mark.parametrize("p", [2, 3])
@pytest.mark.parametrize("n", [2, 3, 4])
def test_standard_modules(n, p):
    for a in range(1, n + 1):
        for b in range(1, n + 1):
            M = standard_module(n, a, b, p=p)
            N = formula_module(n, a, b, p=p)
            assert validate(M)
            assert M.signature() == (1, n - 1)
            assert (M.F1, M.F2, M.V1, M.V2) == (N.F1, N.F2, N.V1, N.V2)
            assert eo_classify(M) == (a, b)
            assert supersingular_chain_indices(M) == list(range(a, b + 1))
    assert invariants_distinct(n, p)


def test_classification_is_basis_free():
    rng = random.Random(11)
    F = gf(3, 2)
    for _ in range(15):
        a, b = rng.randint(1, 3), rng.randint(1, 3)
        M = standard_module(3, a, b, F)
        N = M.change_basis(random_invertible(F, 3, rng), random_invertible(F, 3, rng))
        assert validate(N)
        assert eo_classify(N) == (a, b)


def test_unclassifiable():
    M = standard_module(3, 1, 2, p=2)
    bad = type(M)(M.n, M.field, M.F1, M.F2, M.F1, M.V2)  # V1 = F1 breaks FV = 0
    assert not validate(bad)
    with pytest.raises(UnclassifiableError):
        eo_classify(bad)


def test_chain_criterion_small():
    M = standard_module(3, 2, 3, p=2)
    assert [supersingular_chain_exists(M, i) for i in (1, 2, 3)] == [False, True, True]
    with pytest.raises(ValueError):
        supersingular_chain_exists(M, 4)


def test_random_modifications():
    rng = random.Random(7)
    seen = set()
    for _ in range(30):
        p = rng.choice([2, 3])
        n = rng.choice([2, 3])
        a, b = rng.randint(1, n), rng.randint(1, n)
        M = canonical_lift(n, a, b).to_witt(TruncatedWittRing(p, 24))
        m = rng.randint(1, 2)
        E1, E2 = random_modification(M, m, rng)
        assert is_stable(M, E1, E2)
        sig = modification_signature_formula(M, E1, E2)
        assert sig == modification_signature_direct(M, E1, E2)
        new, got = modify(M, E1, E2, m)
        assert got == sig and new.check_fv()
        red = new.reduce()
        assert validate(red) and red.signature() == sig
        seen.add(sig)
    assert len(seen) > 1


def test_chain_lift_gives_extreme_signature():
    # E1 = V D2, E2 = p D2 on the (1, n) lift
    for n in (2, 3, 4):
        M = canonical_lift(n, 1, n).to_witt(TruncatedWittRing(2, 24))
        D = M.standard_lattice(2)
        E1, E2 = M.image_V(2, D), D.scale(1)
        assert modify(M, E1, E2, 1)[1] == (0, n)
        assert modification_signature_direct(M, E1, E2) == (0, n)


def test_unstable_modification_rejected():
    M = canonical_lift(3, 3, 1).to_witt(TruncatedWittRing(2, 24))
    D = M.standard_lattice(2)
    E1 = M.image_V(2, D)
    with pytest.raises(ModificationError):
        modify(M, E1, D.scale(1), 1)
