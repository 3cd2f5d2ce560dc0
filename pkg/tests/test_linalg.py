import random
from fractions import Fraction

import numpy as np

from eostrata.exact_core import Coeff, rank
from eostrata.linalg import KernelSpace, SparseEchelon, echelon, same_row_space


def _dense(rows, ncols):
    return [[r.get(c, 0) for c in range(ncols)] for r in rows]


def _random_rows(rng, nrows, ncols, density=0.3):
    rows = []
    for _ in range(nrows):
        r = {c: rng.randint(-3, 3) for c in range(ncols) if rng.random() < density}
        rows.append({c: v for c, v in r.items() if v})
    return rows


def test_rank_agrees_with_dense_solver():
    rng = random.Random(4)
    for _ in range(30):
        rows = _random_rows(rng, 8, 10)
        for coeff in (Coeff(), Coeff(3), Coeff(7)):
            assert echelon(rows, coeff, 10).rank == rank(_dense(rows, 10), coeff)


def test_kernel_basis_is_annihilated():
    rng = random.Random(5)
    rows = _random_rows(rng, 6, 9)
    for coeff in (Coeff(), Coeff(5)):
        K = KernelSpace(echelon(rows, coeff, 9))
        basis = K.basis()
        assert len(basis) == K.dim
        for v in basis:
            assert K.contains(v)
            for r in rows:
                s = sum(Fraction(x) * v.get(c, 0) for c, x in r.items()) if coeff.ell is None else \
                    sum(x * v.get(c, 0) for c, x in r.items()) % coeff.ell
                assert s == 0


def test_row_space_equality_ignores_basis():
    rng = random.Random(6)
    rows = _random_rows(rng, 5, 7)
    mixed = []
    for _ in range(5):
        comb = {}
        for r in rows:
            f = rng.randint(-2, 2)
            for c, v in r.items():
                comb[c] = comb.get(c, 0) + f * v
        mixed.append({c: v for c, v in comb.items() if v})
    a = echelon(rows, Coeff(), 7)
    b = echelon(rows + mixed, Coeff(), 7)
    assert same_row_space(a, b)
    assert KernelSpace(a) == KernelSpace(b)
    c = echelon(rows + [{0: 1, 6: 1}], Coeff(), 7)
    assert same_row_space(a, c) == (c.rank == a.rank)


def test_rref_is_canonical():
    rows = [{0: 2, 1: 4}, {1: 3, 2: 1}]
    a = SparseEchelon(Coeff(), 3).extend(rows).rref()
    b = SparseEchelon(Coeff(), 3).extend([{0: 2, 1: 7, 2: 1}, {1: 6, 2: 2}]).rref()
    assert a == b
    assert a[0][0] == 1


def test_integer_rows_stay_primitive():
    E = SparseEchelon(Coeff(), 3)
    E.add({0: 6, 1: 9})
    assert E.rows[0] == {0: 2, 1: 3}
    assert not E.add({0: 4, 1: 6})
    assert E.contains({0: Fraction(2, 3), 1: 1})


def test_large_random_against_numpy():
    rng = np.random.default_rng(3)
    M = rng.integers(-2, 3, size=(40, 50)) * (rng.random((40, 50)) < 0.1)
    rows = [{int(c): int(M[r, c]) for c in np.nonzero(M[r])[0]} for r in range(40)]
    assert echelon(rows, Coeff(), 50).rank == np.linalg.matrix_rank(M)
