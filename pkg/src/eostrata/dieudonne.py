"""Reduced Dieudonne modules D = D1 + D2 of a (1, n-1) unitary p-divisible group.

F maps D_i to D_{i+1} sigma-semilinearly and V maps D_i to D_{i-1}
sigma^-1-semilinearly (indices mod 2).  A semilinear map is stored as a
matrix together with a twist exponent: ``SemilinearMap(M, t)`` sends a column
vector x to M * phi^t(x), where phi is the coordinatewise Frobenius.  Matrix
columns are the images of the basis vectors.

Two flavours are provided:

* ``ModPDieudonne`` over a ``FiniteField`` (the p-torsion module), with the
  canonical filtration, EO classification and the basis-subset chain test.
* ``WittDieudonne`` over a ``TruncatedWittRing`` (the integral module), with
  lattice modifications and the signature bookkeeping.
"""

from __future__ import annotations

import random
from functools import lru_cache
from itertools import combinations
from typing import Sequence

from .exact_core import (
    FiniteField,
    PrecisionError,
    Subspace,
    TruncatedWittRing,
    WittLattice,
    gf,
    rref_gf,
)

# ---------------------------------------------------------------------------
# small dense matrix helpers over a FiniteField (matrices are lists of rows)


def mat_zero(rows: int, cols: int) -> list:
    return [[0] * cols for _ in range(rows)]


def mat_identity(n: int) -> list:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(F: FiniteField, A: Sequence, B: Sequence) -> list:
    add, mul = F.add_t, F.mul_t
    cols = len(B[0]) if B else 0
    out = []
    for row in A:
        acc = [0] * cols
        for a, brow in zip(row, B):
            if a:
                ma = mul[a]
                acc = [add[x][ma[y]] for x, y in zip(acc, brow)]
        out.append(acc)
    return out


def mat_frob(F: FiniteField, A: Sequence, times: int) -> list:
    return [[F.frobenius(x, times) for x in row] for row in A]


def mat_transpose(A: Sequence) -> list:
    return [list(c) for c in zip(*A)] if A else []


def mat_inverse(F: FiniteField, A: Sequence) -> list:
    n = len(A)
    aug = [list(A[i]) + mat_identity(n)[i] for i in range(n)]
    basis, pivots = rref_gf(aug, F)
    if len(basis) < n or tuple(pivots[:n]) != tuple(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return [list(row[n:]) for row in basis]


def mat_rank(F: FiniteField, A: Sequence) -> int:
    return len(rref_gf(A, F)[0]) if A else 0


def mat_is_zero(A: Sequence) -> bool:
    return not any(any(row) for row in A)


def random_invertible(F: FiniteField, n: int, rng: random.Random) -> list:
    while True:
        g = [[rng.randrange(F.q) for _ in range(n)] for _ in range(n)]
        if mat_rank(F, g) == n:
            return g


class SemilinearMap:
    """x -> M * phi^twist(x) over a finite field."""

    __slots__ = ("field", "matrix", "twist")

    def __init__(self, field: FiniteField, matrix: Sequence, twist: int):
        self.field = field
        self.matrix = [list(r) for r in matrix]
        self.twist = twist

    @property
    def shape(self):
        return len(self.matrix), len(self.matrix[0]) if self.matrix else 0

    def apply(self, x: Sequence[int]) -> list:
        F = self.field
        y = [F.frobenius(v, self.twist) for v in x]
        add, mul = F.add_t, F.mul_t
        out = []
        for row in self.matrix:
            acc = 0
            for a, b in zip(row, y):
                if a and b:
                    acc = add[acc][mul[a][b]]
            out.append(acc)
        return out

    def compose(self, inner: "SemilinearMap") -> "SemilinearMap":
        """self after inner: x -> A phi^s(B phi^t x) = A phi^s(B) phi^(s+t) x."""
        F = self.field
        m = mat_mul(F, self.matrix, mat_frob(F, inner.matrix, self.twist))
        return SemilinearMap(F, m, self.twist + inner.twist)

    def rank(self) -> int:
        return mat_rank(self.field, self.matrix)

    def is_zero(self) -> bool:
        return mat_is_zero(self.matrix)

    def image(self, X: Subspace) -> Subspace:
        rows = [self.apply(v) for v in X.basis]
        return Subspace(self.field, self.shape[0], rows)

    def preimage(self, X: Subspace) -> Subspace:
        """{y : M phi^t(y) in X}."""
        F = self.field
        ncols = self.shape[1]
        ann = X.orthogonal().basis  # h with h . x = 0 for x in X
        if not ann:
            return Subspace(F, ncols, mat_identity(ncols))
        cond = mat_mul(F, [list(h) for h in ann], self.matrix)
        lin = Subspace(F, ncols, cond).orthogonal()
        return lin.frobenius(-self.twist)


# ---------------------------------------------------------------------------
# mod p modules


class ModPDieudonne:
    """F1: D1->D2, F2: D2->D1 (twist +1) and V1: D1->D2, V2: D2->D1 (twist -1).

    The full space D = D1 + D2 has coordinates (D1 block, D2 block).
    """

    def __init__(self, n: int, field: FiniteField, F1, F2, V1, V2):
        self.n = n
        self.field = field
        self.F1 = [list(r) for r in F1]
        self.F2 = [list(r) for r in F2]
        self.V1 = [list(r) for r in V1]
        self.V2 = [list(r) for r in V2]
        for m in (self.F1, self.F2, self.V1, self.V2):
            if len(m) != n or any(len(r) != n for r in m):
                raise ValueError("F and V blocks must be n x n")

    def __repr__(self):
        return f"ModPDieudonne(n={self.n}, field={self.field})"

    def _block(self, top_right, bottom_left) -> list:
        n = self.n
        out = mat_zero(2 * n, 2 * n)
        for i in range(n):
            for j in range(n):
                out[i][n + j] = top_right[i][j]
                out[n + i][j] = bottom_left[i][j]
        return out

    @property
    def F(self) -> SemilinearMap:
        """Frobenius on D = D1 + D2."""
        return SemilinearMap(self.field, self._block(self.F2, self.F1), 1)

    @property
    def V(self) -> SemilinearMap:
        return SemilinearMap(self.field, self._block(self.V2, self.V1), -1)

    def signature(self) -> tuple:
        """(dim omega_1, dim omega_2) with omega_i = V(D_{i-1})."""
        F = self.field
        return (mat_rank(F, self.V2), mat_rank(F, self.V1))

    def change_basis(self, g1, g2) -> "ModPDieudonne":
        """Module in the basis whose vectors are the columns of g1, g2."""
        F = self.field
        h1, h2 = mat_inverse(F, g1), mat_inverse(F, g2)
        F1 = mat_mul(F, h2, mat_mul(F, self.F1, mat_frob(F, g1, 1)))
        F2 = mat_mul(F, h1, mat_mul(F, self.F2, mat_frob(F, g2, 1)))
        V1 = mat_mul(F, h2, mat_mul(F, self.V1, mat_frob(F, g1, -1)))
        V2 = mat_mul(F, h1, mat_mul(F, self.V2, mat_frob(F, g2, -1)))
        return ModPDieudonne(self.n, F, F1, F2, V1, V2)

    def graded(self, X: Subspace) -> tuple:
        """(dim X cap D1, dim X cap D2) for a graded subspace X."""
        n = self.n
        d1 = sum(1 for pc in X.pivots if pc < n)
        return (d1, X.rank - d1)

    def summand(self, i: int, rows: Sequence = None) -> Subspace:
        """D_i (i = 1 or 2), or the span of given D_i-coordinate rows inside D."""
        n = self.n
        if rows is None:
            rows = mat_identity(n)
        pad = [0] * n
        full = [list(r) + pad if i == 1 else pad + list(r) for r in rows]
        return Subspace(self.field, 2 * n, full)


def validate(M: ModPDieudonne) -> bool:
    """F V = V F = 0 and rank F1 + rank V2 = rank F2 + rank V1 = n."""
    Fm, Vm = M.F, M.V
    if not Fm.compose(Vm).is_zero() or not Vm.compose(Fm).is_zero():
        return False
    fld = M.field
    r = lambda m: mat_rank(fld, m)  # noqa: E731
    return r(M.F1) + r(M.V2) == M.n and r(M.F2) + r(M.V1) == M.n


def standard_module(n: int, a: int, b: int, field: FiniteField | None = None, p: int = 2):
    """The standard module of the label (a, b).

    F(e1_i) = e2_i (i < a), 0 (i = a), e2_{i-1} (i > a); F(e2_b) = e1_1;
    V(e1_1) = 0, V(e1_i) = e2_{i-1} (2 <= i <= b), e2_i (i > b); V(e2_n) = e1_a.
    """
    if not (1 <= a <= n and 1 <= b <= n):
        raise ValueError(f"label ({a},{b}) out of range for n={n}")
    field = field or gf(p, 2)
    F1, F2, V1, V2 = (mat_zero(n, n) for _ in range(4))
    for i in range(1, n + 1):
        if i < a:
            F1[i - 1][i - 1] = 1
        elif i > a:
            F1[i - 2][i - 1] = 1
        if 2 <= i <= b:
            V1[i - 2][i - 1] = 1
        elif i > b:
            V1[i - 1][i - 1] = 1
    F2[0][b - 1] = 1
    V2[a - 1][n - 1] = 1
    return ModPDieudonne(n, field, F1, F2, V1, V2)


def formula_module(n: int, a: int, b: int, field: FiniteField | None = None, p: int = 2):
    """Standard module rebuilt from the Weyl-group action formula.

    With f(1) = 1, f(2) = n - 1 and (w1, w2) the coset representative:
    F(e_{i,j}) = 0 if w_i(j) <= f(i), else e_{i+1, w_i(j) - f(i)};
    V(e_{i+1,j}) = 0 if j <= n - f(i), else e_{i,k} with j = n - f(i) + w_i(k).
    Used as an independent cross-check of ``standard_module``.
    """
    from .weyl_eo import EOLabel, inverse

    lab = EOLabel(n, a, b)
    w = {1: lab.w.w1, 2: lab.w.w2}
    f = {1: 1, 2: n - 1}
    field = field or gf(p, 2)
    Fm = {1: mat_zero(n, n), 2: mat_zero(n, n)}  # Fm[i]: D_i -> D_{i+1}
    Vm = {1: mat_zero(n, n), 2: mat_zero(n, n)}  # Vm[i]: D_i -> D_{i-1}
    for i in (1, 2):
        nxt = 2 if i == 1 else 1
        wi = w[i]
        winv = inverse(wi)
        for j in range(1, n + 1):
            if wi[j - 1] > f[i]:
                Fm[i][wi[j - 1] - f[i] - 1][j - 1] = 1
        # V on D_{i+1} lands in D_i
        for j in range(1, n + 1):
            if j > n - f[i]:
                k = winv[j - (n - f[i]) - 1]
                Vm[nxt][k - 1][j - 1] = 1
    return ModPDieudonne(n, field, Fm[1], Fm[2], Vm[1], Vm[2])


def canonical_filtration(M: ModPDieudonne) -> list:
    """Closure of {0, D} under X -> F(X) and X -> V^-1(X), sorted by graded dims."""
    Fm, Vm = M.F, M.V
    n2 = 2 * M.n
    zero = Subspace(M.field, n2, [])
    full = Subspace(M.field, n2, mat_identity(n2))
    seen = {zero, full}
    frontier = [zero, full]
    while frontier:
        nxt = []
        for X in frontier:
            for Y in (Fm.image(X), Vm.preimage(X)):
                if Y not in seen:
                    seen.add(Y)
                    nxt.append(Y)
        frontier = nxt
    return sorted(seen, key=lambda X: (X.rank, M.graded(X), X.basis))


def filtration_invariant(M: ModPDieudonne) -> tuple:
    """Sorted tuple of (graded dims of X, graded dims of F(X), graded dims of V(X))."""
    Fm, Vm = M.F, M.V
    inv = []
    for X in canonical_filtration(M):
        inv.append((M.graded(X), M.graded(Fm.image(X)), M.graded(Vm.image(X))))
    return tuple(sorted(inv))


@lru_cache(maxsize=None)
def _standard_invariants(n: int, p: int) -> dict:
    out = {}
    for a in range(1, n + 1):
        for b in range(1, n + 1):
            out.setdefault(filtration_invariant(standard_module(n, a, b, p=p)), []).append((a, b))
    return out


class UnclassifiableError(ValueError):
    """Module whose invariant matches no standard (1, n-1) module."""


def eo_classify(M: ModPDieudonne) -> tuple:
    """The label (a, b) whose standard module has the same filtration invariant."""
    if not validate(M):
        raise UnclassifiableError("module fails the Dieudonne axioms")
    if M.signature() != (1, M.n - 1):
        raise UnclassifiableError(f"signature {M.signature()} is not (1, n-1)")
    table = _standard_invariants(M.n, M.field.p)
    hits = table.get(filtration_invariant(M), [])
    if len(hits) != 1:
        raise UnclassifiableError("no unique standard module matches")
    return hits[0]


def invariants_distinct(n: int, p: int = 2) -> bool:
    return all(len(v) == 1 for v in _standard_invariants(n, p).values()) and len(
        _standard_invariants(n, p)
    ) == n * n


def supersingular_chain_exists(M: ModPDieudonne, i: int) -> bool:
    """Search basis-subset pairs E1 (dim i in D1), E2 (dim i-1 in D2) stable under F, V."""
    n = M.n
    if not 1 <= i <= n:
        raise ValueError("chain index out of range")
    Fm, Vm = M.F, M.V
    for s1 in combinations(range(n), i):
        E1 = M.summand(1, [[1 if j == k else 0 for j in range(n)] for k in s1])
        if not (Vm.image(E1).rank <= i - 1 and Fm.image(E1).rank <= i - 1):
            continue
        for s2 in combinations(range(n), i - 1):
            E2 = M.summand(2, [[1 if j == k else 0 for j in range(n)] for k in s2])
            E = E1.sum(E2)
            if E.contains(Fm.image(E)) and E.contains(Vm.image(E)):
                return True
    return False


def supersingular_chain_indices(M: ModPDieudonne) -> list:
    return [i for i in range(1, M.n + 1) if supersingular_chain_exists(M, i)]


# ---------------------------------------------------------------------------
# integral modules over the truncated Witt ring


def _wmat_mul(R: TruncatedWittRing, A, B):
    cols = len(B[0])
    out = []
    for row in A:
        acc = [(0, 0)] * cols
        for a, brow in zip(row, B):
            if a != (0, 0):
                acc = [R.add(x, R.mul(a, y)) for x, y in zip(acc, brow)]
        out.append(acc)
    return out


def _wmat_sigma(R: TruncatedWittRing, A, times: int):
    if times % 2 == 0:
        return [list(r) for r in A]
    return [[R.sigma(x) for x in row] for row in A]


def _wapply(R, M, twist, x):
    y = [R.sigma(v) for v in x] if twist % 2 else list(x)
    out = []
    for row in M:
        acc = (0, 0)
        for a, b in zip(row, y):
            if a != (0, 0) and b != (0, 0):
                acc = R.add(acc, R.mul(a, b))
        out.append(acc)
    return out


class WittDieudonne:
    """Integral module: free W/p^s-modules D1, D2 of rank n with F, V blocks.

    F(x) = F_i * sigma(x) on D_i and V(x) = V_i * sigma^-1(x), FV = VF = p.
    """

    def __init__(self, ring: TruncatedWittRing, n: int, F1, F2, V1, V2):
        self.ring = ring
        self.n = n
        self.F1, self.F2, self.V1, self.V2 = ([list(r) for r in m] for m in (F1, F2, V1, V2))

    def F_on(self, i: int, x):
        return _wapply(self.ring, self.F1 if i == 1 else self.F2, 1, x)

    def V_on(self, i: int, x):
        return _wapply(self.ring, self.V1 if i == 1 else self.V2, -1, x)

    def check_fv(self) -> bool:
        """F V = V F = p on both summands (as matrices with the twists applied)."""
        R = self.ring
        p = R.p_power(1)
        n = self.n
        pid = [[p if i == j else (0, 0) for j in range(n)] for i in range(n)]
        fv1 = _wmat_mul(R, self.F2, _wmat_sigma(R, self.V1, 1))  # D1 -> D2 -> D1
        fv2 = _wmat_mul(R, self.F1, _wmat_sigma(R, self.V2, 1))
        vf1 = _wmat_mul(R, self.V2, _wmat_sigma(R, self.F1, -1))
        vf2 = _wmat_mul(R, self.V1, _wmat_sigma(R, self.F2, -1))
        return all(m == pid for m in (fv1, fv2, vf1, vf2))

    def reduce(self) -> ModPDieudonne:
        R = self.ring
        red = lambda m: [[R.reduce(x) for x in row] for row in m]  # noqa: E731
        return ModPDieudonne(self.n, R.field, red(self.F1), red(self.F2), red(self.V1), red(self.V2))

    def change_basis(self, g1, g2, h1, h2) -> "WittDieudonne":
        """Conjugate by g_i (columns = new basis) with given inverses h_i."""
        R = self.ring
        F1 = _wmat_mul(R, h2, _wmat_mul(R, self.F1, _wmat_sigma(R, g1, 1)))
        F2 = _wmat_mul(R, h1, _wmat_mul(R, self.F2, _wmat_sigma(R, g2, 1)))
        V1 = _wmat_mul(R, h2, _wmat_mul(R, self.V1, _wmat_sigma(R, g1, -1)))
        V2 = _wmat_mul(R, h1, _wmat_mul(R, self.V2, _wmat_sigma(R, g2, -1)))
        return WittDieudonne(R, self.n, F1, F2, V1, V2)

    # lattices inside D_i, in a window of radius r around the standard lattice
    def standard_lattice(self, r: int) -> WittLattice:
        return WittLattice.standard(self.ring, self.n, r)

    def _image_lattice(self, which: str, i: int, E: WittLattice) -> WittLattice:
        """F(E) or V(E) for E inside D_i, as a lattice in D_{i+-1}."""
        R = self.ring
        gens = []
        for row in E.rows:  # internal rows are p^r * (vectors of E)
            gens.append(self.F_on(i, row) if which == "F" else self.V_on(i, row))
        floor = R.p_power(2 * E.r)
        gens += [[floor if j == k else (0, 0) for j in range(self.n)] for k in range(self.n)]
        out = WittLattice(R, self.n, E.r, gens)
        return out

    def image_F(self, i, E):
        """F(E) + p^r L0 (the floor term keeps the result inside the window)."""
        return self._image_lattice("F", i, E)

    def image_V(self, i, E):
        return self._image_lattice("V", i, E)

    def signature(self, r: int = 1) -> tuple:
        """(a1, a2) with a_i = length(V D_{i-1} / p D_i)."""
        D = self.standard_lattice(r)
        pD = D.scale(1)
        return tuple(pD.colength_in(self.image_V(3 - i, D)) for i in (1, 2))


def is_stable(M: WittDieudonne, E1: WittLattice, E2: WittLattice) -> bool:
    """F(E_i) <= E_{i+1} and V(E_i) <= E_{i-1}."""
    E = {1: E1, 2: E2}
    for i in (1, 2):
        j = 3 - i
        for row in E[i].rows:
            if not E[j]._contains_n(M.F_on(i, row)):
                return False
            if not E[j]._contains_n(M.V_on(i, row)):
                return False
    return True


class ModificationError(ValueError):
    pass


def modification_signature_formula(M: WittDieudonne, E1: WittLattice, E2: WittLattice) -> tuple:
    """(a1 + l1 - l2, a2 + l2 - l1) with l_i = colength(E_i <= D_i)."""
    r = E1.r
    a = M.signature(r)
    D = M.standard_lattice(r)
    l1, l2 = E1.colength_in(D), E2.colength_in(D)
    return (a[0] + l1 - l2, a[1] + l2 - l1)


def modification_signature_direct(M: WittDieudonne, E1: WittLattice, E2: WittLattice) -> tuple:
    """length(V E_{i-1} / p E_i), computed from the V-images."""
    E = {1: E1, 2: E2}
    out = []
    for i in (1, 2):
        pE = E[i].scale(1)
        VE = M.image_V(3 - i, E[3 - i])
        out.append(pE.colength_in(VE))
    return tuple(out)


def _solve_triangular(R: TruncatedWittRing, rows, v):
    """Coordinates c with sum c_k rows[k] = v for an upper triangular basis."""
    n = len(rows)
    w = list(v)
    coords = []
    for k in range(n):
        piv = rows[k][k]
        e = w[k]
        kv = R.valuation(piv)
        f = R.divide_by_p_power(e, kv)
        unit = R.divide_by_p_power(piv, kv)
        c = R.mul(f, R.inv(unit))
        coords.append(c)
        w = [R.sub(x, R.mul(c, y)) for x, y in zip(w, rows[k])]
    if any(x != (0, 0) for x in w):
        raise ModificationError("vector is not in the lattice")
    return coords


def modify(M: WittDieudonne, E1: WittLattice, E2: WittLattice, m: int | None = None):
    """Module structure on (E1, E2) and its signature.

    Requires p^m D_i <= E_i <= D_i (m defaults to the window radius) and
    F, V stability.  Returns ``(new_module, signature)``; the new module lives
    over a ring of precision s - 2r to absorb the divisions.
    """
    R = M.ring
    r = E1.r
    if m is None:
        m = r
    if m > r - 1:
        raise PrecisionError("window radius must exceed m so that p E_i stays representable")
    D = M.standard_lattice(r)
    floor = D.scale(m)
    for E in (E1, E2):
        if not D.contains(E):
            raise ModificationError("E_i must lie in D_i")
        if not E.contains(floor):
            raise ModificationError("E_i must contain p^m D_i")
    if not is_stable(M, E1, E2):
        raise ModificationError("E is not stable under F and V")
    sig = modification_signature_formula(M, E1, E2)
    # induced matrices in the bases of E1, E2 (internal rows divided by p^r)
    basis = {}
    for i, E in ((1, E1), (2, E2)):
        basis[i] = [[R.divide_by_p_power(x, r) for x in row] for row in E.rows]
    s_new = R.s - 2 * r
    R2 = TruncatedWittRing(R.p, s_new)
    cut = lambda x: (x[0] % R2.mod, x[1] % R2.mod)  # noqa: E731
    mats = {}
    for name, op in (("F", M.F_on), ("V", M.V_on)):
        for i in (1, 2):
            j = 3 - i
            cols = [_solve_triangular(R, basis[j], op(i, b)) for b in basis[i]]
            mats[name + str(i)] = [[cut(cols[c][rr]) for c in range(M.n)] for rr in range(M.n)]
    newM = WittDieudonne(R2, M.n, mats["F1"], mats["F2"], mats["V1"], mats["V2"])
    return newM, sig


def close_under_fv(M: WittDieudonne, E1: WittLattice, E2: WittLattice, max_iter: int = 64):
    """Smallest F, V-stable pair containing (E1, E2)."""
    E = {1: E1, 2: E2}
    for _ in range(max_iter):
        changed = False
        for i in (1, 2):
            j = 3 - i
            new = E[i].sum(M.image_F(j, E[j])).sum(M.image_V(j, E[j]))
            if new != E[i]:
                E[i] = new
                changed = True
        if not changed:
            return E[1], E[2]
    raise RuntimeError("F, V closure did not stabilise")


def random_modification(M: WittDieudonne, m: int, rng: random.Random, gens: int = 2):
    """A random F, V-stable pair with p^m D <= E <= D, window radius m + 1."""
    R = M.ring
    r = m + 1
    D = M.standard_lattice(r)
    floor = D.scale(m)
    pr = R.p_power(r)
    E = {}
    for i in (1, 2):
        rows = []
        for _ in range(gens):
            v = [(rng.randrange(R.p ** (m + 1)), rng.randrange(R.p ** (m + 1))) for _ in range(M.n)]
            rows.append([R.mul(pr, x) for x in v])
        E[i] = WittLattice(R, M.n, r, rows + list(floor.rows))
    return close_under_fv(M, E[1], E[2])
