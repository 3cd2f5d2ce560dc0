"""Exact arithmetic shared by every engine in the package.

Contents:

* ``FiniteField``: GF(p^m) with elements encoded as integers (base-p digits of
  the polynomial coefficients, low degree first) and full lookup tables.
* ``TruncatedWittRing``: W(GF(p^2)) / p^s realised as (Z/p^s)[x]/(q(x)) for a
  monic quadratic lift q of the GF(p^2) modulus, with the Frobenius lift sigma.
* Row reduction and kernels over GF(q), over prime fields GF(l) and over Q.
* ``Subspace``: canonical (reduced row echelon) subspaces of GF(q)^n.
* ``WittLattice``: full-rank lattices pinned in a precision window, stored in
  Howell normal form.

Nothing here uses floating point.
"""

from __future__ import annotations

import os
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterable, Sequence

import numpy as np

DEFAULT_PRECISION = 24
PRECISION_ENV = "EOSTRATA_PRECISION"


class GuardError(RuntimeError):
    """A size guard refused a computation (overridable by the caller)."""


class PrecisionError(ArithmeticError):
    """Raised when a result cannot be represented at the working precision."""


def default_precision() -> int:
    """Working precision s, overridable through ``EOSTRATA_PRECISION``."""
    raw = os.environ.get(PRECISION_ENV)
    if raw is None:
        return DEFAULT_PRECISION
    s = int(raw)
    if s < 2:
        raise ValueError(f"{PRECISION_ENV} must be at least 2, got {s}")
    return s


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


# Conway polynomials, coefficients low degree first, monic term included.
_MODULI = {
    (2, 1): (1, 1),
    (3, 1): (1, 1),
    (5, 1): (3, 1),
    (7, 1): (4, 1),
    (2, 2): (1, 1, 1),
    (3, 2): (2, 2, 1),
    (5, 2): (2, 4, 1),
    (7, 2): (3, 6, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (3, 4): (2, 0, 0, 2, 1),
    (5, 4): (2, 4, 4, 0, 1),
    (7, 4): (3, 4, 5, 0, 1),
}


def _poly_mod(a: list, m: Sequence[int], p: int) -> list:
    a = [c % p for c in a]
    dm = len(m) - 1
    while len(a) - 1 >= dm and any(a):
        if a[-1] == 0:
            a.pop()
            continue
        c = a[-1]
        shift = len(a) - 1 - dm
        for j, mj in enumerate(m):
            a[shift + j] = (a[shift + j] - c * mj) % p
        a.pop()
    while a and a[-1] == 0:
        a.pop()
    return a


def _has_factor_of_degree(m: Sequence[int], p: int, d: int) -> bool:
    for tail in product(range(p), repeat=d):
        f = list(tail) + [1]
        if not _poly_mod(list(m), f, p):
            return True
    return False


def is_irreducible(m: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg(m)/2."""
    deg = len(m) - 1
    return all(not _has_factor_of_degree(m, p, d) for d in range(1, deg // 2 + 1))


class FiniteField:
    """GF(p^m) with integer-encoded elements and precomputed tables.

    Element ``x`` has polynomial coefficients ``x // p**j % p`` in the fixed
    basis 1, t, ..., t^(m-1).
    """

    def __init__(self, p: int, m: int, modulus: Sequence[int] | None = None):
        if not is_prime(p):
            raise ValueError(f"p must be prime, got {p}")
        if m < 1:
            raise ValueError("extension degree must be positive")
        if modulus is None:
            if (p, m) in _MODULI:
                modulus = _MODULI[(p, m)]
            else:
                modulus = _first_irreducible(p, m)
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != m + 1 or modulus[-1] != 1:
            raise ValueError("modulus must be monic of degree m")
        if not is_irreducible(modulus, p):
            raise ValueError(f"modulus {modulus} is reducible over GF({p})")
        self.p = p
        self.m = m
        self.q = p**m
        self.modulus = modulus
        self._build_tables()

    def __repr__(self):
        return f"FiniteField({self.p}, {self.m})"

    def __eq__(self, other):
        return (
            isinstance(other, FiniteField)
            and (self.p, self.m, self.modulus) == (other.p, other.m, other.modulus)
        )

    def __hash__(self):
        return hash((self.p, self.m, self.modulus))

    # encoding helpers
    def to_coeffs(self, x: int) -> tuple:
        p = self.p
        return tuple((x // p**j) % p for j in range(self.m))

    def from_coeffs(self, coeffs: Sequence[int]) -> int:
        c = _poly_mod(list(coeffs), self.modulus, self.p) if len(coeffs) > self.m else [
            int(v) % self.p for v in coeffs
        ]
        return sum(int(v) * self.p**j for j, v in enumerate(c))

    @property
    def gen(self) -> int:
        """The class of t (equal to the integer p when m > 1)."""
        return self.from_coeffs([0, 1])

    def _build_tables(self):
        p, m, q = self.p, self.m, self.q
        coeffs = [self.to_coeffs(x) for x in range(q)]
        add = [[0] * q for _ in range(q)]
        mul = [[0] * q for _ in range(q)]
        for a in range(q):
            ca = coeffs[a]
            for b in range(a, q):
                cb = coeffs[b]
                s = self.from_coeffs([(u + v) % p for u, v in zip(ca, cb)])
                prod_ = [0] * (2 * m - 1)
                for i, u in enumerate(ca):
                    if u:
                        for j, v in enumerate(cb):
                            prod_[i + j] += u * v
                r = sum(c * p**j for j, c in enumerate(_poly_mod(prod_, self.modulus, p)))
                add[a][b] = add[b][a] = s
                mul[a][b] = mul[b][a] = r
        neg = [add[x].index(0) for x in range(q)]
        inv = [0] * q
        for a in range(1, q):
            inv[a] = mul[a].index(1)
        frob = [0] * q
        for a in range(q):
            y = 1
            for _ in range(p):
                y = mul[y][a]
            frob[a] = y
        self.add_t = add
        self.mul_t = mul
        self.neg_t = neg
        self.inv_t = inv
        self.frob_t = frob
        self.sub_t = [[add[a][neg[b]] for b in range(q)] for a in range(q)]
        frob_inv = [0] * q
        for a in range(q):
            frob_inv[frob[a]] = a
        self.frob_inv_t = frob_inv
        self._np = None

    @property
    def np_tables(self) -> dict:
        """The lookup tables as numpy arrays (uint8 is enough for q <= 256)."""
        if self._np is None:
            dt = np.int16 if self.q > 255 else np.uint8
            self._np = {
                "add": np.array(self.add_t, dtype=dt),
                "sub": np.array(self.sub_t, dtype=dt),
                "mul": np.array(self.mul_t, dtype=dt),
                "neg": np.array(self.neg_t, dtype=dt),
                "inv": np.array(self.inv_t, dtype=dt),
                "frob": np.array(self.frob_t, dtype=dt),
                "frob_inv": np.array(self.frob_inv_t, dtype=dt),
            }
        return self._np

    # scalar arithmetic
    def add(self, a: int, b: int) -> int:
        return self.add_t[a][b]

    def sub(self, a: int, b: int) -> int:
        return self.sub_t[a][b]

    def neg(self, a: int) -> int:
        return self.neg_t[a]

    def mul(self, a: int, b: int) -> int:
        return self.mul_t[a][b]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in a finite field")
        return self.inv_t[a]

    def pow(self, a: int, e: int) -> int:
        r = 1
        for _ in range(e):
            r = self.mul_t[r][a]
        return r

    def frobenius(self, x: int, times: int = 1) -> int:
        """x -> x^(p^times); negative ``times`` applies the inverse."""
        t = times % self.m
        for _ in range(t):
            x = self.frob_t[x]
        return x

    def from_int(self, k: int) -> int:
        return int(k) % self.p

    def elements(self) -> range:
        return range(self.q)

    def subfield_elements(self, d: int) -> list:
        """Elements of GF(p^d) inside this field (d must divide m)."""
        if self.m % d:
            raise ValueError(f"{d} does not divide {self.m}")
        return [x for x in range(self.q) if self.frobenius(x, d) == x]


def _first_irreducible(p: int, m: int) -> tuple:
    for tail in product(range(p), repeat=m):
        f = tuple(tail) + (1,)
        if f[0] != 0 and is_irreducible(f, p):
            return f
    raise ValueError("no irreducible polynomial found")


@lru_cache(maxsize=None)
def gf(p: int, m: int = 2) -> FiniteField:
    """Cached field constructor."""
    return FiniteField(p, m)


# ---------------------------------------------------------------------------
# Linear algebra over GF(q)


def rref_gf(rows: Iterable[Sequence[int]], field: FiniteField) -> tuple:
    """Reduced row echelon form over ``field``.

    Returns ``(basis, pivots)`` with ``basis`` a tuple of row tuples (zero rows
    dropped) and ``pivots`` the pivot columns.
    """
    mat = [list(r) for r in rows]
    if not mat:
        return (), ()
    ncols = len(mat[0])
    add, mul, inv, neg = field.add_t, field.mul_t, field.inv_t, field.neg_t
    pivots = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(mat)):
            if mat[i][c]:
                piv = i
                break
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        iv = inv[mat[r][c]]
        if iv != 1:
            mat[r] = [mul[iv][x] for x in mat[r]]
        prow = mat[r]
        for i in range(len(mat)):
            if i != r and mat[i][c]:
                f = neg[mat[i][c]]
                mrow = mul[f]
                mat[i] = [add[x][mrow[y]] for x, y in zip(mat[i], prow)]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return tuple(tuple(row) for row in mat[:r]), tuple(pivots)


def kernel_gf(M: Sequence[Sequence[int]], field: FiniteField, ncols: int | None = None):
    """Canonical basis of {v : M v = 0} as a ``Subspace``."""
    if ncols is None:
        ncols = len(M[0]) if M else 0
    basis, pivots = rref_gf(M, field) if M else ((), ())
    free = [c for c in range(ncols) if c not in pivots]
    vecs = []
    for f in free:
        v = [0] * ncols
        v[f] = 1
        for row, pc in zip(basis, pivots):
            v[pc] = field.neg(row[f])
        vecs.append(v)
    return Subspace(field, ncols, vecs)


class Subspace:
    """A subspace of GF(q)^n stored by its reduced row echelon basis."""

    __slots__ = ("field", "n", "basis", "pivots")

    def __init__(self, field: FiniteField, n: int, rows: Iterable[Sequence[int]] = ()):
        rows = [tuple(r) for r in rows]
        for r in rows:
            if len(r) != n:
                raise ValueError("row length does not match ambient dimension")
        self.field = field
        self.n = n
        self.basis, self.pivots = rref_gf(rows, field) if rows else ((), ())

    @classmethod
    def _raw(cls, field, n, basis, pivots):
        obj = cls.__new__(cls)
        obj.field, obj.n, obj.basis, obj.pivots = field, n, basis, pivots
        return obj

    @property
    def rank(self) -> int:
        return len(self.basis)

    def __eq__(self, other):
        return isinstance(other, Subspace) and self.n == other.n and self.basis == other.basis

    def __hash__(self):
        return hash((self.n, self.basis))

    def __repr__(self):
        return f"Subspace(n={self.n}, basis={self.basis})"

    def contains_vector(self, v: Sequence[int]) -> bool:
        F = self.field
        w = list(v)
        for row, pc in zip(self.basis, self.pivots):
            c = w[pc]
            if c:
                mrow = F.mul_t[c]
                w = [F.sub_t[x][mrow[y]] for x, y in zip(w, row)]
        return not any(w)

    def contains(self, other: "Subspace") -> bool:
        return all(self.contains_vector(v) for v in other.basis)

    def __le__(self, other):
        return other.contains(self)

    def sum(self, other: "Subspace") -> "Subspace":
        return Subspace(self.field, self.n, self.basis + other.basis)

    def orthogonal(self) -> "Subspace":
        """Annihilator under the standard bilinear pairing."""
        return kernel_gf(self.basis, self.field, self.n) if self.basis else Subspace(
            self.field, self.n, _identity(self.n)
        )

    def intersection(self, other: "Subspace") -> "Subspace":
        return self.orthogonal().sum(other.orthogonal()).orthogonal()

    def frobenius(self, times: int = 1) -> "Subspace":
        """Coordinatewise p-power Frobenius; RREF is preserved by field automorphisms."""
        F = self.field
        t = times % F.m
        basis = self.basis
        for _ in range(t):
            fr = F.frob_t
            basis = tuple(tuple(fr[x] for x in row) for row in basis)
        return Subspace._raw(F, self.n, basis, self.pivots)

    def is_rational(self, degree: int) -> bool:
        """True when the subspace is defined over GF(p^degree)."""
        return self.frobenius(degree) == self


def _identity(n):
    return [tuple(1 if i == j else 0 for j in range(n)) for i in range(n)]


def all_subspaces(field: FiniteField, n: int, k: int):
    """Yield every k-dimensional subspace of GF(q)^n in RREF (Schubert cell order)."""
    from itertools import combinations

    q = field.q
    for pivots in combinations(range(n), k):
        free = []
        for i, pc in enumerate(pivots):
            for c in range(pc + 1, n):
                if c not in pivots:
                    free.append((i, c))
        for vals in product(range(q), repeat=len(free)):
            rows = [[0] * n for _ in range(k)]
            for i, pc in enumerate(pivots):
                rows[i][pc] = 1
            for (i, c), v in zip(free, vals):
                rows[i][c] = v
            yield Subspace._raw(field, n, tuple(tuple(r) for r in rows), pivots)


def count_subspaces(q: int, n: int, k: int) -> int:
    """Gaussian binomial [n choose k]_q."""
    num = den = 1
    for j in range(k):
        num *= q ** (n - j) - 1
        den *= q ** (j + 1) - 1
    return num // den


# ---------------------------------------------------------------------------
# Linear algebra over prime fields GF(l) and over Q


def rref_mod(rows: Iterable[Sequence[int]], ell: int) -> tuple:
    """RREF over GF(ell) for prime ``ell`` with Python integers."""
    mat = [[x % ell for x in r] for r in rows]
    if not mat:
        return (), ()
    ncols = len(mat[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(mat)) if mat[i][c]), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        iv = pow(mat[r][c], -1, ell)
        mat[r] = [(x * iv) % ell for x in mat[r]]
        prow = mat[r]
        for i in range(len(mat)):
            if i != r and mat[i][c]:
                f = mat[i][c]
                mat[i] = [(x - f * y) % ell for x, y in zip(mat[i], prow)]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return tuple(tuple(row) for row in mat[:r]), tuple(pivots)


def rref_q(rows: Iterable[Sequence]) -> tuple:
    """RREF over Q with exact ``Fraction`` entries."""
    mat = [[Fraction(x) for x in r] for r in rows]
    if not mat:
        return (), ()
    ncols = len(mat[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(mat)) if mat[i][c]), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        iv = 1 / mat[r][c]
        mat[r] = [x * iv for x in mat[r]]
        prow = mat[r]
        for i in range(len(mat)):
            if i != r and mat[i][c]:
                f = mat[i][c]
                mat[i] = [x - f * y for x, y in zip(mat[i], prow)]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return tuple(tuple(row) for row in mat[:r]), tuple(pivots)


class Coeff:
    """Coefficient ring tag: ``Coeff.Q`` or ``Coeff.F(ell)``."""

    __slots__ = ("ell",)

    def __init__(self, ell: int | None = None):
        if ell is not None and not is_prime(ell):
            raise ValueError(f"coefficient characteristic {ell} is not prime")
        self.ell = ell

    @classmethod
    def parse(cls, text: str) -> "Coeff":
        """Accepts ``Q`` or ``Fl:<prime>`` (as used on the command line)."""
        t = text.strip()
        if t.upper() == "Q":
            return cls(None)
        if t.startswith("Fl:") or t.startswith("F:"):
            return cls(int(t.split(":", 1)[1]))
        raise ValueError(f"unknown coefficient ring {text!r}")

    @property
    def is_rational(self) -> bool:
        return self.ell is None

    def __eq__(self, other):
        return isinstance(other, Coeff) and self.ell == other.ell

    def __hash__(self):
        return hash(("coeff", self.ell))

    def __str__(self):
        return "Q" if self.ell is None else f"Fl:{self.ell}"

    __repr__ = __str__

    def convert(self, x):
        """Map an integer or rational into the ring."""
        if self.ell is None:
            return Fraction(x)
        x = Fraction(x)
        return (x.numerator * pow(x.denominator, -1, self.ell)) % self.ell

    def rref(self, rows):
        return rref_q(rows) if self.ell is None else rref_mod(rows, self.ell)

    def zero(self):
        return Fraction(0) if self.ell is None else 0


def kernel(M: Sequence[Sequence], coeff: "Coeff | FiniteField", ncols: int | None = None):
    """Canonical kernel basis of M over Q, GF(l) or a ``FiniteField``.

    For a ``FiniteField`` a ``Subspace`` is returned; otherwise a tuple of
    vectors in the canonical form (free-variable basis of the RREF).
    """
    if isinstance(coeff, FiniteField):
        return kernel_gf(M, coeff, ncols)
    if ncols is None:
        ncols = len(M[0]) if M else 0
    basis, pivots = coeff.rref(M) if M else ((), ())
    pset = set(pivots)
    one, zero = coeff.convert(1), coeff.zero()
    out = []
    for f in range(ncols):
        if f in pset:
            continue
        v = [zero] * ncols
        v[f] = one
        for row, pc in zip(basis, pivots):
            v[pc] = coeff.convert(-row[f]) if coeff.ell is None else (-row[f]) % coeff.ell
        out.append(tuple(v))
    return tuple(out)


def rank(M: Sequence[Sequence], coeff: "Coeff | FiniteField") -> int:
    if not M:
        return 0
    if isinstance(coeff, FiniteField):
        return len(rref_gf(M, coeff)[0])
    return len(coeff.rref(M)[0])


# ---------------------------------------------------------------------------
# Truncated Witt vectors of GF(p^2)


class TruncatedWittRing:
    """W(GF(p^2)) / p^s as (Z/p^s)[x]/(x^2 - c1 x + c0).

    The quadratic is the integer lift of the Conway modulus of GF(p^2), so
    reduction mod p lands in ``gf(p, 2)`` with x -> t.  Elements are pairs
    ``(u, v)`` meaning u + v x with 0 <= u, v < p^s.  ``sigma`` swaps the two
    roots of the quadratic: it is the unique lift of the p-power Frobenius and
    satisfies sigma^2 = id exactly.
    """

    def __init__(self, p: int, s: int | None = None):
        if s is None:
            s = default_precision()
        if s < 1:
            raise ValueError("precision must be positive")
        self.p = p
        self.s = s
        self.mod = p**s
        self.field = gf(p, 2)
        m0, m1, _ = self.field.modulus  # t^2 + m1 t + m0
        self.c1 = (-m1) % self.mod
        self.c0 = m0 % self.mod

    def __repr__(self):
        return f"TruncatedWittRing(p={self.p}, s={self.s})"

    def __eq__(self, other):
        return isinstance(other, TruncatedWittRing) and (self.p, self.s) == (other.p, other.s)

    def __hash__(self):
        return hash(("W", self.p, self.s))

    zero = (0, 0)
    one = (1, 0)

    @property
    def x(self):
        return (0, 1)

    def elt(self, u: int, v: int = 0) -> tuple:
        return (u % self.mod, v % self.mod)

    def add(self, a, b):
        M = self.mod
        return ((a[0] + b[0]) % M, (a[1] + b[1]) % M)

    def sub(self, a, b):
        M = self.mod
        return ((a[0] - b[0]) % M, (a[1] - b[1]) % M)

    def neg(self, a):
        M = self.mod
        return ((-a[0]) % M, (-a[1]) % M)

    def mul(self, a, b):
        M = self.mod
        u1, v1 = a
        u2, v2 = b
        vv = v1 * v2
        return ((u1 * u2 - vv * self.c0) % M, (u1 * v2 + v1 * u2 + vv * self.c1) % M)

    def scale(self, a, k: int):
        """Multiply by the integer k."""
        M = self.mod
        return ((a[0] * k) % M, (a[1] * k) % M)

    def sigma(self, a):
        """Frobenius lift: x -> c1 - x."""
        M = self.mod
        u, v = a
        return ((u + v * self.c1) % M, (-v) % M)

    def sigma_inv(self, a):
        return self.sigma(a)

    def valuation(self, a) -> int:
        """p-adic valuation, ``s`` for zero."""
        if a == (0, 0):
            return self.s
        p = self.p
        k = 0
        u, v = a
        while u % p == 0 and v % p == 0:
            u //= p
            v //= p
            k += 1
        return k

    def is_unit(self, a) -> bool:
        return a[0] % self.p != 0 or a[1] % self.p != 0

    def norm(self, a) -> int:
        """a * sigma(a) as an integer mod p^s."""
        prod_ = self.mul(a, self.sigma(a))
        assert prod_[1] == 0
        return prod_[0]

    def inv(self, a):
        """Inverse of a unit: sigma(a) / N(a)."""
        if not self.is_unit(a):
            raise ZeroDivisionError(f"{a} is not a unit in {self}")
        nrm = self.norm(a)
        return self.scale(self.sigma(a), pow(nrm, -1, self.mod))

    def divide_by_p_power(self, a, k: int):
        """Exact division by p^k; the result is defined modulo p^(s-k)."""
        p_k = self.p**k
        if a[0] % p_k or a[1] % p_k:
            raise ArithmeticError(f"{a} is not divisible by p^{k}")
        return (a[0] // p_k, a[1] // p_k)

    def residue(self, a, k: int):
        """Canonical residue of a modulo p^k."""
        p_k = self.p**k
        return (a[0] % p_k, a[1] % p_k)

    def reduce(self, a) -> int:
        """Image in GF(p^2)."""
        return self.field.from_coeffs([a[0] % self.p, a[1] % self.p])

    def lift(self, y: int):
        """Digit lift of a GF(p^2) element (not multiplicative)."""
        c = self.field.to_coeffs(y)
        return (c[0], c[1])

    def p_power(self, k: int):
        return (self.p**k % self.mod, 0)


def howell_form(rows: Iterable[Sequence[tuple]], ring: TruncatedWittRing, ncols: int) -> tuple:
    """Howell normal form of the row span over ``ring``.

    Returns a tuple of rows; each row has a leading entry p^k (k < s), entries
    above each leading entry are canonical residues modulo that p-power, and
    the span of the rows with a given number of leading zero columns is the
    full submodule of vectors with that many leading zeros.
    """
    R = ring
    s = R.s
    pending = [list(r) for r in rows if any(x != (0, 0) for x in r)]
    done: list = []
    lead: list = []
    for c in range(ncols):
        cand = [i for i, r in enumerate(pending) if r[c] != (0, 0)]
        if not cand:
            continue
        best = min(cand, key=lambda i: R.valuation(pending[i][c]))
        prow = pending.pop(best)
        k = R.valuation(prow[c])
        unit = R.divide_by_p_power(prow[c], k)
        uinv = R.inv(unit)
        prow = [R.mul(uinv, x) for x in prow]
        prow[c] = R.p_power(k)
        nxt = []
        for r in pending:
            e = r[c]
            if e != (0, 0):
                f = R.divide_by_p_power(e, k)
                r = [R.sub(x, R.mul(f, y)) for x, y in zip(r, prow)]
                r[c] = (0, 0)
            if any(x != (0, 0) for x in r):
                nxt.append(r)
        if k > 0:
            extra = [R.scale(x, R.p ** (s - k)) for x in prow]
            if any(x != (0, 0) for x in extra):
                nxt.append(extra)
        pending = nxt
        done.append(prow)
        lead.append((c, k))
    # reduce entries above each leading entry, left to right so that later
    # reductions never disturb columns already reduced
    for i in range(len(done)):
        c, k = lead[i]
        pk = R.p**k
        for j in range(i):
            e = done[j][c]
            if e == (0, 0):
                continue
            res = R.residue(e, k)
            if res == e:
                continue
            f = ((e[0] - res[0]) // pk, (e[1] - res[1]) // pk)
            done[j] = [R.sub(x, R.mul(f, y)) for x, y in zip(done[j], done[i])]
            done[j][c] = res
    return tuple(tuple(r) for r in done)


class WittLattice:
    """A lattice L with p^r L0 <= L <= p^-r L0 (L0 the standard lattice).

    Stored through N = p^r L, a submodule of R^n containing p^(2r) R^n, kept in
    Howell form modulo p^s.  Requires 2r < s.
    """

    __slots__ = ("ring", "n", "r", "rows", "_key")

    def __init__(self, ring: TruncatedWittRing, n: int, r: int, rows, *, _canonical=False):
        if 2 * r >= ring.s:
            raise PrecisionError(f"window radius {r} needs precision above {2 * r}, have {ring.s}")
        self.ring = ring
        self.n = n
        self.r = r
        self.rows = tuple(rows) if _canonical else howell_form(rows, ring, n)
        self._key = None
        if not _canonical:
            self._check_window()

    def _check_window(self):
        if len(self.rows) != self.n or any(
            row[i] == (0, 0) for i, row in enumerate(self.rows)
        ):
            raise PrecisionError("lattice is not of full rank inside the window")
        floor = self.ring.p_power(2 * self.r)
        for i in range(self.n):
            e = [(0, 0)] * self.n
            e[i] = floor
            if not self._contains_n(e):
                raise PrecisionError("lattice leaves the window p^r L0 <= L <= p^-r L0")

    @classmethod
    def standard(cls, ring, n, r, k: int = 0):
        """p^k L0; the unscaled standard lattice is k = 0."""
        if abs(k) > r:
            raise PrecisionError(f"p^{k} L0 is outside the radius-{r} window")
        rows = [[(0, 0)] * n for _ in range(n)]
        for i in range(n):
            rows[i][i] = ring.p_power(r + k)
        return cls(ring, n, r, rows)

    @classmethod
    def from_basis(cls, ring, n, r, basis, shift: int = 0):
        """Lattice spanned by p^shift * (rows of basis), basis given unscaled.

        Entries are ring elements; the internal scaling by p^r is applied here.
        """
        pr = ring.p_power(r + shift) if r + shift >= 0 else None
        if pr is None:
            raise PrecisionError("negative total scaling is not representable")
        rows = [[ring.mul(pr, x) for x in row] for row in basis]
        return cls(ring, n, r, rows)

    @property
    def key(self):
        if self._key is None:
            self._key = self.rows
        return self._key

    def __eq__(self, other):
        return isinstance(other, WittLattice) and self.n == other.n and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        return f"WittLattice(n={self.n}, r={self.r}, levels={self.diagonal_exponents()})"

    def diagonal_exponents(self) -> tuple:
        return tuple(self.ring.valuation(row[i]) for i, row in enumerate(self.rows))

    def _contains_n(self, v) -> bool:
        R = self.ring
        w = list(v)
        for i, row in enumerate(self.rows):
            e = w[i]
            if e == (0, 0):
                continue
            k = R.valuation(row[i])
            if R.valuation(e) < k:
                return False
            f = R.divide_by_p_power(e, k)
            w = [R.sub(x, R.mul(f, y)) for x, y in zip(w, row)]
        return all(x == (0, 0) for x in w)

    def _same_window(self, other):
        if self.ring != other.ring or self.n != other.n or self.r != other.r:
            raise ValueError("lattices live in different ambient windows")

    def contains(self, other: "WittLattice") -> bool:
        """other <= self."""
        self._same_window(other)
        return all(self._contains_n(v) for v in other.rows)

    def __le__(self, other):
        return other.contains(self)

    def sum(self, other: "WittLattice") -> "WittLattice":
        self._same_window(other)
        return WittLattice(self.ring, self.n, self.r, self.rows + other.rows)

    def intersection(self, other: "WittLattice") -> "WittLattice":
        self._same_window(other)
        n = self.n
        z = [(0, 0)] * n
        gens = [list(row) + list(row) for row in self.rows]
        gens += [list(row) + z for row in other.rows]
        h = howell_form(gens, self.ring, 2 * n)
        rows = [row[n:] for row in h if all(x == (0, 0) for x in row[:n])]
        return WittLattice(self.ring, n, self.r, rows)

    def length(self) -> int:
        """Length of L0' / N where L0' = R^n, i.e. colength of p^r L in L0."""
        return sum(self.diagonal_exponents())

    def colength_in(self, other: "WittLattice") -> int:
        """Length of other / self; requires self <= other."""
        self._same_window(other)
        if not other.contains(self):
            raise ValueError("colength needs an inclusion L <= M")
        return self.length() - other.length()

    def scale(self, k: int) -> "WittLattice":
        """p^k L, with an explicit error if it leaves the window."""
        R = self.ring
        if k >= 0:
            pk = R.p_power(k)
            rows = [[R.mul(pk, x) for x in row] for row in self.rows]
            floor = R.p_power(2 * self.r)
            rows += [[floor if j == i else (0, 0) for j in range(self.n)] for i in range(self.n)]
            out = WittLattice(R, self.n, self.r, rows)
            # p^k L contains the floor only if the added generators were redundant
            if out.length() != self.length() + k * self.n:
                raise PrecisionError(f"p^{k} L leaves the window")
            return out
        k = -k
        pk = R.p**k
        for row in self.rows:
            for x in row:
                if x[0] % pk or x[1] % pk:
                    raise PrecisionError(f"p^-{k} L leaves the window")
        rows = [[R.divide_by_p_power(x, k) for x in row] for row in self.rows]
        floor = R.p_power(2 * self.r)
        rows += [[floor if j == i else (0, 0) for j in range(self.n)] for i in range(self.n)]
        return WittLattice(R, self.n, self.r, rows)

    def _raw_plus_scaled(self, other: "WittLattice", j: int) -> "WittLattice":
        """self + p^j other without a window check on p^j other."""
        R = self.ring
        pj = R.p_power(j)
        rows = list(self.rows) + [[R.mul(pj, x) for x in row] for row in other.rows]
        return WittLattice(R, self.n, self.r, rows)

    def elementary_divisors(self, other: "WittLattice") -> tuple:
        """Exponents (e_1 >= ... >= e_n) with other/self = sum R/p^(e_i).

        Uses length(M / (L + p^j M)) = sum_i min(e_i, j).
        """
        if not other.contains(self):
            raise ValueError("elementary divisors need an inclusion L <= M")
        total = self.colength_in(other)
        lengths = [0]
        j = 0
        while lengths[-1] < total:
            j += 1
            lengths.append(self._raw_plus_scaled(other, j).colength_in(other))
        at_least = [lengths[t] - lengths[t - 1] for t in range(1, len(lengths))]
        ex = []
        for t in range(len(at_least)):
            nxt = at_least[t + 1] if t + 1 < len(at_least) else 0
            ex += [t + 1] * (at_least[t] - nxt)
        ex += [0] * (self.n - len(ex))
        return tuple(sorted(ex, reverse=True))

    def elementary_divisor_powers(self, other: "WittLattice") -> tuple:
        """Elementary divisors as p-powers, e.g. (p, 1, 1)."""
        return tuple(self.ring.p**e for e in self.elementary_divisors(other))

    def reduction_basis(self) -> list:
        """Rows of the internal Howell form (ring elements, scaled by p^r)."""
        return [list(r) for r in self.rows]


def lattice_ops(L: WittLattice, M: WittLattice) -> dict:
    """The bundle of binary lattice operations on a pair.

    ``colength`` and ``elementary_divisors`` refer to the inclusion L <= M and
    are None when L is not contained in M.
    """
    inc = M.contains(L)
    return {
        "sum": L.sum(M),
        "intersection": L.intersection(M),
        "contains": inc,
        "colength": L.colength_in(M) if inc else None,
        "elementary_divisors": L.elementary_divisor_powers(M) if inc else None,
    }


def frobenius(x, ring: "FiniteField | TruncatedWittRing"):
    """Frobenius on a field element (x -> x^p) or its Witt-ring lift."""
    if isinstance(ring, FiniteField):
        return ring.frobenius(x)
    return ring.sigma(x)
