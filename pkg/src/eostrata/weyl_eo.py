"""Ekedahl-Oort labels as minimal coset representatives in S_n x S_n.

A label (a, b) stands for the pair (w1, w2) in the coset set ^J W with
w1^-1(1) = a and w2^-1(n) = b, where J is generated by s_2..s_{n-1} in the
first factor and s_1..s_{n-2} in the second.  Permutations are tuples in
one-line notation with values 1..n.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import permutations
from typing import Iterable

Perm = tuple


def compose(u: Perm, v: Perm) -> Perm:
    """(u v)(i) = u(v(i))."""
    return tuple(u[v[i] - 1] for i in range(len(v)))


def inverse(w: Perm) -> Perm:
    out = [0] * len(w)
    for i, wi in enumerate(w, start=1):
        out[wi - 1] = i
    return tuple(out)


def identity(n: int) -> Perm:
    return tuple(range(1, n + 1))


def simple_reflection(n: int, i: int) -> Perm:
    """s_i swaps i and i+1."""
    w = list(range(1, n + 1))
    w[i - 1], w[i] = w[i], w[i - 1]
    return tuple(w)


def longest(n: int) -> Perm:
    return tuple(range(n, 0, -1))


def length(w: Perm) -> int:
    """Number of inversions."""
    n = len(w)
    return sum(1 for i in range(n) for j in range(i + 1, n) if w[i] > w[j])


def _rank_matrix(w: Perm) -> list:
    n = len(w)
    # r[i][j] = #{a <= i : w(a) >= j}, i, j in 1..n
    r = [[0] * (n + 2) for _ in range(n + 1)]
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            r[i][j] = r[i - 1][j] + (1 if w[i - 1] >= j else 0)
    return r


def bruhat_leq_single(u: Perm, v: Perm) -> bool:
    """Tableau (rank matrix) criterion for the Bruhat order on S_n."""
    if len(u) != len(v):
        raise ValueError("permutations of different sizes")
    ru, rv = _rank_matrix(u), _rank_matrix(v)
    n = len(u)
    return all(ru[i][j] <= rv[i][j] for i in range(1, n + 1) for j in range(1, n + 1))


@dataclass(frozen=True)
class PermPair:
    w1: Perm
    w2: Perm

    def __post_init__(self):
        n = len(self.w1)
        if len(self.w2) != n:
            raise ValueError("components must have the same size")
        for w in (self.w1, self.w2):
            if sorted(w) != list(range(1, n + 1)):
                raise ValueError(f"{w} is not a permutation of 1..{n}")

    @property
    def n(self) -> int:
        return len(self.w1)

    def __mul__(self, other: "PermPair") -> "PermPair":
        return PermPair(compose(self.w1, other.w1), compose(self.w2, other.w2))

    def inverse(self) -> "PermPair":
        return PermPair(inverse(self.w1), inverse(self.w2))

    def swap(self) -> "PermPair":
        """The component switch Psi."""
        return PermPair(self.w2, self.w1)

    def length(self) -> int:
        return length(self.w1) + length(self.w2)


def bruhat_leq(u: PermPair, v: PermPair) -> bool:
    """Product Bruhat order on S_n x S_n."""
    if u.n != v.n:
        raise ValueError("pairs of different rank")
    return bruhat_leq_single(u.w1, v.w1) and bruhat_leq_single(u.w2, v.w2)


def _label_pair(n: int, a: int, b: int) -> PermPair:
    rest1 = [i for i in range(1, n + 1) if i != a]
    w1_inv = (a, *rest1)
    rest2 = [i for i in range(1, n + 1) if i != b]
    w2_inv = (*rest2, b)
    return PermPair(inverse(w1_inv), inverse(w2_inv))


@dataclass(frozen=True)
class EOLabel:
    n: int
    a: int
    b: int
    w: PermPair = field(compare=False, repr=False, default=None)

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("rank n must be at least 2")
        if not (1 <= self.a <= self.n and 1 <= self.b <= self.n):
            raise ValueError(f"label ({self.a},{self.b}) out of range for n={self.n}")
        if self.w is None:
            object.__setattr__(self, "w", _label_pair(self.n, self.a, self.b))

    @property
    def dimension(self) -> int:
        return self.a - self.b + self.n - 1

    @property
    def length(self) -> int:
        return self.w.length()

    @property
    def is_core(self) -> bool:
        return (self.a, self.b) == (1, self.n)

    @property
    def is_mu_ordinary(self) -> bool:
        return (self.a, self.b) == (self.n, 1)

    def __str__(self):
        return f"({self.a},{self.b})"


def in_jw(w: PermPair) -> bool:
    """Minimal-length representative test for W_J \\ W."""
    i1, i2 = inverse(w.w1), inverse(w.w2)
    n = w.n
    return all(i1[k] < i1[k + 1] for k in range(1, n - 1)) and all(
        i2[k] < i2[k + 1] for k in range(0, n - 2)
    )


def label_of(w: PermPair) -> EOLabel:
    if not in_jw(w):
        raise ValueError("pair is not a minimal coset representative")
    return EOLabel(w.n, inverse(w.w1)[0], inverse(w.w2)[-1])


def enumerate_jw(n: int) -> list:
    """All n^2 labels, ordered by (a, b)."""
    if n < 2:
        raise ValueError("n must be at least 2")
    return [EOLabel(n, a, b) for a in range(1, n + 1) for b in range(1, n + 1)]


def is_supersingular(u: EOLabel) -> bool:
    return u.a <= u.b


def _subgroup(n: int, gens: Iterable[int]) -> list:
    """Elements of the parabolic subgroup generated by the listed s_i."""
    gens = list(gens)
    seen = {identity(n)}
    frontier = [identity(n)]
    refl = [simple_reflection(n, i) for i in gens]
    while frontier:
        nxt = []
        for w in frontier:
            for s in refl:
                ws = compose(w, s)
                if ws not in seen:
                    seen.add(ws)
                    nxt.append(ws)
        frontier = nxt
    return sorted(seen)


@lru_cache(maxsize=None)
def parabolic_data(n: int) -> tuple:
    """(W_J as a list of pairs, x = w0 * w0_{Psi(J)})."""
    j1 = range(2, n)  # s_2..s_{n-1}
    j2 = range(1, n - 1)  # s_1..s_{n-2}
    g1, g2 = _subgroup(n, j1), _subgroup(n, j2)
    wj = [PermPair(u, v) for u in g1 for v in g2]
    # Psi(J) swaps the factors, so its longest element is (w0 of <J2>, w0 of <J1>)
    w0_j1 = max(g1, key=length)
    w0_j2 = max(g2, key=length)
    w0 = PermPair(longest(n), longest(n))
    x = w0 * PermPair(w0_j2, w0_j1)
    return wj, x


def psi_conjugate(y: PermPair, u: PermPair, x: PermPair) -> PermPair:
    """y u x Psi(y^-1) x^-1."""
    return y * u * x * y.inverse().swap() * x.inverse()


def psi_order_leq(u: EOLabel, v: EOLabel) -> bool:
    """u <=_Psi v by exhaustive search over W_J."""
    if u.n != v.n:
        raise ValueError("labels of different rank")
    wj, x = parabolic_data(u.n)
    return any(bruhat_leq(psi_conjugate(y, u.w, x), v.w) for y in wj)


@lru_cache(maxsize=None)
def psi_order_table(n: int) -> dict:
    """{(u_ab, v_ab): bool} for all pairs of labels."""
    labels = enumerate_jw(n)
    wj, x = parabolic_data(n)
    table = {}
    for u in labels:
        conj = [psi_conjugate(y, u.w, x) for y in wj]
        for v in labels:
            table[((u.a, u.b), (v.a, v.b))] = any(bruhat_leq(c, v.w) for c in conj)
    return table


def closure(u: EOLabel) -> list:
    """Labels u' with u' <=_Psi u, ordered by (a, b)."""
    table = psi_order_table(u.n)
    return [v for v in enumerate_jw(u.n) if table[((v.a, v.b), (u.a, u.b))]]


def order_is_partial(n: int) -> bool:
    """Reflexive, antisymmetric and transitive on the n^2 labels."""
    t = psi_order_table(n)
    keys = [(lab.a, lab.b) for lab in enumerate_jw(n)]
    if not all(t[(k, k)] for k in keys):
        return False
    for a in keys:
        for b in keys:
            if a != b and t[(a, b)] and t[(b, a)]:
                return False
    for a in keys:
        for b in keys:
            if not t[(a, b)]:
                continue
            for c in keys:
                if t[(b, c)] and not t[(a, c)]:
                    return False
    return True


def extremes(n: int) -> tuple:
    """(maximal labels, minimal labels) for <=_Psi."""
    t = psi_order_table(n)
    keys = [(lab.a, lab.b) for lab in enumerate_jw(n)]
    tops = [k for k in keys if all(t[(j, k)] for j in keys)]
    bottoms = [k for k in keys if all(t[(k, j)] for j in keys)]
    return tops, bottoms


def strata_rows(n: int) -> list:
    """Rows (a, b, dimension, supersingular, closure) for reporting."""
    rows = []
    for lab in enumerate_jw(n):
        rows.append(
            {
                "a": lab.a,
                "b": lab.b,
                "dimension": lab.dimension,
                "length": lab.length,
                "supersingular": is_supersingular(lab),
                "closure": [[c.a, c.b] for c in closure(lab)],
            }
        )
    return rows


def all_pairs(n: int):
    """Every element of S_n x S_n (used by brute-force checks)."""
    perms = list(permutations(range(1, n + 1)))
    for u in perms:
        for v in perms:
            yield PermPair(u, v)
