"""Newton polygons of the standard modules and related lattice calculus.

Basis labels of D = D1 + D2 are indexed 0..2n-1: e_{1,i} -> i - 1 and
e_{2,i} -> n + i - 1.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .dieudonne import WittDieudonne, _wapply, _wmat_mul, _wmat_sigma
from .exact_core import PrecisionError, TruncatedWittRing, WittLattice


def _e1(n, i):
    return i - 1


def _e2(n, i):
    return n + i - 1


@dataclass(frozen=True)
class MonomialIsocrystal:
    """F(e_j) = p^vals[j] e_perm[j], sigma-semilinear."""

    n: int
    perm: tuple
    vals: tuple

    def __post_init__(self):
        size = len(self.perm)
        if sorted(self.perm) != list(range(size)) or len(self.vals) != size:
            raise ValueError("perm must be a permutation of the basis labels")

    @property
    def size(self) -> int:
        return len(self.perm)

    def cycles(self) -> list:
        seen, out = set(), []
        for j in range(self.size):
            if j in seen:
                continue
            cyc = []
            k = j
            while k not in seen:
                seen.add(k)
                cyc.append(k)
                k = self.perm[k]
            out.append(tuple(cyc))
        return out

    def v_vals(self) -> tuple:
        """vals of V = p F^-1: V(e_perm[j]) = p^(1 - vals[j]) e_j."""
        out = [0] * self.size
        for j in range(self.size):
            out[self.perm[j]] = 1 - self.vals[j]
        return tuple(out)

    def matrix(self, ring: TruncatedWittRing) -> list:
        """Matrix of F (columns are images of basis vectors)."""
        m = [[(0, 0)] * self.size for _ in range(self.size)]
        for j in range(self.size):
            if self.vals[j] < 0:
                raise PrecisionError("negative valuations need a rational ambient")
            m[self.perm[j]][j] = ring.p_power(self.vals[j])
        return m

    def to_witt(self, ring: TruncatedWittRing) -> WittDieudonne:
        """Split into D1/D2 blocks; requires F to swap the two summands."""
        n = self.n
        if any((j < n) == (self.perm[j] < n) for j in range(self.size)):
            raise ValueError("F does not exchange the summands")
        if any(v not in (0, 1) for v in self.vals):
            raise ValueError("V = p F^-1 is integral only for valuations in {0, 1}")
        blocks = {k: [[(0, 0)] * n for _ in range(n)] for k in ("F1", "F2", "V1", "V2")}
        vv = self.v_vals()
        inv = [0] * self.size
        for j in range(self.size):
            inv[self.perm[j]] = j
        for j in range(self.size):
            t = self.perm[j]
            key = "F1" if j < n else "F2"
            blocks[key][t % n][j % n] = ring.p_power(self.vals[j])
            # V(e_j) = p^(1 - vals[inv j]) e_{inv j}
            src = inv[j]
            keyv = "V1" if j < n else "V2"
            blocks[keyv][src % n][j % n] = ring.p_power(vv[j])
        return WittDieudonne(ring, n, blocks["F1"], blocks["F2"], blocks["V1"], blocks["V2"])


def canonical_lift(n: int, a: int, b: int) -> MonomialIsocrystal:
    """Monomial lift of the standard module with entries 1 or p."""
    if not (1 <= a <= n and 1 <= b <= n):
        raise ValueError(f"label ({a},{b}) out of range for n={n}")
    perm = [0] * (2 * n)
    vals = [0] * (2 * n)
    for i in range(1, n + 1):
        j = _e1(n, i)
        if i < a:
            perm[j], vals[j] = _e2(n, i), 0
        elif i == a:
            perm[j], vals[j] = _e2(n, n), 1
        else:
            perm[j], vals[j] = _e2(n, i - 1), 0
        j = _e2(n, i)
        if i == b:
            perm[j], vals[j] = _e1(n, 1), 0
        elif i < b:
            perm[j], vals[j] = _e1(n, i + 1), 1
        else:
            perm[j], vals[j] = _e1(n, i), 1
    return MonomialIsocrystal(n, tuple(perm), tuple(vals))


@dataclass(frozen=True)
class NewtonPolygon:
    """Slopes as a sorted tuple of (slope, multiplicity)."""

    slopes: tuple

    @classmethod
    def from_multiset(cls, pairs) -> "NewtonPolygon":
        acc: dict = {}
        for s, m in pairs:
            if m > 0:
                acc[Fraction(s)] = acc.get(Fraction(s), 0) + m
        return cls(tuple(sorted(acc.items())))

    @property
    def width(self) -> int:
        return sum(m for _, m in self.slopes)

    @property
    def rise(self) -> Fraction:
        return sum((s * m for s, m in self.slopes), Fraction(0))

    def value_at(self, x: int) -> Fraction:
        """Height of the polygon at abscissa x."""
        y = Fraction(0)
        left = x
        for s, m in self.slopes:
            take = min(m, left)
            y += s * take
            left -= take
            if left == 0:
                break
        return y

    def has_even_multiplicities(self) -> bool:
        return all(m % 2 == 0 for _, m in self.slopes)

    def __str__(self):
        return " ".join(f"{s}^{m}" for s, m in self.slopes)

    def as_json(self) -> list:
        return [[str(s), m] for s, m in self.slopes]


def exact_slopes(F: MonomialIsocrystal) -> NewtonPolygon:
    """Each cycle of the permutation contributes sum(vals)/len with multiplicity len."""
    pairs = []
    for cyc in F.cycles():
        pairs.append((Fraction(sum(F.vals[j] for j in cyc), len(cyc)), len(cyc)))
    return NewtonPolygon.from_multiset(pairs)


# ---------------------------------------------------------------------------
# truncated estimators on general Witt data


def _full_matrices(M: WittDieudonne):
    """F and V on D = D1 + D2 as 2n x 2n matrices (F twist +1, V twist -1)."""
    n = M.n
    z = (0, 0)
    F = [[z] * (2 * n) for _ in range(2 * n)]
    V = [[z] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        for j in range(n):
            F[n + i][j] = M.F1[i][j]
            F[i][n + j] = M.F2[i][j]
            V[n + i][j] = M.V1[i][j]
            V[i][n + j] = M.V2[i][j]
    return F, V


def _power_valuation(R: TruncatedWittRing, A, twist: int, m: int) -> int:
    """min valuation of the matrix of (A phi^twist)^m."""
    P = A
    for k in range(1, m):
        # (A phi)^(k+1) = A phi(P) where P is the matrix of the k-th power
        P = _wmat_mul(R, A, _wmat_sigma(R, P, twist))
    v = min(R.valuation(x) for row in P for x in row)
    if v >= R.s:
        raise PrecisionError(f"F^{m} vanishes at precision {R.s}; raise the precision")
    return v


def _as_witt(data, ring):
    if isinstance(data, MonomialIsocrystal):
        return data.to_witt(ring or TruncatedWittRing(2))
    return data


@dataclass(frozen=True)
class SlopeEstimate:
    value: Fraction
    depth: int
    error_bound: Fraction  # |value - exact| <= error_bound


def truncated_lambda_min(data, m: int, ring: TruncatedWittRing | None = None) -> SlopeEstimate:
    """(1/m) max{k : F^m D <= p^k D}, with error bound rank/m."""
    M = _as_witt(data, ring)
    if m < 1:
        raise ValueError("depth must be positive")
    F, _ = _full_matrices(M)
    k = _power_valuation(M.ring, F, 1, m)
    return SlopeEstimate(Fraction(k, m), m, Fraction(2 * M.n, m))


def lambda_max(data, m: int, ring: TruncatedWittRing | None = None) -> SlopeEstimate:
    """1 - (1/m) max{k : V^m D <= p^k D}."""
    M = _as_witt(data, ring)
    if m < 1:
        raise ValueError("depth must be positive")
    _, V = _full_matrices(M)
    k = _power_valuation(M.ring, V, -1, m)
    return SlopeEstimate(1 - Fraction(k, m), m, Fraction(2 * M.n, m))


def monomial_lambda_min(F: MonomialIsocrystal, m: int) -> Fraction:
    """Same estimator computed on paths of the permutation (no ring arithmetic)."""
    best = None
    for j in range(F.size):
        k, tot = j, 0
        for _ in range(m):
            tot += F.vals[k]
            k = F.perm[k]
        best = tot if best is None else min(best, tot)
    return Fraction(best, m)


# ---------------------------------------------------------------------------
# strata


def stratum_polygon(n: int, a: int, b: int) -> NewtonPolygon:
    """((a-1)/(2a))^(2a), (1/2)^(2b-2a), ((n-b+1)/(2n-2b))^(2n-2b)."""
    pairs = [(Fraction(a - 1, 2 * a), 2 * a), (Fraction(1, 2), 2 * b - 2 * a)]
    if b < n:
        pairs.append((Fraction(n - b + 1, 2 * n - 2 * b), 2 * n - 2 * b))
    return NewtonPolygon.from_multiset(pairs)


def supersingular_polygon(n: int) -> NewtonPolygon:
    return NewtonPolygon.from_multiset([(Fraction(1, 2), 2 * n)])


def mu_ordinary_polygon(n: int) -> NewtonPolygon:
    return NewtonPolygon.from_multiset([(0, 2), (Fraction(1, 2), 2 * n - 4), (1, 2)])


@dataclass(frozen=True)
class NewtonStratum:
    label: str
    polygon: NewtonPolygon
    dimension: int


def newton_strata(n: int) -> list:
    """Supersingular stratum plus N^{a,b} for 1 <= a <= b <= n-1."""
    if n < 2:
        raise ValueError("n must be at least 2")
    out = [NewtonStratum("ss", supersingular_polygon(n), n - 1)]
    for a in range(1, n):
        for b in range(a, n):
            out.append(NewtonStratum(f"N{a},{b}", stratum_polygon(n, a, b), b - a + n))
    return out


def polygon_dominance(P: NewtonPolygon, Q: NewtonPolygon) -> str:
    """'below' when P lies on or under Q everywhere, etc."""
    if P.width != Q.width or P.rise != Q.rise:
        raise ValueError("polygons have different endpoints")
    le = ge = True
    for x in range(P.width + 1):
        p, q = P.value_at(x), Q.value_at(x)
        le &= p <= q
        ge &= p >= q
    if le and ge:
        return "equal"
    if le:
        return "below"
    if ge:
        return "above"
    return "incomparable"


def dominance_edges(n: int) -> list:
    """(lower, upper) label pairs with lower strictly below upper."""
    strata = newton_strata(n)
    return [
        (s.label, t.label)
        for s in strata
        for t in strata
        if s is not t and polygon_dominance(s.polygon, t.polygon) == "below"
    ]


# ---------------------------------------------------------------------------
# Hasse criteria


def hasse_criteria(M: WittDieudonne) -> tuple:
    """(F^2 D2 <= V D1, V^2 D2 <= F D1) as lattice inclusions inside D2.

    The first holds iff the minimal slope is at least 1/4, the second iff the
    maximal slope is at most 3/4.  Both fail on the mu-ordinary locus, where
    the two Hasse invariants are nonzero.
    """
    if isinstance(M, MonomialIsocrystal):
        M = M.to_witt(TruncatedWittRing(2))
    r = 2
    if M.ring.s <= 2 * r:
        raise PrecisionError("Hasse criteria need precision at least 5")
    D = M.standard_lattice(r)
    F2D2 = M.image_F(1, M.image_F(2, D))
    V2D2 = M.image_V(1, M.image_V(2, D))
    VD1 = M.image_V(1, D)
    FD1 = M.image_F(1, D)
    return (VD1.contains(F2D2), FD1.contains(V2D2))


# ---------------------------------------------------------------------------
# slope-zero lattice calculus


class LinearFrobenius:
    """F(x) = A sigma(x) on W^r with A invertible over W (pure of slope 0)."""

    def __init__(self, ring: TruncatedWittRing, A: Sequence):
        self.ring = ring
        self.A = [list(r) for r in A]
        self.rank = len(self.A)

    @classmethod
    def random_unit(cls, ring: TruncatedWittRing, r: int, rng: random.Random):
        from .dieudonne import mat_rank

        while True:
            A = [[(rng.randrange(ring.mod), rng.randrange(ring.mod)) for _ in range(r)] for _ in range(r)]
            red = [[ring.reduce(x) for x in row] for row in A]
            if mat_rank(ring.field, red) == r:
                return cls(ring, A)

    @classmethod
    def from_monomial(cls, ring, F: MonomialIsocrystal):
        return cls(ring, F.matrix(ring))

    def apply_lattice(self, H: WittLattice) -> WittLattice:
        R = self.ring
        rows = [_wapply(R, self.A, 1, row) for row in H.rows]
        return WittLattice(R, H.n, H.r, rows)


class NonStabilizingError(RuntimeError):
    """S_i or T_i did not stabilise inside the window (ambient not pure of slope 0)."""


def _sum_all(ls):
    out = ls[0]
    for x in ls[1:]:
        out = out.sum(x)
    return out


def _meet_all(ls):
    out = ls[0]
    for x in ls[1:]:
        out = out.intersection(x)
    return out


def f_power(F: LinearFrobenius, H: WittLattice, j: int) -> WittLattice:
    for _ in range(j):
        H = F.apply_lattice(H)
    return H


def S(F: LinearFrobenius, H: WittLattice, i: int) -> WittLattice:
    return _sum_all([f_power(F, H, j) for j in range(i + 1)])


def T(F: LinearFrobenius, H: WittLattice, i: int) -> WittLattice:
    return _meet_all([f_power(F, H, j) for j in range(i + 1)])


def _stabilization(F, H, combine, limit):
    """Least i with op_i(H) = op_(i+1)(H), where op_(i+1) = combine(op_i, F^(i+1) H)."""
    cur = H
    power = H
    for i in range(limit + 1):
        power = F.apply_lattice(power)
        nxt = combine(cur, power)
        if nxt == cur:
            return i, cur
        cur = nxt
    raise NonStabilizingError(f"no stabilisation within {limit} steps")


def in_lat1(F: LinearFrobenius, H: WittLattice) -> bool:
    """l(H / H cap FH) = l(FH / H cap FH) <= 1."""
    FH = F.apply_lattice(H)
    meet = H.intersection(FH)
    a, b = meet.colength_in(H), meet.colength_in(FH)
    return a == b <= 1


@dataclass
class SlopeZeroData:
    s: int
    t: int
    S_inf: WittLattice
    T_inf: WittLattice
    in_lat1: bool


def slope_zero_calculus(F: LinearFrobenius, H: WittLattice, limit: int | None = None) -> SlopeZeroData:
    """Stabilisation indices s(H), t(H) and the limits S_inf, T_inf."""
    limit = 4 * F.rank if limit is None else limit
    s, S_inf = _stabilization(F, H, WittLattice.sum, limit)
    t, T_inf = _stabilization(F, H, WittLattice.intersection, limit)
    return SlopeZeroData(s, t, S_inf, T_inf, in_lat1(F, H))


def corr_table(F: LinearFrobenius, H: WittLattice, i: int, j: int, data: SlopeZeroData | None = None):
    """Predicted T_j(S_i(H)) from the four-case table."""
    d = data or slope_zero_calculus(F, H)
    if i >= d.s:
        return d.S_inf
    if j <= i:
        return f_power(F, S(F, H, i - j), j)
    if j < i + d.t:
        return f_power(F, T(F, H, j - i), i)
    return d.T_inf


def random_lat1(F: LinearFrobenius, rng: random.Random, r: int = 2) -> WittLattice:
    """A colength-one super- or sublattice of L0; both lie in Lat<=1 when F L0 = L0."""
    R = F.ring
    n = F.rank
    L0 = WittLattice.standard(R, n, r)
    while True:
        v = [(rng.randrange(R.p), rng.randrange(R.p)) for _ in range(n)]
        if any(x != (0, 0) for x in v):
            break
    if rng.random() < 0.5:
        # L0 + p^-1 W v
        pv = [R.mul(R.p_power(r - 1), x) for x in v]
        return WittLattice(R, n, r, list(L0.rows) + [pv])
    # kernel of x -> v . x mod p
    red = [R.reduce(x) for x in v]
    from .exact_core import kernel_gf

    ker = kernel_gf([red], R.field, n)
    rows = [[R.mul(R.p_power(r), R.lift(y)) for y in kv] for kv in ker.basis]
    rows += [[R.p_power(r + 1) if a == b else (0, 0) for b in range(n)] for a in range(n)]
    return WittLattice(R, n, r, rows)
