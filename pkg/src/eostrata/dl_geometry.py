"""Points of the varieties Z_i^<n> and their two Frobenius-twisted variants.

A point is a pair (H1, H2) of subspaces of GF(p^2k)^n of dimensions i and
i - 1.  With phi the coordinatewise p-power map and sigma = phi^2:

* ``Z``:      H2 <= phi(H1) and phi(H2) <= H1
* ``Ztilde``: H2 <= H1 and H2 <= sigma(H1)
* ``Zhat``:   H2 <= H1 and sigma(H2) <= H1

Enumeration never runs over all pairs.  Each variant is parametrised by a
subspace K with dim(K cap sigma K) >= dim K - 1 ("near-rational"), and those
are produced by a recursion:

    near_d = rational_d
           + {K' + sigma^-1 K' : K' in near_(d-1) not rational}
           + {K' + <u> : K' rational of dim d-1}

keeping only non-rational results in the last two families.  Every
non-rational near K is produced once, with K cap sigma K = K'.  The work is
done on numpy batches of reduced row echelon matrices; ``brute_force_points``
is the slow independent route used to check it on small cases.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterator, Sequence

import numpy as np

from .exact_core import FiniteField, GuardError, Subspace, all_subspaces, count_subspaces, gf

VARIANTS = ("Z", "Ztilde", "Zhat")
MAPS = {
    # name: (source, target)
    "phihat": ("Zhat", "Z"),
    "psihat": ("Z", "Zhat"),
    "phitilde": ("Z", "Ztilde"),
    "psitilde": ("Ztilde", "Z"),
}
GUARD = {"n": 4, "p": 3, "k": 2}
DEFAULT_CHUNK = 1 << 17
MAX_LIST_POINTS = 500_000


@dataclass(frozen=True)
class DLVarietyId:
    n: int
    i: int
    variant: str = "Z"

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")
        if not 1 <= self.i <= self.n:
            raise ValueError(f"need 1 <= i <= n, got i={self.i}, n={self.n}")

    def __str__(self):
        return f"{self.variant}_{self.i}^<{self.n}>"


@dataclass(frozen=True)
class DLPoint:
    H1: Subspace
    H2: Subspace

    def key(self):
        return (self.H1.basis, self.H2.basis)


def check_guard(n: int, p: int, k: int, override: bool = False):
    if override:
        return
    if n > GUARD["n"] or p > GUARD["p"] or k > GUARD["k"]:
        raise GuardError(
            f"n={n}, p={p}, k={k} exceeds the enumeration guard "
            f"(n <= {GUARD['n']}, p <= {GUARD['p']}, k <= {GUARD['k']})"
        )


# ---------------------------------------------------------------------------
# batched linear algebra on (B, rows, n) arrays of field elements


class BatchOps:
    """Vectorised GF(q) helpers built on the lookup tables of a field."""

    def __init__(self, field: FiniteField):
        if field.q > 255:
            raise GuardError("batched arithmetic supports q <= 255")
        self.field = field
        t = field.np_tables
        self.add = t["add"]
        self.sub = t["sub"]
        self.mul = t["mul"]
        self.inv = t["inv"]
        frob = t["frob"]
        self.phi = frob
        self.phi_inv = t["frob_inv"]
        self.sigma = frob[frob]
        self.sigma_inv = self.phi_inv[self.phi_inv]

    def apply(self, table, X):
        return table[X]

    def rref(self, X: np.ndarray):
        """Row-reduce each matrix; returns (R, rank) with zero rows last."""
        R = X.copy()
        B, m, n = R.shape
        row = np.zeros(B, dtype=np.int64)
        ar = np.arange(m)
        for c in range(n):
            col = R[:, :, c]
            mask = (col != 0) & (ar[None, :] >= row[:, None])
            has = mask.any(axis=1)
            if not has.any():
                continue
            b = np.nonzero(has)[0]
            piv = mask[b].argmax(axis=1)
            r0 = row[b]
            top = R[b, r0].copy()
            R[b, r0] = R[b, piv]
            R[b, piv] = top
            prow = self.mul[self.inv[R[b, r0, c]][:, None], R[b, r0]]
            R[b, r0] = prow
            for r in range(m):
                f = R[b, r, c]
                sel = (f != 0) & (r0 != r)
                if not sel.any():
                    continue
                bb = b[sel]
                R[bb, r] = self.sub[R[bb, r], self.mul[f[sel][:, None], prow[sel]]]
            row[b] += 1
        return R, row

    def span(self, X: np.ndarray, d: int) -> np.ndarray:
        """RREF of the row span, assumed to have dimension d."""
        R, rank = self.rref(X)
        if (rank != d).any():
            raise ArithmeticError("unexpected rank in batched span")
        return R[:, :d, :]

    def pivots(self, H: np.ndarray) -> np.ndarray:
        return (H != 0).argmax(axis=2)

    def reduce(self, H: np.ndarray, V: np.ndarray) -> np.ndarray:
        """Residues of the rows of V modulo the RREF subspaces H (row-wise batch)."""
        W = V.copy()
        if H.shape[1] == 0:
            return W
        piv = self.pivots(H)
        B = H.shape[0]
        ib = np.arange(B)
        for r in range(H.shape[1]):
            coef = W[ib, :, piv[:, r]]  # (B, e)
            W = self.sub[W, self.mul[coef[:, :, None], H[:, r][:, None, :]]]
        return W

    def contains(self, H: np.ndarray, V: np.ndarray) -> np.ndarray:
        """Boolean (B,): every row of V lies in H."""
        if V.shape[1] == 0:
            return np.ones(V.shape[0], dtype=bool)
        return ~self.reduce(H, V).any(axis=(1, 2))

    def is_rational(self, H: np.ndarray) -> np.ndarray:
        """sigma(H) == H for RREF batches."""
        return (self.sigma[H] == H).all(axis=(1, 2))

    def matmul(self, A: np.ndarray, Bm: np.ndarray) -> np.ndarray:
        """Batched product over the field: (B, r, s) x (B, s, t) -> (B, r, t)."""
        out = np.zeros((A.shape[0], A.shape[1], Bm.shape[2]), dtype=A.dtype)
        for j in range(A.shape[2]):
            out = self.add[out, self.mul[A[:, :, j][:, :, None], Bm[:, j][:, None, :]]]
        return out


def _schubert_cells(n: int, d: int):
    """Pivot column sets and free positions of d x n RREF matrices."""
    from itertools import combinations

    for piv in combinations(range(n), d):
        free = [(r, c) for r in range(d) for c in range(piv[r] + 1, n) if c not in piv]
        yield piv, free


def rref_family(n: int, d: int, alphabet: Sequence[int], dtype=np.uint8) -> np.ndarray:
    """All d-dim RREF matrices with free entries drawn from ``alphabet``."""
    alphabet = np.asarray(alphabet, dtype=dtype)
    blocks = []
    for piv, free in _schubert_cells(n, d):
        cnt = len(alphabet) ** len(free)
        blk = np.zeros((cnt, d, n), dtype=dtype)
        for r, c in enumerate(piv):
            blk[:, r, c] = 1
        if free:
            grids = np.indices((len(alphabet),) * len(free)).reshape(len(free), -1)
            for (r, c), g in zip(free, grids):
                blk[:, r, c] = alphabet[g]
        blocks.append(blk)
    if not blocks:
        return np.zeros((1 if d == 0 else 0, d, n), dtype=dtype)
    return np.concatenate(blocks)


class Context:
    """Field, batch helpers and cached rational families for one (n, p, k)."""

    def __init__(self, n: int, p: int, k: int, chunk: int = DEFAULT_CHUNK):
        self.n, self.p, self.k = n, p, k
        self.field = gf(p, 2 * k)
        self.ops = BatchOps(self.field)
        self.chunk = chunk
        self.small = np.array(self.field.subfield_elements(2), dtype=np.uint8)
        self.all_elts = np.arange(self.field.q, dtype=np.uint8)
        self._rational = {}

    def rational(self, d: int) -> np.ndarray:
        """Subspaces defined over GF(p^2), as RREF batches."""
        if d not in self._rational:
            if d == 0:
                self._rational[d] = np.zeros((1, 0, self.n), dtype=np.uint8)
            else:
                self._rational[d] = rref_family(self.n, d, self.small)
        return self._rational[d]

    def lines(self, m: int) -> np.ndarray:
        """Normalised nonzero vectors of GF(q)^m, shape (N, m)."""
        return rref_family(m, 1, self.all_elts)[:, 0, :]


def _chunks(arr: np.ndarray, size: int):
    for s in range(0, arr.shape[0], size):
        yield arr[s : s + size]


def _superset_batches(ctx: Context, K: np.ndarray, d: int):
    """Pairs (index into K, K + <u>) for all u spanning lines of the quotient.

    K is a batch of RREF matrices of dimension d sharing nothing in particular;
    rows are grouped by pivot pattern so the quotient coordinates are fixed.
    """
    n = ctx.n
    ops = ctx.ops
    if K.shape[0] == 0:
        return
    piv = ops.pivots(K) if d else np.zeros((K.shape[0], 0), dtype=np.int64)
    keys = [tuple(r) for r in piv]
    groups: dict = {}
    for idx, kk in enumerate(keys):
        groups.setdefault(kk, []).append(idx)
    for pv, idxs in sorted(groups.items()):
        freecols = [c for c in range(n) if c not in pv]
        L = ctx.lines(len(freecols))
        U = np.zeros((L.shape[0], n), dtype=np.uint8)
        U[:, freecols] = L
        idxs = np.array(idxs)
        per = max(1, ctx.chunk // max(1, L.shape[0]))
        for sub in _chunks(idxs, per):
            Kb = np.repeat(K[sub], L.shape[0], axis=0)
            Ub = np.tile(U, (len(sub), 1))[:, None, :]
            for s in range(0, Kb.shape[0], ctx.chunk):
                X = np.concatenate([Kb[s : s + ctx.chunk], Ub[s : s + ctx.chunk]], axis=1)
                src = np.repeat(sub, L.shape[0])[s : s + ctx.chunk]
                yield src, ops.span(X, d + 1)


def near_nonrational(ctx: Context, d: int) -> Iterator[tuple]:
    """Batches (K, K cap sigma K) over non-rational K with dim(K cap sigma K) = d - 1."""
    ops = ctx.ops
    n = ctx.n
    if d < 1 or d >= n:  # the whole space is rational
        return
    if d == 1:
        L = ctx.lines(n)
        for blk in _chunks(L, ctx.chunk):
            K = blk[:, None, :]
            keep = ~ops.is_rational(K)
            yield K[keep], np.zeros((int(keep.sum()), 0, n), dtype=np.uint8)
        return
    for Kp, _ in near_nonrational(ctx, d - 1):
        if Kp.shape[0] == 0:
            continue
        K = ops.span(np.concatenate([Kp, ops.sigma_inv[Kp]], axis=1), d)
        keep = ~ops.is_rational(K)
        yield K[keep], Kp[keep]
    R = ctx.rational(d - 1)
    for src, K in _superset_batches(ctx, R, d - 1):
        keep = ~ops.is_rational(K)
        yield K[keep], R[src][keep]


def _hyperplane_batches(ctx: Context, H: np.ndarray, d: int):
    """(H, H2) with H2 running over all hyperplanes of each H (dim d)."""
    ops = ctx.ops
    if d == 1:
        for blk in _chunks(H, ctx.chunk):
            yield blk, np.zeros((blk.shape[0], 0, ctx.n), dtype=np.uint8)
        return
    C = rref_family(d, d - 1, ctx.all_elts)  # hyperplanes of GF(q)^d as coefficient rows
    per = max(1, ctx.chunk // C.shape[0])
    for sub in _chunks(np.arange(H.shape[0]), per):
        Hb = np.repeat(H[sub], C.shape[0], axis=0)
        Cb = np.tile(C, (len(sub), 1, 1))
        for s in range(0, Hb.shape[0], ctx.chunk):
            h = Hb[s : s + ctx.chunk]
            H2 = ops.span(ops.matmul(Cb[s : s + ctx.chunk], h), d - 1)
            yield h, H2


def point_batches(vid: DLVarietyId, p: int, k: int, *, chunk: int = DEFAULT_CHUNK,
                  ctx: Context | None = None, override_guard: bool = False):
    """Stream (H1, H2) batches covering every point exactly once."""
    n, i = vid.n, vid.i
    check_guard(n, p, k, override_guard)
    ctx = ctx or Context(n, p, k, chunk)
    ops = ctx.ops
    if vid.variant in ("Z", "Zhat"):
        # K = H2 (Zhat) or phi^-1(H2) (Z), of dimension i - 1, near-rational
        def out(H1, K):
            return (H1, ops.phi[K]) if vid.variant == "Z" else (H1, K)

        for K, _ in near_nonrational(ctx, i - 1):
            if K.shape[0]:
                H1 = ops.span(np.concatenate([K, ops.sigma[K]], axis=1), i)
                yield out(H1, K)
        R = ctx.rational(i - 1)
        for src, H1 in _superset_batches(ctx, R, i - 1):
            yield out(H1, R[src])
    else:
        for K, Kint in near_nonrational(ctx, i):
            if K.shape[0]:
                yield K, Kint
        yield from _hyperplane_batches(ctx, ctx.rational(i), i)


# ---------------------------------------------------------------------------
# validation and relative Frobenius on batches


def valid_batch(ops: BatchOps, variant: str, H1, H2) -> np.ndarray:
    if variant == "Z":
        return ops.contains(ops.phi[H1], H2) & ops.contains(H1, ops.phi[H2])
    if variant == "Ztilde":
        return ops.contains(H1, H2) & ops.contains(ops.sigma[H1], H2)
    if variant == "Zhat":
        return ops.contains(H1, H2) & ops.contains(H1, ops.sigma[H2])
    raise ValueError(variant)


def frobenius_map_batch(ops: BatchOps, name: str, H1, H2):
    if name in ("phihat", "phitilde"):
        return H1, ops.phi[H2]
    if name in ("psihat", "psitilde"):
        return ops.phi[H1], H2
    raise ValueError(f"unknown map {name}")


COMPOSITES = {
    # variant: ((first, second), ...) composites starting on that variant
    "Z": (("phitilde", "psitilde"), ("psihat", "phihat")),
    "Ztilde": (("psitilde", "phitilde"),),
    "Zhat": (("phihat", "psihat"),),
}


def composite_check_batch(ops: BatchOps, variant: str, H1, H2) -> np.ndarray:
    """Each composite lands on the right variants and equals (phi H1, phi H2)."""
    ok = np.ones(H1.shape[0], dtype=bool)
    F1, F2 = ops.phi[H1], ops.phi[H2]
    for first, second in COMPOSITES[variant]:
        mid = frobenius_map_batch(ops, first, H1, H2)
        ok &= valid_batch(ops, MAPS[first][1], *mid)
        end = frobenius_map_batch(ops, second, *mid)
        ok &= valid_batch(ops, MAPS[second][1], *end)
        ok &= (end[0] == F1).all(axis=(1, 2)) & (end[1] == F2).all(axis=(1, 2))
    return ok


def _to_subspace(field, rows: np.ndarray) -> Subspace:
    basis = tuple(tuple(int(x) for x in r) for r in rows)
    pivots = tuple(next(j for j, x in enumerate(r) if x) for r in basis)
    return Subspace._raw(field, rows.shape[-1], basis, pivots)


def iter_points(vid: DLVarietyId, k: int, p: int = 2, **kw) -> Iterator[DLPoint]:
    field = gf(p, 2 * k)
    for H1, H2 in point_batches(vid, p, k, **kw):
        for a, b in zip(H1, H2):
            yield DLPoint(_to_subspace(field, a), _to_subspace(field, b))


def count_points(vid: DLVarietyId, k: int, p: int = 2, **kw) -> int:
    return sum(h.shape[0] for h, _ in point_batches(vid, p, k, **kw))


def enumerate_points(vid: DLVarietyId, k: int, p: int = 2, *, override_guard: bool = False,
                     max_points: int = MAX_LIST_POINTS) -> list:
    """All points over GF(p^2k), sorted by echelon bases."""
    total = count_points(vid, k, p, override_guard=override_guard)
    if total > max_points and not override_guard:
        raise GuardError(f"{total} points exceed the list limit {max_points}; use count_points")
    pts = list(iter_points(vid, k, p, override_guard=override_guard))
    pts.sort(key=DLPoint.key)
    return pts


def brute_force_points(vid: DLVarietyId, k: int, p: int = 2) -> list:
    """All pairs of subspaces tested against the defining conditions."""
    field = gf(p, 2 * k)
    n, i = vid.n, vid.i
    out = []
    H2s = list(all_subspaces(field, n, i - 1))
    for H1 in all_subspaces(field, n, i):
        for H2 in H2s:
            if point_is_valid(vid.variant, DLPoint(H1, H2)):
                out.append(DLPoint(H1, H2))
    out.sort(key=DLPoint.key)
    return out


def point_is_valid(variant: str, pt: DLPoint) -> bool:
    H1, H2 = pt.H1, pt.H2
    if variant == "Z":
        return H1.frobenius(1).contains(H2) and H1.contains(H2.frobenius(1))
    if variant == "Ztilde":
        return H1.contains(H2) and H1.frobenius(2).contains(H2)
    if variant == "Zhat":
        return H1.contains(H2) and H1.contains(H2.frobenius(2))
    raise ValueError(variant)


def relative_frobenius(vid: DLVarietyId, name: str, pt: DLPoint) -> tuple:
    """Apply one of phihat, psihat, phitilde, psitilde; returns (target id, point)."""
    if name not in MAPS:
        raise ValueError(f"unknown map {name}")
    src, dst = MAPS[name]
    if vid.variant != src:
        raise ValueError(f"{name} starts on {src}, not on {vid.variant}")
    if not point_is_valid(src, pt):
        raise ValueError("point does not lie on the source variety")
    if name in ("phihat", "phitilde"):
        img = DLPoint(pt.H1, pt.H2.frobenius(1))
    else:
        img = DLPoint(pt.H1.frobenius(1), pt.H2)
    return DLVarietyId(vid.n, vid.i, dst), img


def frobenius_point(pt: DLPoint) -> DLPoint:
    return DLPoint(pt.H1.frobenius(1), pt.H2.frobenius(1))


# ---------------------------------------------------------------------------
# special divisors


def rational_vectors(field: FiniteField, n: int) -> list:
    """Normalised GF(p^2)-rational vectors of GF(q)^n (lines or hyperplane normals)."""
    small = field.subfield_elements(2)
    return [tuple(int(x) for x in row[0]) for row in rref_family(n, 1, small)]


def _dot(field, u, v):
    acc = 0
    for a, b in zip(u, v):
        acc = field.add_t[acc][field.mul_t[a][b]]
    return acc


def in_special_divisor(pt: DLPoint, kind: str, vec: Sequence[int]) -> bool:
    """[H]: H1 <= ker(normal); [L]: span(vec) <= H2."""
    F = pt.H1.field
    if kind == "H":
        return all(_dot(F, vec, row) == 0 for row in pt.H1.basis)
    if kind == "L":
        return pt.H2.contains_vector(vec)
    raise ValueError("divisor kind must be 'H' or 'L'")


def _check_divisor_ranks(vid: DLVarietyId, kind: str):
    if kind == "H" and vid.i >= vid.n:
        raise ValueError("[H] needs i < n")
    if kind == "L" and vid.i <= 1:
        raise ValueError("[L] needs i > 1")


def special_divisor_points(vid: DLVarietyId, kind: str, vec: Sequence[int], k: int, p: int = 2,
                           **kw) -> list:
    _check_divisor_ranks(vid, kind)
    field = gf(p, 2 * k)
    if tuple(field.frobenius(x, 2) for x in vec) != tuple(vec):
        raise ValueError("special divisors need a GF(p^2)-rational vector")
    return [pt for pt in enumerate_points(vid, k, p, **kw) if in_special_divisor(pt, kind, vec)]


def divisor_mask_batch(ops: BatchOps, kind: str, vec, H1, H2) -> np.ndarray:
    v = np.asarray(vec, dtype=np.uint8)
    if kind == "H":
        prod_ = ops.mul[H1, v[None, None, :]]
        acc = np.zeros(prod_.shape[:2], dtype=np.uint8)
        for j in range(prod_.shape[2]):
            acc = ops.add[acc, prod_[:, :, j]]
        return ~acc.any(axis=1)
    V = np.broadcast_to(v, (H2.shape[0], 1, v.shape[0])).copy()
    return ops.contains(H2, V)


@dataclass
class SweepReport:
    """Streaming statistics for one variety."""

    vid: DLVarietyId
    p: int
    k: int
    count: int = 0
    invalid: int = 0
    composite_failures: int = 0
    divisor_counts: dict = None


def sweep(vid: DLVarietyId, k: int, p: int = 2, *, divisors: Sequence = (), chunk: int = DEFAULT_CHUNK,
          override_guard: bool = False, ctx: Context | None = None) -> SweepReport:
    """Count points, re-validate them, check Frobenius composites and divisor loci."""
    ctx = ctx or Context(vid.n, p, k, chunk)
    ops = ctx.ops
    rep = SweepReport(vid, p, k, divisor_counts={(kind, tuple(v)): 0 for kind, v in divisors})
    for H1, H2 in point_batches(vid, p, k, ctx=ctx, override_guard=override_guard):
        if H1.shape[0] == 0:
            continue
        rep.count += H1.shape[0]
        rep.invalid += int((~valid_batch(ops, vid.variant, H1, H2)).sum())
        rep.composite_failures += int((~composite_check_batch(ops, vid.variant, H1, H2)).sum())
        for kind, v in divisors:
            rep.divisor_counts[(kind, tuple(v))] += int(divisor_mask_batch(ops, kind, v, H1, H2).sum())
    return rep


def z1_count(n: int, p: int, k: int) -> int:
    q = p ** (2 * k)
    return (q**n - 1) // (q - 1)


# ---------------------------------------------------------------------------
# principality of divisors supported on the special divisors


def _key_vec(v) -> tuple:
    return tuple(int(x) for x in v)


class Incidence:
    """GF(p^2)-rational lines and hyperplanes of GF(p^2)^n with their incidence.

    Lines and hyperplanes are both indexed by normalised vectors (a spanning
    vector, resp. a normal vector); ``matrix[h, l] = 1`` when line l lies in
    hyperplane h.
    """

    _cache: dict = {}

    def __init__(self, n: int, p: int):
        self.n, self.p = n, p
        self.field = gf(p, 2)
        F = self.field
        arr = rref_family(n, 1, range(F.q))[:, 0, :]
        self.vectors = [tuple(int(x) for x in r) for r in arr]
        self.index = {v: j for j, v in enumerate(self.vectors)}
        ops = BatchOps(F)
        prod_ = ops.mul[arr[:, None, :], arr[None, :, :]]
        acc = np.zeros(prod_.shape[:2], dtype=np.uint8)
        for j in range(n):
            acc = ops.add[acc, prod_[:, :, j]]
        self.matrix = (acc == 0).astype(np.int64)

    @classmethod
    def get(cls, n: int, p: int) -> "Incidence":
        key = (n, p)
        if key not in cls._cache:
            cls._cache[key] = Incidence(n, p)
        return cls._cache[key]

    @property
    def size(self) -> int:
        return len(self.vectors)

    def normalise(self, v) -> tuple:
        v = _key_vec(v)
        F = self.field
        lead = next((x for x in v if x), None)
        if lead is None:
            raise ValueError("zero vector does not define a line or hyperplane")
        inv = F.inv(lead)
        return tuple(F.mul(inv, x) for x in v)


class RationalDivisor:
    """sum a_L [L] + sum b_H [H] on Z_i^<n> over GF(p^2).

    Stored exactly as integer vectors A, B over the incidence index together
    with a positive integer denominator: a = A / den, b = B / den.
    """

    def __init__(self, n: int, i: int, p: int, a: dict | None = None, b: dict | None = None):
        self.n, self.i, self.p = n, i, p
        inc = Incidence.get(n, p)
        a = {inc.normalise(k): Fraction(v) for k, v in (a or {}).items()}
        b = {inc.normalise(k): Fraction(v) for k, v in (b or {}).items()}
        den = 1
        for x in list(a.values()) + list(b.values()):
            den = lcm(den, x.denominator)
        A = [0] * inc.size
        B = [0] * inc.size
        for key, x in a.items():
            A[inc.index[key]] += int(x * den)
        for key, x in b.items():
            B[inc.index[key]] += int(x * den)
        self.A, self.B, self.den = A, B, den

    @classmethod
    def from_integers(cls, n, i, p, A: Sequence[int], B: Sequence[int], den: int = 1):
        obj = cls.__new__(cls)
        obj.n, obj.i, obj.p = n, i, p
        obj.A, obj.B, obj.den = [int(x) for x in A], [int(x) for x in B], int(den)
        return obj

    def _coeffs(self, vec):
        inc = Incidence.get(self.n, self.p)
        return {inc.vectors[j]: Fraction(x, self.den) for j, x in enumerate(vec) if x}

    @property
    def a(self) -> dict:
        return self._coeffs(self.A)

    @property
    def b(self) -> dict:
        return self._coeffs(self.B)

    def __add__(self, other: "RationalDivisor") -> "RationalDivisor":
        d = lcm(self.den, other.den)
        f, g = d // self.den, d // other.den
        A = [f * x + g * y for x, y in zip(self.A, other.A)]
        B = [f * x + g * y for x, y in zip(self.B, other.B)]
        return RationalDivisor.from_integers(self.n, self.i, self.p, A, B, d)

    def scaled(self, c) -> "RationalDivisor":
        c = Fraction(c)
        return RationalDivisor.from_integers(
            self.n, self.i, self.p, [x * c.numerator for x in self.A],
            [x * c.numerator for x in self.B], self.den * c.denominator)

    def bump(self, kind: str, index: int, amount: int = 1) -> "RationalDivisor":
        """Copy with one coefficient increased by ``amount``."""
        A, B = list(self.A), list(self.B)
        (A if kind == "A" else B)[index] += amount * self.den
        return RationalDivisor.from_integers(self.n, self.i, self.p, A, B, self.den)


def _matvec(M: np.ndarray, v: list) -> list:
    if max((abs(x) for x in v), default=0) < 2**40:
        return [int(x) for x in M @ np.array(v, dtype=np.int64)]
    return [sum(int(M[r, c]) * v[c] for c in range(len(v)) if M[r, c]) for r in range(M.shape[0])]


def _check_range(D: RationalDivisor):
    if not 1 <= D.i <= D.n - 1:
        raise ValueError(f"principality is stated for 1 <= i <= n-1, got i={D.i}")


def _scaled_equal(lhs: list, rhs: list, exp: int, p: int) -> bool:
    """lhs == p^exp * rhs exactly."""
    if exp >= 0:
        f = p**exp
        return all(x == f * y for x, y in zip(lhs, rhs))
    f = p ** (-exp)
    return all(f * x == y for x, y in zip(lhs, rhs))


def form1_exponent(n: int, i: int) -> int:
    return i + 1 - n


def form2_exponent(n: int, i: int) -> int:
    """Exponent printed for the dual characterisation."""
    return 1 - i


def dual_exponent(n: int, i: int, exp1: int | None = None) -> int:
    """Exponent that makes the dual form equivalent to form 1.

    Summing b_H over hyperplanes through L counts each other line
    #P^(n-3) times and L itself #P^(n-2) times, so with sum(a) = 0 one gets
    sum_{H >= L} b_H = p^exp1 * p^(2n-4) * a_L.
    """
    exp1 = form1_exponent(n, i) if exp1 is None else exp1
    return -exp1 - (2 * n - 4)


def is_principal(D: RationalDivisor, exponent: int | None = None) -> bool:
    """sum a_L = 0 and b_H = p^exponent * sum_{L <= H} a_L for all H."""
    _check_range(D)
    exponent = form1_exponent(D.n, D.i) if exponent is None else exponent
    if sum(D.A) != 0:
        return False
    inc = Incidence.get(D.n, D.p)
    return _scaled_equal(D.B, _matvec(inc.matrix, D.A), exponent, D.p)


def is_principal_dual(D: RationalDivisor, exponent: int | None = None) -> bool:
    """sum b_H = 0 and a_L = p^exponent * sum_{H >= L} b_H for all L."""
    _check_range(D)
    exponent = form2_exponent(D.n, D.i) if exponent is None else exponent
    if sum(D.B) != 0:
        return False
    inc = Incidence.get(D.n, D.p)
    return _scaled_equal(D.A, _matvec(inc.matrix.T, D.B), exponent, D.p)


def principal_form_equivalence(D: RationalDivisor, exp1: int | None = None, exp2: int | None = None) -> bool:
    """True iff the two characterisations give the same verdict on D."""
    return is_principal(D, exp1) == is_principal_dual(D, exp2)


def random_divisor(n: int, i: int, p: int, rng, *, kind: str = "random", exponent: int | None = None,
                   density: float = 0.3) -> RationalDivisor:
    """Seeded divisor: 'random' coefficients, or 'principal' built from form 1.

    ``rng`` is a ``random.Random``; random coefficients are integers in
    [-5, 5] over the common denominator 1 or p.
    """
    N = Incidence.get(n, p).size
    if kind == "random":
        den = rng.choice([1, p])
        A = [rng.randint(-5, 5) if rng.random() < density else 0 for _ in range(N)]
        B = [rng.randint(-5, 5) if rng.random() < density else 0 for _ in range(N)]
        return RationalDivisor.from_integers(n, i, p, A, B, den)
    if kind != "principal":
        raise ValueError("kind must be 'random' or 'principal'")
    exponent = form1_exponent(n, i) if exponent is None else exponent
    A = [rng.randint(-5, 5) for _ in range(N)]
    A[rng.randrange(N)] -= sum(A)
    sums = _matvec(Incidence.get(n, p).matrix, A)
    if exponent >= 0:
        f = p**exponent
        return RationalDivisor.from_integers(n, i, p, A, [f * s for s in sums], 1)
    den = p ** (-exponent)
    return RationalDivisor.from_integers(n, i, p, [den * x for x in A], sums, den)


def parse_divisor_file(text: str, n: int, i: int, p: int) -> RationalDivisor:
    """Lines ``A <line-basis> <rational>`` and ``B <hyperplane-normal> <rational>``.

    Vectors are comma-separated GF(p^2) element codes, e.g. ``A 1,0,3 -1/2``.
    Blank lines and lines starting with ``#`` are ignored.
    """
    a: dict = {}
    b: dict = {}
    F = gf(p, 2)
    inc = Incidence.get(n, p)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3 or parts[0] not in ("A", "B"):
            raise ValueError(f"line {lineno}: expected 'A|B <vector> <rational>'")
        try:
            vec = tuple(int(x) for x in parts[1].split(","))
            val = Fraction(parts[2])
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
        if len(vec) != n or any(not 0 <= x < F.q for x in vec) or not any(vec):
            raise ValueError(f"line {lineno}: vector must be nonzero with {n} entries in 0..{F.q - 1}")
        key = inc.normalise(vec)
        target = a if parts[0] == "A" else b
        target[key] = target.get(key, Fraction(0)) + val
    return RationalDivisor(n, i, p, a, b)


def lines_per_hyperplane(n: int, p: int) -> int:
    return count_subspaces(p * p, n - 1, 1)


def hyperplanes_per_line(n: int, p: int) -> int:
    return count_subspaces(p * p, n - 1, n - 2)


__all__ = [
    "DLVarietyId", "DLPoint", "enumerate_points", "count_points", "relative_frobenius",
    "special_divisor_points", "is_principal", "principal_form_equivalence", "sweep",
    "brute_force_points", "RationalDivisor",
]
