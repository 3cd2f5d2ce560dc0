"""Lattice windows, toy Hecke models and the two Chow-kernel solvers.

A ``BuildingWindow`` lists every W(F_{p^2})-lattice L with
p^r L0 <= L <= p^-r L0.  Lattices are not identified up to scaling, so S_p
is honest multiplication by p and operators only make sense away from the
window boundary.  ``ToyModel`` is the combinatorial shadow used by the
solvers: vertices, edges e with pr(e) a colength-one sublattice of pl(e),
and the relation A on edges.

Function conventions:

* (pl_* f)(v) = sum of f(e) over edges with pl(e) = v, likewise pr_*;
* (A f)(e) = sum of f(f') over f' in A(e);
* (S_p g)(v) = g(p v), (S_E f)(e) = f(p e).
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy import sparse

from .exact_core import (
    Coeff,
    GuardError,
    PrecisionError,
    TruncatedWittRing,
    WittLattice,
    all_subspaces,
)
from .linalg import KernelSpace, SparseEchelon, echelon

GUARD = {"n": 3, "p": 3, "r": 2}


def t_degree(n: int, p: int) -> int:
    """Number of colength-one sublattices, (p^{2n}-1)/(p^2-1)."""
    return (p ** (2 * n) - 1) // (p * p - 1)


def a_degree(n: int, p: int) -> int:
    """|A(e)| on complete edges, (p^{2(n-1)}-1)/(p^2-1)."""
    return (p ** (2 * (n - 1)) - 1) // (p * p - 1)


def is_admissible(coeff: Coeff, n: int, p: int) -> bool:
    """Q always; GF(l) needs l not dividing p (p^{2n-2} - 1)."""
    if coeff.ell is None:
        return True
    return (p * (p ** (2 * n - 2) - 1)) % coeff.ell != 0


def check_coeff(coeff: Coeff, n: int, p: int) -> None:
    if not is_admissible(coeff, n, p):
        raise ValueError(f"coefficient field {coeff} is not admissible for n={n}, p={p}")


def admissible_primes(n: int, p: int, count: int = 3, start: int = 5) -> list:
    out = []
    ell = start
    while len(out) < count:
        if all(ell % d for d in range(2, int(ell**0.5) + 1)) and is_admissible(Coeff(ell), n, p):
            out.append(ell)
        ell += 1
    return out


# ---------------------------------------------------------------------------
# windows


def check_guard(n: int, p: int, r: int, override: bool = False) -> None:
    if override:
        return
    if n > GUARD["n"] or p > GUARD["p"] or r > GUARD["r"]:
        raise GuardError(
            f"window (n={n}, p={p}, r={r}) exceeds the guard "
            f"n<={GUARD['n']}, p<={GUARD['p']}, r<={GUARD['r']}"
        )


@dataclass
class BuildingWindow:
    n: int
    p: int
    r: int
    ring: TruncatedWittRing
    vertices: list  # WittLattice, BFS order from the top p^-r L0
    index: dict  # lattice key -> position
    subs: list  # per vertex: indices of colength-one sublattices in the window
    down: list  # per vertex: index of p L or None
    up: list  # per vertex: index of p^-1 L or None
    depth: list  # per vertex: largest k with p^k L and p^-k L both in the window

    @property
    def size(self) -> int:
        return len(self.vertices)

    def vertex_of(self, L: WittLattice) -> int | None:
        return self.index.get(L.key)

    @property
    def origin(self) -> int:
        return self.index[WittLattice.standard(self.ring, self.n, self.r, 0).key]

    def t_complete(self, v: int) -> bool:
        """All colength-one sublattices of v lie in the window."""
        return self.down[v] is not None

    def interior(self, margin: int) -> list:
        return [v for v in range(self.size) if self.depth[v] >= margin]

    def edges(self) -> list:
        return [(v, w) for v in range(self.size) for w in self.subs[v]]

    def to_model(self) -> "ToyModel":
        edges = self.edges()
        eidx = {e: i for i, e in enumerate(edges)}
        ins: dict = {}
        for i, (a, b) in enumerate(edges):
            ins.setdefault(b, []).append(i)
        pairs = []
        for i, (l2, l1) in enumerate(edges):
            L1 = self.vertices[l1]
            for j in ins.get(l2, ()):
                l4 = edges[j][0]
                if _p_times_contained(self.vertices[l4], L1):
                    pairs.append((i, j))
        a_complete = [self.up[l1] is not None for (_, l1) in edges]
        sp = {v: self.down[v] for v in range(self.size) if self.down[v] is not None}
        return ToyModel(
            n=self.n,
            p=self.p,
            vertices=[_vertex_name(L) for L in self.vertices],
            edges=edges,
            a_pairs=pairs,
            s_p=sp,
            vertex_interior=[self.t_complete(v) for v in range(self.size)],
            edge_interior=a_complete,
        )


def _vertex_name(L: WittLattice) -> str:
    parts = []
    for row in L.rows:
        parts.append(",".join(f"{a}+{b}x" if b else str(a) for a, b in row))
    return "[" + ";".join(parts) + "]"


def _p_times_contained(big: WittLattice, small: WittLattice) -> bool:
    """p * big <= small, without requiring p * big to lie in the window."""
    R = big.ring
    p = R.p_power(1)
    return all(small._contains_n([R.mul(p, x) for x in row]) for row in big.rows)


def _sublattices(L: WittLattice, hyperplanes: list) -> list:
    """Colength-one sublattices of L inside the window."""
    R = L.ring
    n = L.n
    B = L.rows
    scaled = [[R.scale(x, R.p) for x in row] for row in B]
    out = []
    for h in hyperplanes:
        gens = []
        for hr in h:
            v = [(0, 0)] * n
            for c, coef in enumerate(hr):
                if coef:
                    cl = R.lift(coef)
                    v = [R.add(x, R.mul(cl, y)) for x, y in zip(v, B[c])]
            gens.append(v)
        try:
            out.append(WittLattice(R, n, L.r, gens + scaled))
        except PrecisionError:
            continue
    return out


def build_window(n: int, p: int, r: int, override_guard: bool = False) -> BuildingWindow:
    """All lattices between p^r L0 and p^-r L0, with the sublattice graph."""
    if n < 2 or r < 1:
        raise ValueError("need n >= 2 and r >= 1")
    check_guard(n, p, r, override_guard)
    R = TruncatedWittRing(p, 2 * r + 2)
    hyps = [sub.basis for sub in all_subspaces(R.field, n, n - 1)]
    top = WittLattice.standard(R, n, r, -r)
    index = {top.key: 0}
    vertices = [top]
    subs = []
    queue = deque([0])
    while queue:
        v = queue.popleft()
        row = []
        for M in _sublattices(vertices[v], hyps):
            w = index.get(M.key)
            if w is None:
                w = len(vertices)
                index[M.key] = w
                vertices.append(M)
                queue.append(w)
            row.append(w)
        while len(subs) <= v:
            subs.append(None)
        subs[v] = sorted(set(row))

    def _scaled(L, k):
        try:
            return index[L.scale(k).key]
        except PrecisionError:
            return None

    down = [_scaled(L, 1) for L in vertices]
    up = [_scaled(L, -1) for L in vertices]
    depth = []
    for L in vertices:
        d = 0
        for k in range(1, r + 1):
            try:
                L.scale(k)
                L.scale(-k)
            except PrecisionError:
                break
            d = k
        depth.append(d)
    return BuildingWindow(n, p, r, R, vertices, index, subs, down, up, depth)


# ---------------------------------------------------------------------------
# toy models


@dataclass
class ToyModel:
    n: int
    p: int
    vertices: list
    edges: list  # (pl, pr) vertex indices
    a_pairs: list = field(default_factory=list)  # (e, f) with f in A(e)
    s_p: dict | None = None  # vertex -> vertex of p * L
    vertex_interior: list | None = None
    edge_interior: list | None = None

    def __post_init__(self):
        nv = len(self.vertices)
        self.edges = [tuple(int(x) for x in e) for e in self.edges]
        self.a_pairs = [tuple(int(x) for x in e) for e in self.a_pairs]
        for a, b in self.edges:
            if not (0 <= a < nv and 0 <= b < nv):
                raise ValueError(f"edge ({a},{b}) names an unknown vertex")
        ne = len(self.edges)
        for e, f in self.a_pairs:
            if not (0 <= e < ne and 0 <= f < ne):
                raise ValueError(f"A pair ({e},{f}) names an unknown edge")

    @property
    def nv(self) -> int:
        return len(self.vertices)

    @property
    def ne(self) -> int:
        return len(self.edges)

    # -- serialisation ------------------------------------------------------

    def to_json(self) -> dict:
        out = {
            "n": self.n,
            "p": self.p,
            "vertices": list(self.vertices),
            "t_edges": [[self.vertices[a], self.vertices[b]] for a, b in self.edges],
            "a_pairs": [list(x) for x in self.a_pairs],
        }
        if self.s_p is not None:
            out["s_p"] = [[self.vertices[v], self.vertices[w]] for v, w in sorted(self.s_p.items())]
        if self.vertex_interior is not None or self.edge_interior is not None:
            out["interior"] = {
                "vertices": [self.vertices[v] for v, ok in enumerate(self.vertex_interior or []) if ok],
                "edges": [i for i, ok in enumerate(self.edge_interior or []) if ok],
            }
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, data: dict) -> "ToyModel":
        verts = list(data["vertices"])
        pos = {v: i for i, v in enumerate(verts)}
        if len(pos) != len(verts):
            raise ValueError("duplicate vertex ids")
        try:
            edges = [(pos[a], pos[b]) for a, b in data["t_edges"]]
        except KeyError as exc:
            raise ValueError(f"edge names unknown vertex {exc}") from None
        sp = None
        if "s_p" in data:
            sp = {pos[a]: pos[b] for a, b in data["s_p"]}
        vi = ei = None
        if "interior" in data:
            iv = {pos[v] for v in data["interior"].get("vertices", [])}
            ie = set(data["interior"].get("edges", []))
            vi = [v in iv for v in range(len(verts))]
            ei = [e in ie for e in range(len(edges))]
        return cls(
            n=int(data["n"]),
            p=int(data["p"]),
            vertices=verts,
            edges=edges,
            a_pairs=[tuple(x) for x in data.get("a_pairs", [])],
            s_p=sp,
            vertex_interior=vi,
            edge_interior=ei,
        )

    @classmethod
    def loads(cls, text: str) -> "ToyModel":
        return cls.from_json(json.loads(text))

    def __eq__(self, other):
        return isinstance(other, ToyModel) and self.to_json() == other.to_json()

    # -- incidence matrices (integer, scipy CSR) ----------------------------

    def pl_matrix(self):
        """V x E, row v collects edges with pl(e) = v (this is pl_*)."""
        return _incidence([a for a, _ in self.edges], self.nv)

    def pr_matrix(self):
        return _incidence([b for _, b in self.edges], self.nv)

    def a_matrix(self):
        """E x E with entry (e, f) = 1 iff f in A(e)."""
        ne = self.ne
        if not self.a_pairs:
            return sparse.csr_matrix((ne, ne), dtype=np.int64)
        r, c = zip(*self.a_pairs)
        return sparse.csr_matrix((np.ones(len(r), dtype=np.int64), (r, c)), shape=(ne, ne))

    def sp_matrix(self):
        """V x V with (S_p g)(v) = g(p v); rows without p v stay zero."""
        if self.s_p is None:
            raise ValueError("model carries no S_p action")
        items = sorted(self.s_p.items())
        r = [v for v, _ in items]
        c = [w for _, w in items]
        return sparse.csr_matrix(
            (np.ones(len(r), dtype=np.int64), (r, c)), shape=(self.nv, self.nv)
        )

    def edge_scaling(self) -> dict:
        """e -> index of the edge (p pl(e), p pr(e)) when both exist."""
        if self.s_p is None:
            raise ValueError("model carries no S_p action")
        eidx = {e: i for i, e in enumerate(self.edges)}
        out = {}
        for i, (a, b) in enumerate(self.edges):
            pa, pb = self.s_p.get(a), self.s_p.get(b)
            if pa is not None and pb is not None and (pa, pb) in eidx:
                out[i] = eidx[(pa, pb)]
        return out

    def se_matrix(self):
        items = sorted(self.edge_scaling().items())
        r = [e for e, _ in items]
        c = [f for _, f in items]
        return sparse.csr_matrix(
            (np.ones(len(r), dtype=np.int64), (r, c)), shape=(self.ne, self.ne)
        )

    # -- regularity ---------------------------------------------------------

    def regularity(self) -> dict:
        """Degree checks against the building values, on interiors when known."""
        tdeg = np.asarray(self.pl_matrix().sum(axis=1)).ravel()
        adeg = np.asarray(self.a_matrix().sum(axis=1)).ravel()
        vset = [v for v in range(self.nv) if self.vertex_interior is None or self.vertex_interior[v]]
        eset = [e for e in range(self.ne) if self.edge_interior is None or self.edge_interior[e]]
        T, A = t_degree(self.n, self.p), a_degree(self.n, self.p)
        t_ok = all(int(tdeg[v]) == T for v in vset)
        a_ok = all(int(adeg[e]) == A for e in eset)
        return {
            "t_degree": T,
            "a_degree": A,
            "t_regular": t_ok,
            "a_regular": a_ok,
            "checked_vertices": len(vset),
            "checked_edges": len(eset),
        }


def _incidence(targets: Sequence[int], nrows: int):
    ne = len(targets)
    return sparse.csr_matrix(
        (np.ones(ne, dtype=np.int64), (list(targets), list(range(ne)))), shape=(nrows, ne)
    )


def random_model(n: int, p: int, seed: int, nv: int = 12, ne: int = 30, na: int = 40) -> ToyModel:
    """A seeded irregular toy model (for pattern and solver smoke tests)."""
    rng = np.random.default_rng(seed)
    edges = set()
    while len(edges) < ne:
        a, b = (int(x) for x in rng.integers(0, nv, size=2))
        if a != b:
            edges.add((a, b))
    edges = sorted(edges)
    ins: dict = {}
    for i, (_, b) in enumerate(edges):
        ins.setdefault(b, []).append(i)
    cand = [(i, j) for i, (a, _) in enumerate(edges) for j in ins.get(a, ())]
    pick = sorted(set(int(x) for x in rng.permutation(len(cand))[:na])) if cand else []
    pairs = [cand[k] for k in pick]
    return ToyModel(n, p, [f"v{i}" for i in range(nv)], edges, pairs)


# ---------------------------------------------------------------------------
# Hecke operators


@dataclass
class HeckeOperator:
    kind: tuple  # elementary divisor exponents, descending
    matrix: object  # scipy CSR, (T f)(z) = sum_{z'} f(z') over row z
    complete: list  # per vertex: the whole relative-position set lies in the window

    def degree(self, v: int) -> int:
        return int(self.matrix[v].sum())


def _type_tuple(kind, n: int) -> tuple:
    if isinstance(kind, str):
        k = kind.strip().upper()
        if k in ("S", "SP", "S_P"):
            return (1,) * n
        if k.startswith("T"):
            i = int(k[1:].strip("^()"))
            return (1,) * i + (0,) * (n - i)
        raise ValueError(f"unknown Hecke operator {kind!r}")
    t = tuple(sorted((int(x) for x in kind), reverse=True))
    if len(t) != n or t[-1] < 0:
        raise ValueError(f"type {kind} does not have {n} non-negative exponents")
    return t


def hecke_operator(window: BuildingWindow, kind) -> HeckeOperator:
    """T^(i) (kind "T1".."Tn"), S_p ("S") or any type (e_1 >= ... >= e_n).

    The relative position of z' to z is z' <= z with z / z' of the given
    elementary divisor type.
    """
    n = window.n
    t = _type_tuple(kind, n)
    total, top = sum(t), t[0]
    rows, cols = [], []
    complete = []
    for v in range(window.size):
        L = window.vertices[v]
        ok = True
        cur = L
        for _ in range(top):
            try:
                cur = cur.scale(1)
            except PrecisionError:
                ok = False
                break
        complete.append(ok)
        layer = {v}
        for _ in range(total):
            layer = {w for u in layer for w in window.subs[u]}
        for w in sorted(layer):
            M = window.vertices[w]
            if top <= 1:
                hit = top == 0 or _p_times_contained(L, M)
            else:
                hit = M.elementary_divisors(L) == t
            if hit:
                rows.append(v)
                cols.append(w)
    mat = sparse.csr_matrix(
        (np.ones(len(rows), dtype=np.int64), (rows, cols)), shape=(window.size, window.size)
    )
    return HeckeOperator(t, mat, complete)


def commute_on_interior(X: HeckeOperator, Y: HeckeOperator) -> tuple:
    """(holds, number of vertices checked) for XY = YX at vertices where both
    composites stay inside the window."""
    cx = np.array(X.complete)
    cy = np.array(Y.complete)
    bad_x = X.matrix @ (~cy).astype(np.int64)
    bad_y = Y.matrix @ (~cx).astype(np.int64)
    ok = cx & cy & (np.asarray(bad_x).ravel() == 0) & (np.asarray(bad_y).ravel() == 0)
    diff = (X.matrix @ Y.matrix - Y.matrix @ X.matrix).tocsr()
    rows = np.flatnonzero(ok)
    holds = all(diff[v].count_nonzero() == 0 for v in rows)
    return holds, len(rows)


def a_relation(model: ToyModel) -> dict:
    """e -> sorted list of edges f in A(e)."""
    out = {e: [] for e in range(model.ne)}
    for e, f in model.a_pairs:
        out[e].append(f)
    return {e: sorted(v) for e, v in out.items()}


# ---------------------------------------------------------------------------
# psi and the two kernel solvers


def _reduce(mat, coeff: Coeff):
    mat = sparse.csr_matrix(mat, dtype=np.int64)
    if coeff.ell is not None:
        mat = mat.copy()
        mat.data %= coeff.ell
        mat.eliminate_zeros()
    return mat


def psi_blocks(model: ToyModel) -> list:
    """[pl_*, pr_*, pr_* A, ..., pr_* A^{n-2}] as integer matrices."""
    pl, pr, A = model.pl_matrix(), model.pr_matrix(), model.a_matrix()
    blocks = [pl, pr]
    cur = pr
    for _ in range(model.n - 2):
        cur = (cur @ A).tocsr()
        blocks.append(cur)
    return blocks


def psi_matrix(model: ToyModel, coeff: Coeff = Coeff()):
    """psi : coeff^E -> (coeff^V)^n, stacked in block order."""
    check_coeff(coeff, model.n, model.p)
    return _reduce(sparse.vstack(psi_blocks(model)).tocsr(), coeff)


def _csr_rows(mat) -> list:
    mat = mat.tocsr()
    out = []
    for i in range(mat.shape[0]):
        a, b = mat.indptr[i], mat.indptr[i + 1]
        if a < b:
            out.append({int(c): int(v) for c, v in zip(mat.indices[a:b], mat.data[a:b]) if v})
    return out


def chow_kernel_matrix(model: ToyModel, coeff: Coeff = Coeff()) -> KernelSpace:
    """ker psi, computed directly from the rows of psi."""
    mat = psi_matrix(model, coeff)
    return KernelSpace(echelon(_csr_rows(mat), coeff, model.ne))


@dataclass
class DivisorSolution:
    """Solutions (u_1, ..., u_{n-1}) and their projection to u_1.

    Columns of ``full`` are laid out with u_{n-1} first and u_1 last, so the
    u_1 block starts at ``offset``.
    """

    full: KernelSpace
    projected: KernelSpace
    offset: int
    orientation: str


def divisor_constraints(model: ToyModel, orientation: str = "direct") -> list:
    """Rows (dicts over Q) of the divisor system, ordered for elimination.

    Unknowns u_i on edges, i = 1..n-1; u_i lives in columns
    (n-1-i) * E + e.  Constraints:
      u_i = p^{i+1-n} A(u_{i-1})      (i = 2..n-1; transpose if requested)
      pl_* u_1 = 0
      pr_* u_i = 0                     (i = 1..n-1)
    """
    n, p, E = model.n, model.p, model.ne
    if orientation not in ("direct", "transpose"):
        raise ValueError("orientation is 'direct' or 'transpose'")

    def col(i, e):
        return (n - 1 - i) * E + e

    rel = a_relation(model)
    if orientation == "transpose":
        tr: dict = {e: [] for e in range(E)}
        for e, fs in rel.items():
            for f in fs:
                tr[f].append(e)
        rel = tr
    rows = []
    for i in range(n - 1, 1, -1):
        c = Fraction(p) ** (i + 1 - n)
        for e in range(E):
            row = {col(i, e): Fraction(1)}
            for f in rel[e]:
                row[col(i - 1, f)] = row.get(col(i - 1, f), 0) - c
            rows.append(row)
    for i in range(n - 1, 0, -1):
        for v, es in _by_vertex(model, 1).items():
            rows.append({col(i, e): 1 for e in es})
    for v, es in _by_vertex(model, 0).items():
        rows.append({col(1, e): 1 for e in es})
    return rows


def _by_vertex(model: ToyModel, side: int) -> dict:
    out: dict = {}
    for i, e in enumerate(model.edges):
        out.setdefault(e[side], []).append(i)
    return dict(sorted(out.items()))


def chow_kernel_divisor(
    model: ToyModel, coeff: Coeff = Coeff(), orientation: str = "direct"
) -> DivisorSolution:
    """Solve the divisor system and project the solutions to u_1.

    The projection's annihilator is the part of the row space of the system
    supported on the u_1 block; with u_1 placed last it is read off the
    echelon form as the rows whose pivot falls in that block.
    """
    check_coeff(coeff, model.n, model.p)
    n, E = model.n, model.ne
    ncols = (n - 1) * E
    ech = echelon(divisor_constraints(model, orientation), coeff, ncols)
    offset = (n - 2) * E
    proj = SparseEchelon(coeff, E)
    for c, row in sorted(ech.rows.items()):
        if c >= offset:
            proj.add({k - offset: v for k, v in row.items()})
    return DivisorSolution(KernelSpace(ech), KernelSpace(proj), offset, orientation)


def solvers_agree(model: ToyModel, coeff: Coeff = Coeff(), orientation: str = "direct") -> bool:
    return chow_kernel_matrix(model, coeff) == chow_kernel_divisor(model, coeff, orientation).projected


# ---------------------------------------------------------------------------
# n = 2 Ihara matrices


@dataclass
class IharaMatrices:
    """alpha : (coeff^V)^2 -> (coeff^V)^4 + coeff^E and
    beta : (coeff^V)^4 + coeff^E -> (coeff^E)^2 as integer block matrices."""

    alpha: object
    beta: object
    nv: int
    ne: int
    beta_rows_ok: list  # rows of beta o alpha where every map stays in the window
    alpha_cols_interior: list  # columns of alpha supported on interior vertices


def certified_edges(model: ToyModel) -> list:
    """Edges e where A S_E composites are exact: p pl(e) exists, A(e) is
    complete and every f in A(e) has p f in the window."""
    rel = a_relation(model)
    escale = model.edge_scaling()
    sp = model.s_p or {}
    out = []
    for e, (a, _) in enumerate(model.edges):
        out.append(
            sp.get(a) is not None
            and len(rel[e]) == a_degree(model.n, model.p)
            and all(f in escale for f in rel[e])
        )
    return out


def ihara_n2_matrices(model: ToyModel) -> IharaMatrices:
    """alpha(s, t) = (-S_p s, -s, t, t, -pr^* s + pl^* t);
    beta = [[pl^*, 0, pr^*, 0, -A S_E], [0, pr^*, 0, pl^*, -1]].

    pl^* is the transpose of pl_*, i.e. (pl^* g)(e) = g(pl(e)).
    """
    if model.n != 2:
        raise ValueError("Ihara matrices are defined for n = 2 models only")
    V, E = model.nv, model.ne
    pl_up = model.pl_matrix().T.tocsr()
    pr_up = model.pr_matrix().T.tocsr()
    Sp = model.sp_matrix()
    ASE = (model.a_matrix() @ model.se_matrix()).tocsr()
    IV = sparse.identity(V, dtype=np.int64, format="csr")
    IE = sparse.identity(E, dtype=np.int64, format="csr")
    ZV = sparse.csr_matrix((V, V), dtype=np.int64)
    ZEV = sparse.csr_matrix((E, V), dtype=np.int64)
    alpha = sparse.bmat(
        [[-Sp, ZV], [-IV, ZV], [ZV, IV], [ZV, IV], [-pr_up, pl_up]], format="csr"
    )
    beta = sparse.bmat(
        [[pl_up, ZEV, pr_up, ZEV, -ASE], [ZEV, pr_up, ZEV, pl_up, -IE]], format="csr"
    )
    rows_ok = certified_edges(model) + [True] * E
    interior = model.vertex_interior or [True] * V
    cols = [interior[v] and v in model.s_p for v in range(V)]
    return IharaMatrices(alpha, beta, V, E, rows_ok, cols + cols)


def composite_vanishes(im: IharaMatrices) -> tuple:
    """(beta o alpha is zero on certified rows, number of rows checked)."""
    prod = (im.beta @ im.alpha).tocsr()
    rows = [i for i, ok in enumerate(im.beta_rows_ok) if ok]
    return all(prod[i].count_nonzero() == 0 for i in rows), len(rows)


def rank(mat, coeff: Coeff) -> int:
    return echelon(_csr_rows(_reduce(mat, coeff)), coeff, mat.shape[1]).rank


def alpha_injective_on_interior(im: IharaMatrices, coeff: Coeff = Coeff()) -> tuple:
    cols = [i for i, ok in enumerate(im.alpha_cols_interior) if ok]
    sub = im.alpha.tocsc()[:, cols]
    return rank(sub, coeff) == len(cols), len(cols)


def middle_homology(im: IharaMatrices, coeff: Coeff = Coeff()) -> dict:
    """dim ker beta - rank alpha on the whole model (rank-nullity report)."""
    rb = rank(im.beta, coeff)
    ra = rank(im.alpha, coeff)
    dim_c1 = im.beta.shape[1]
    return {"dim_c1": dim_c1, "rank_alpha": ra, "rank_beta": rb, "h1": dim_c1 - rb - ra}
