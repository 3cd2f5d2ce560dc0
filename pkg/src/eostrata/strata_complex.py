"""Intersection patterns of semistable models and the degree-0 row they induce.

A pattern lists components at level 0, pairwise intersections at level 1
and triple intersections at level 2.  Each entry carries an index-set tag:

* ``V``: one copy per vertex of a toy model,
* ``E``: one copy per edge,
* ``1``: a single connected piece.

Every level-k entry records, for each of its faces, a map from its own
index set to the face's index set.  H^0 restriction is pullback along that
map, so the Cech differential is assembled from pullback matrices.  Map names:

========  ===========  =========================================
name      shape        pullback
========  ===========  =========================================
id        X -> X       identity
pl, pr    E -> V       g -> g o pl, g -> g o pr
pt        X -> 1       constant extension
sp        V -> V       (S_p g)(v) = g(p v)
sp_a      E -> E       (A S_E f)(e) = sum_{f' in A(e)} f(p f')
========  ===========  =========================================
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy import sparse

from .exact_core import Coeff
from .hecke_chow import ToyModel, certified_edges, rank as _rank

MAP_SHAPES = {
    "id": None,
    "pl": ("E", "V"),
    "pr": ("E", "V"),
    "pt": (None, "1"),
    "sp": ("V", "V"),
    "sp_a": ("E", "E"),
}


@dataclass(frozen=True)
class Stratum:
    name: str
    level: int
    tag: str
    faces: dict = field(default_factory=dict)  # face name -> map name
    note: str = ""

    @property
    def members(self) -> tuple:
        """Level-0 component names contained in this entry."""
        return tuple(sorted(self.name.split("&")))


@dataclass
class IncidenceComplex:
    name: str
    strata: list
    order: list  # global order of level-0 components (Cech signs)
    unspecified: list = field(default_factory=list)

    def level(self, k: int) -> list:
        return [s for s in self.strata if s.level == k]

    def by_name(self) -> dict:
        return {s.name: s for s in self.strata}

    def validate(self) -> list:
        """Consistency problems; empty when the pattern is well formed."""
        problems = []
        names = self.by_name()
        comps = {s.name for s in self.level(0)}
        if set(self.order) != comps:
            problems.append("order does not list exactly the level-0 components")
        pairs = {frozenset(s.members) for s in self.level(1)}
        for s in self.strata:
            if s.tag not in ("V", "E", "1"):
                problems.append(f"{s.name}: unknown tag {s.tag}")
            if len(set(s.members)) != s.level + 1 or not set(s.members) <= comps:
                problems.append(f"{s.name}: expected {s.level + 1} distinct components")
            for face, m in s.faces.items():
                if face not in names:
                    problems.append(f"{s.name}: unknown face {face}")
                    continue
                f = names[face]
                if f.level != s.level - 1 or not set(f.members) <= set(s.members):
                    problems.append(f"{s.name}: {face} is not a face")
                shape = MAP_SHAPES.get(m, "missing")
                if shape == "missing":
                    problems.append(f"{s.name}: unknown map {m}")
                elif shape is None:
                    if s.tag != f.tag:
                        problems.append(f"{s.name}: id between {s.tag} and {f.tag}")
                elif (shape[0] is not None and shape[0] != s.tag) or shape[1] != f.tag:
                    problems.append(f"{s.name}: map {m} does not go {s.tag} -> {f.tag}")
            if s.level > 0 and len(s.faces) != s.level + 1:
                problems.append(f"{s.name}: needs {s.level + 1} faces, has {len(s.faces)}")
            if s.level == 2:
                for a, b in combinations(s.members, 2):
                    if frozenset((a, b)) not in pairs:
                        problems.append(f"{s.name}: parents {a},{b} do not intersect")
        return problems

    def tag_counts(self, model: ToyModel) -> dict:
        size = {"V": model.nv, "E": model.ne, "1": 1}
        return {k: sum(size[s.tag] for s in self.level(k)) for k in range(3)}

    def euler_characteristic(self, model: ToyModel) -> int:
        c = self.tag_counts(model)
        return c[0] - c[1] + c[2]

    def reordered(self, order: list) -> "IncidenceComplex":
        return IncidenceComplex(self.name, list(self.strata), list(order), list(self.unspecified))


def _pair(a: str, b: str) -> str:
    return "&".join(sorted((a, b)))


def _triple(a: str, b: str, c: str) -> str:
    return "&".join(sorted((a, b, c)))


def k1_pattern(n: int, hecke: bool = False) -> IncidenceComplex:
    """Blow-up of the paramodular-type model: four components Y00, Y01, Y10, Y11.

    ``hecke=True`` (n = 2 only) twists two maps by S_p and A S_E; this is the
    identification under which the row becomes the Ihara complex.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if hecke and n != 2:
        raise ValueError("the Hecke-twisted pattern needs |A(e)| = 1, i.e. n = 2")
    Y00, Y01, Y10, Y11 = "Y00", "Y01", "Y10", "Y11"
    p_00_01, p_00_10 = _pair(Y00, Y01), _pair(Y00, Y10)
    p_01_11, p_10_11 = _pair(Y01, Y11), _pair(Y10, Y11)
    p_00_11 = _pair(Y00, Y11)
    strata = [
        Stratum(Y00, 0, "V"),
        Stratum(Y01, 0, "1"),
        Stratum(Y10, 0, "1"),
        Stratum(Y11, 0, "V"),
        Stratum(p_00_01, 1, "V", {Y00: "sp" if hecke else "id", Y01: "pt"}),
        Stratum(p_00_10, 1, "V", {Y00: "id", Y10: "pt"}),
        Stratum(p_01_11, 1, "V", {Y01: "pt", Y11: "id"}),
        Stratum(p_10_11, 1, "V", {Y10: "pt", Y11: "id"}),
        Stratum(p_00_11, 1, "E", {Y00: "pr", Y11: "pl"}, note="P^1-bundle after blow-up"),
        Stratum(
            _triple(Y00, Y01, Y11),
            2,
            "E",
            {p_00_01: "pl" if hecke else "pr", p_01_11: "pr" if hecke else "pl",
             p_00_11: "sp_a" if hecke else "id"},
        ),
        Stratum(
            _triple(Y00, Y10, Y11), 2, "E", {p_00_10: "pr", p_10_11: "pl", p_00_11: "id"}
        ),
    ]
    return IncidenceComplex(f"k1(n={n}{', hecke' if hecke else ''})", strata, [Y00, Y01, Y10, Y11])


def iwahori_pattern() -> IncidenceComplex:
    """Nine components Z_ij (n = 3) after the three successive blow-ups.

    Pairwise intersections are the blow-up centres named in the component
    descriptions; the only triple whose members pairwise meet is
    Z00, Z11, Z22.
    """
    comps = {
        "Z00": ("V", "P^1-bundle over C2"),
        "Z11": ("V", "P^1-bundle over C1"),
        "Z22": ("V", "P^1-bundle over C1 and over C2"),
        "Z01": ("1", "blow-up of Y10 / Y01"),
        "Z10": ("1", "blow-up of Y01 / Y10"),
        "Z02": ("V", "Frobenius twist of Y11"),
        "Z12": ("V", "isomorphic to Y11"),
        "Z20": ("V", "isomorphic to Y11"),
        "Z21": ("V", "blow-up of Y11"),
    }
    strata = [Stratum(k, 0, t, note=d) for k, (t, d) in comps.items()]
    # edge-indexed centres between the three P^1-bundle components: Z00 sees pl,
    # Z11 and Z22 see pr, so every triple composite agrees
    side = {"Z00": "pl", "Z11": "pr", "Z22": "pr"}
    big = [("Z00", "Z11"), ("Z00", "Z22"), ("Z11", "Z22")]
    for a, b in big:
        strata.append(Stratum(_pair(a, b), 1, "E", {a: side[a], b: side[b]}))
    small = [("Z00", "Z12"), ("Z00", "Z21"), ("Z11", "Z02"), ("Z11", "Z20"),
             ("Z22", "Z10"), ("Z22", "Z01")]
    for a, b in small:
        strata.append(
            Stratum(_pair(a, b), 1, "V", {a: "id", b: "pt" if comps[b][0] == "1" else "id"})
        )
    strata.append(
        Stratum(
            _triple("Z00", "Z11", "Z22"),
            2,
            "E",
            {_pair(a, b): "id" for a, b in big},
            note="index set taken from Z00 & Z11",
        )
    )
    unspecified = [
        "index set of Z00 & Z11 & Z22 (not listed; taken from Z00 & Z11)",
        "index sets of the six V-tagged pairwise centres (taken from the P^1-bundle side)",
    ]
    order = ["Z00", "Z01", "Z02", "Z10", "Z11", "Z12", "Z20", "Z21", "Z22"]
    return IncidenceComplex("iwahori(n=3)", strata, order, unspecified)


# ---------------------------------------------------------------------------
# the row complex


@dataclass
class RowComplex:
    coeff: Coeff
    summands: list  # per degree: list of (stratum name, dimension)
    d0: object  # scipy CSR integer matrices
    d1: object
    certified: list | None = None  # rows of C^2 where d1 d0 must vanish; None = all

    @property
    def dims(self) -> tuple:
        return tuple(sum(d for _, d in s) for s in self.summands)

    def d_squared_zero(self) -> bool:
        prod = (self.d1 @ self.d0).tocsr()
        if self.coeff.ell is not None:
            prod.data %= self.coeff.ell
            prod.eliminate_zeros()
        if self.certified is not None:
            prod = prod[[i for i, ok in enumerate(self.certified) if ok]]
        return prod.count_nonzero() == 0


def _pullback(name: str, src: str, dst: str, model: ToyModel):
    """Matrix of g -> g o (map) from coeff^dst to coeff^src."""
    size = {"V": model.nv, "E": model.ne, "1": 1}
    if name == "id":
        return sparse.identity(size[src], dtype=np.int64, format="csr")
    if name == "pl":
        return model.pl_matrix().T.tocsr()
    if name == "pr":
        return model.pr_matrix().T.tocsr()
    if name == "pt":
        return sparse.csr_matrix(np.ones((size[src], 1), dtype=np.int64))
    if name == "sp":
        return model.sp_matrix()
    if name == "sp_a":
        return (model.a_matrix() @ model.se_matrix()).tocsr()
    raise ValueError(f"unknown map {name}")


def e1_bottom_row(
    cx: IncidenceComplex, model: ToyModel, coeff: Coeff = Coeff(), drop_connected: bool = False
) -> RowComplex:
    """C^0 -> C^1 -> C^2 with Cech signs from ``cx.order``.

    For an entry with members c_0 < ... < c_k, the coefficient of the face
    omitting c_j is (-1)^j.  ``drop_connected`` removes the ``1``-tagged
    level-0 summands.
    """
    problems = cx.validate()
    if problems:
        raise ValueError("invalid pattern: " + "; ".join(problems))
    rank_of = {c: i for i, c in enumerate(cx.order)}
    size = {"V": model.nv, "E": model.ne, "1": 1}
    levels = [cx.level(k) for k in range(3)]
    if drop_connected:
        levels[0] = [s for s in levels[0] if s.tag != "1"]
    summands = [[(s.name, size[s.tag]) for s in lv] for lv in levels]

    def diff(k):
        src, dst = levels[k], levels[k + 1]
        blocks = [[None] * len(src) for _ in dst]
        col = {s.name: j for j, s in enumerate(src)}
        for i, s in enumerate(dst):
            members = sorted(s.members, key=rank_of.__getitem__)
            for face, m in s.faces.items():
                j = col.get(face)
                if j is None:
                    continue
                omitted = [c for c in members if c not in cx.by_name()[face].members]
                sign = -1 if members.index(omitted[0]) % 2 else 1
                blocks[i][j] = sign * _pullback(m, s.tag, src[j].tag, model)
        for i, s in enumerate(dst):
            for j, t in enumerate(src):
                if blocks[i][j] is None:
                    blocks[i][j] = sparse.csr_matrix((size[s.tag], size[t.tag]), dtype=np.int64)
        if not dst or not src:
            return sparse.csr_matrix(
                (sum(size[s.tag] for s in dst), sum(size[s.tag] for s in src)), dtype=np.int64
            )
        return sparse.bmat(blocks, format="csr")

    # scaled maps only compose exactly away from the window boundary
    certified = None
    if any(m in ("sp", "sp_a") for s in cx.strata for m in s.faces.values()):
        good = certified_edges(model) if model.s_p is not None else [True] * model.ne
        certified = []
        for s in levels[2]:
            scaled = any(m in ("sp", "sp_a") for m in s.faces.values())
            certified += good if scaled and s.tag == "E" else [True] * size[s.tag]
    return RowComplex(coeff, summands, diff(0), diff(1), certified)


def row_cohomology(rc: RowComplex) -> tuple:
    """(h^0, h^1, h^2) by rank-nullity."""
    c0, c1, c2 = rc.dims
    r0 = _rank(rc.d0, rc.coeff) if rc.d0.nnz else 0
    r1 = _rank(rc.d1, rc.coeff) if rc.d1.nnz else 0
    return (c0 - r0, c1 - r1 - r0, c2 - r1)
