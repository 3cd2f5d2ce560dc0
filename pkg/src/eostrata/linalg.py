"""Exact sparse row echelon forms over Q and GF(l).

Rows are dicts {column: value}.  Over Q rows are kept as primitive integer
vectors (fraction-free elimination followed by content division), which
keeps entry growth in check on incidence-type matrices.  Over GF(l) pivots
are normalised to 1.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping

from .exact_core import Coeff


def _primitive(row: dict) -> dict:
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            break
    first = row[min(row)]
    if first < 0:
        g = -g
    if g not in (1,):
        row = {c: v // g for c, v in row.items()}
    return row


def _integral(row: Mapping) -> dict:
    """Scale a row with rational entries to a primitive integer row."""
    den = 1
    for v in row.values():
        if isinstance(v, Fraction):
            den = den * v.denominator // gcd(den, v.denominator)
    out = {}
    for c, v in row.items():
        v = Fraction(v) * den
        if v:
            out[c] = int(v)
    return _primitive(out) if out else out


class SparseEchelon:
    """Incrementally built row echelon form (pivot = smallest column)."""

    def __init__(self, coeff: Coeff, ncols: int):
        self.coeff = coeff
        self.ncols = ncols
        self.rows: dict = {}  # pivot column -> row

    @property
    def rank(self) -> int:
        return len(self.rows)

    @property
    def pivots(self) -> list:
        return sorted(self.rows)

    def _prepare(self, row: Mapping) -> dict:
        ell = self.coeff.ell
        if ell is None:
            return _integral(row)
        out = {}
        for c, v in row.items():
            v = self.coeff.convert(v)
            if v:
                out[c] = v
        return out

    def reduce(self, row: Mapping) -> dict:
        """Remainder of ``row`` modulo the stored rows (leading part only)."""
        r = self._prepare(row)
        ell = self.coeff.ell
        rows = self.rows
        while r:
            c = min(r)
            piv = rows.get(c)
            if piv is None:
                # the leading entry is free; later entries may still hit pivots,
                # but the leading column already certifies independence
                return r
            if ell is None:
                a, b = piv[c], r[c]
                g = gcd(a, b)
                ma, mb = a // g, b // g
                out = {k: v * ma for k, v in r.items()} if ma != 1 else dict(r)
                for k, v in piv.items():
                    nv = out.get(k, 0) - mb * v
                    if nv:
                        out[k] = nv
                    else:
                        out.pop(k, None)
                r = _primitive(out) if out else out
            else:
                f = r[c]
                out = dict(r)
                for k, v in piv.items():
                    nv = (out.get(k, 0) - f * v) % ell
                    if nv:
                        out[k] = nv
                    else:
                        out.pop(k, None)
                r = out
        return r

    def add(self, row: Mapping) -> bool:
        """Insert a row; returns True when it was independent."""
        r = self.reduce(row)
        if not r:
            return False
        c = min(r)
        if self.coeff.ell is not None:
            iv = pow(r[c], -1, self.coeff.ell)
            r = {k: (v * iv) % self.coeff.ell for k, v in r.items()}
        self.rows[c] = r
        return True

    def extend(self, rows: Iterable[Mapping]) -> "SparseEchelon":
        for row in rows:
            self.add(row)
        return self

    def contains(self, row: Mapping) -> bool:
        return not self.reduce(row)

    def copy(self) -> "SparseEchelon":
        out = SparseEchelon(self.coeff, self.ncols)
        out.rows = dict(self.rows)
        return out

    def rref(self) -> list:
        """Fully reduced rows with unit pivots, sorted by pivot (canonical)."""
        conv = self.coeff.convert
        ell = self.coeff.ell
        done: dict = {}
        for c in sorted(self.rows, reverse=True):
            r = {k: conv(v) for k, v in self.rows[c].items()}
            lead = r[c]
            if ell is None:
                r = {k: v / lead for k, v in r.items()}
            for k in sorted(k for k in r if k != c and k in done):
                f = r.get(k)
                if not f:
                    continue
                for kk, vv in done[k].items():
                    nv = r.get(kk, 0) - f * vv
                    if ell is not None:
                        nv %= ell
                    if nv:
                        r[kk] = nv
                    else:
                        r.pop(kk, None)
            done[c] = r
        return [done[c] for c in sorted(done)]


def echelon(rows: Iterable[Mapping], coeff: Coeff, ncols: int) -> SparseEchelon:
    return SparseEchelon(coeff, ncols).extend(rows)


def same_row_space(a: SparseEchelon, b: SparseEchelon) -> bool:
    if a.rank != b.rank:
        return False
    return all(a.contains(r) for r in b.rows.values())


class KernelSpace:
    """ker M, stored through the echelon form of the rows of M."""

    def __init__(self, annihilator: SparseEchelon):
        self.ann = annihilator

    @property
    def ambient(self) -> int:
        return self.ann.ncols

    @property
    def dim(self) -> int:
        return self.ann.ncols - self.ann.rank

    @property
    def coeff(self) -> Coeff:
        return self.ann.coeff

    def contains(self, v: Mapping) -> bool:
        conv = self.coeff.convert
        for r in self.ann.rows.values():
            s = sum(conv(x) * conv(v.get(k, 0)) for k, x in r.items())
            if self.coeff.ell is not None:
                s %= self.coeff.ell
            if s:
                return False
        return True

    def __eq__(self, other):
        if not isinstance(other, KernelSpace):
            return NotImplemented
        return (
            self.ambient == other.ambient
            and self.coeff == other.coeff
            and same_row_space(self.ann, other.ann)
        )

    def basis(self) -> list:
        """Canonical basis: one vector per free column of the RREF, as dicts."""
        ref = self.ann.rref()
        pivots = [min(r) for r in ref]
        pset = set(pivots)
        ell = self.coeff.ell
        one = self.coeff.convert(1)
        cols_of = {}
        for r, pc in zip(ref, pivots):
            for k, v in r.items():
                if k != pc:
                    cols_of.setdefault(k, []).append((pc, v))
        out = []
        for f in range(self.ambient):
            if f in pset:
                continue
            vec = {f: one}
            for pc, v in cols_of.get(f, ()):
                vec[pc] = (-v) % ell if ell is not None else -v
            out.append(vec)
        return out
