"""Exact homology of bigraded integer complexes via Smith normal form."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd


def smith_normal_form(matrix):
    """Elementary divisors and rank of an integer matrix.

    `matrix` is a list of rows, a dict {(r, c): v}, or a SparseMat.  Returns
    (divisors, rank) with d1 | d2 | ... | d_rank, all positive.  The input is
    not modified; arithmetic is exact.
    """
    entries = _as_dict(matrix)
    rows: dict[int, dict[int, int]] = {}
    cols: dict[int, set[int]] = {}
    for (r, c), v in entries.items():
        if v:
            rows.setdefault(r, {})[c] = v
            cols.setdefault(c, set()).add(r)
    divisors = []

    def drop(r, c):
        rows[r].pop(c, None)
        if not rows[r]:
            del rows[r]
        s = cols.get(c)
        if s is not None:
            s.discard(r)
            if not s:
                del cols[c]

    def put(r, c, v):
        if v:
            rows.setdefault(r, {})[c] = v
            cols.setdefault(c, set()).add(r)
        else:
            drop(r, c)

    def add_row(src, dst, mult):
        # row[dst] += mult * row[src]
        for c, v in list(rows.get(src, {}).items()):
            put(dst, c, rows.get(dst, {}).get(c, 0) + mult * v)

    def add_col(src, dst, mult):
        for r in list(cols.get(src, set())):
            v = rows[r].get(src, 0)
            put(r, dst, rows[r].get(dst, 0) + mult * v)

    while rows:
        # pivot: smallest nonzero absolute value (classic blowup mitigation)
        pr, pc, pv = None, None, None
        for r, row in rows.items():
            for c, v in row.items():
                if pv is None or abs(v) < abs(pv):
                    pr, pc, pv = r, c, v
                    if abs(v) == 1:
                        break
            if pv is not None and abs(pv) == 1:
                break
        improved = True
        while improved:
            improved = False
            for r in list(cols.get(pc, set())):
                if r == pr:
                    continue
                v = rows[r].get(pc, 0)
                q, rem = divmod(v, pv)
                if q:
                    add_row(pr, r, -q)
                if rows.get(r, {}).get(pc, 0):
                    # remainder smaller than pivot: swap roles
                    pr, pv = r, rows[r][pc]
                    improved = True
                    break
            else:
                for c in list(rows.get(pr, {})):
                    if c == pc:
                        continue
                    v = rows[pr][c]
                    q, rem = divmod(v, pv)
                    if q:
                        add_col(pc, c, -q)
                    if rows.get(pr, {}).get(c, 0):
                        pc, pv = c, rows[pr][c]
                        improved = True
                        break
        # pivot row/column are clear except the pivot itself
        drop(pr, pc)
        divisors.append(abs(pv))
    # enforce the divisibility chain
    divisors.sort()
    changed = True
    while changed:
        changed = False
        for i in range(len(divisors)):
            for j in range(i + 1, len(divisors)):
                a, b = divisors[i], divisors[j]
                if b % a:
                    g = gcd(a, b)
                    divisors[i], divisors[j] = g, a * b // g
                    changed = True
        divisors.sort()
    return tuple(divisors), len(divisors)


def _as_dict(matrix):
    if isinstance(matrix, dict):
        return matrix
    if isinstance(matrix, SparseMat):
        return matrix.entries
    out = {}
    for r, row in enumerate(matrix):
        for c, v in enumerate(row):
            if v:
                out[(r, c)] = v
    return out


def rank_mod_p(matrix, p: int) -> int:
    """Rank of an integer matrix over F_p (p prime)."""
    entries = _as_dict(matrix)
    rows: dict[int, dict[int, int]] = {}
    for (r, c), v in entries.items():
        w = v % p
        if w:
            rows.setdefault(r, {})[c] = w
    rank = 0
    while rows:
        r0 = next(iter(rows))
        row0 = rows.pop(r0)
        c0, v0 = next(iter(row0.items()))
        inv = pow(v0, p - 2, p)
        rank += 1
        for r, row in list(rows.items()):
            v = row.get(c0)
            if v:
                m = (v * inv) % p
                for c, w in row0.items():
                    row[c] = (row.get(c, 0) - m * w) % p
                    if not row[c]:
                        del row[c]
                if not row:
                    del rows[r]
    return rank


@dataclass(frozen=True)
class Group:
    """A finitely generated abelian group: free rank plus elementary divisors."""
    rank: int
    torsion: tuple[int, ...] = ()

    def __bool__(self):
        return bool(self.rank or self.torsion)

    def __str__(self):
        parts = ["Z"] * self.rank + [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) if parts else "0"


@dataclass
class HomologyTable:
    """Map (homological degree i, quantum degree j) -> Group."""
    groups: dict[tuple[int, int], Group] = field(default_factory=dict)
    coefficients: str = "Z"

    def __getitem__(self, key):
        return self.groups.get(key, Group(0))

    def items(self):
        return sorted(self.groups.items())

    def q_range(self):
        js = [j for (_i, j) in self.groups]
        return (min(js), max(js)) if js else (0, 0)

    def total_rank(self):
        return sum(g.rank for g in self.groups.values())

    def has_torsion(self):
        return any(g.torsion for g in self.groups.values())

    def torsion_orders(self):
        out = set()
        for g in self.groups.values():
            out.update(g.torsion)
        return out

    def __eq__(self, other):
        if not isinstance(other, HomologyTable):
            return NotImplemented
        a = {k: v for k, v in self.groups.items() if v}
        b = {k: v for k, v in other.groups.items() if v}
        return a == b

    def poincare_lines(self):
        return [f"i={i:3d} j={j:4d}  {g}" for (i, j), g in self.items() if g]


class SparseMat:
    """Minimal sparse integer matrix used by the complexes."""

    __slots__ = ("nrows", "ncols", "entries")

    def __init__(self, nrows, ncols, entries=None):
        self.nrows = nrows
        self.ncols = ncols
        self.entries = dict(entries or {})

    def __setitem__(self, rc, v):
        if v:
            self.entries[rc] = v
        else:
            self.entries.pop(rc, None)

    def __getitem__(self, rc):
        return self.entries.get(rc, 0)

    def compose(self, other: "SparseMat") -> "SparseMat":
        """self o other (apply other first)."""
        bycol: dict[int, list] = {}
        for (r, c), v in self.entries.items():
            bycol.setdefault(c, []).append((r, v))
        out = SparseMat(self.nrows, other.ncols)
        for (m, c), v in other.entries.items():
            for r, w in bycol.get(m, ()):
                rc = (r, c)
                nv = out.entries.get(rc, 0) + w * v
                if nv:
                    out.entries[rc] = nv
                else:
                    out.entries.pop(rc, None)
        return out

    def is_zero(self):
        return not self.entries


def homology_of_pair(d_in: SparseMat | None, d_out: SparseMat | None, dim: int,
                     coeff: str = "Z") -> Group:
    """Homology at the middle of  prev --d_in--> here --d_out--> next."""
    if coeff == "Z" or coeff == "Q":
        rank_out = smith_normal_form(d_out)[1] if d_out is not None else 0
        if d_in is not None:
            divs, rank_in = smith_normal_form(d_in)
        else:
            divs, rank_in = (), 0
        rank = dim - rank_out - rank_in
        torsion = tuple(d for d in divs if d > 1) if coeff == "Z" else ()
        return Group(rank, torsion)
    if coeff.startswith("F"):
        p = int(coeff[1:])
        rank_out = rank_mod_p(d_out, p) if d_out is not None else 0
        rank_in = rank_mod_p(d_in, p) if d_in is not None else 0
        return Group(dim - rank_out - rank_in)
    raise ValueError(f"unknown coefficients {coeff!r}")


def homology_table(complex_, coeff: str = "Z") -> HomologyTable:
    """Bigraded homology of a BigradedMatrixComplex-like object.

    The object must provide `qs(i)` (list of q-degrees of the degree-i basis)
    and `matrix(i)` (SparseMat C^i -> C^{i+1}), plus `degree_range()`.
    """
    coeff = coeff.upper()
    lo, hi = complex_.degree_range()
    table = HomologyTable(coefficients=coeff)
    blocks: dict[tuple[int, int], dict] = {}
    for i in range(lo, hi + 1):
        qs = complex_.qs(i)
        for q in set(qs):
            cols = [k for k, qq in enumerate(qs) if qq == q]
            blocks[(i, q)] = {"dim": len(cols),
                              "index": {k: n for n, k in enumerate(cols)}}
    mats: dict[tuple[int, int], SparseMat] = {}
    for i in range(lo, hi):
        m = complex_.matrix(i)
        if m is None:
            continue
        qs_src = complex_.qs(i)
        qs_dst = complex_.qs(i + 1)
        for (r, c), v in m.entries.items():
            q = qs_src[c]
            if qs_dst[r] != q:
                raise AssertionError(
                    f"differential entry changes q: {qs_src[c]} -> {qs_dst[r]}")
            blk = mats.get((i, q))
            if blk is None:
                blk = mats[(i, q)] = SparseMat(
                    blocks.get((i + 1, q), {"dim": 0})["dim"],
                    blocks[(i, q)]["dim"])
            blk[(blocks[(i + 1, q)]["index"][r], blocks[(i, q)]["index"][c])] = v
    for (i, q), blk in blocks.items():
        d_out = mats.get((i, q))
        d_in = mats.get((i - 1, q))
        g = homology_of_pair(d_in, d_out, blk["dim"], coeff)
        if g:
            table.groups[(i, q)] = g
    return table
