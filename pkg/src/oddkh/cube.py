"""Brute-force odd Khovanov complex over Z on the full hypercube.

Serves as the correctness oracle for the scanning engine.  The sign
assignment is the closed formula eps(e) = sum_{j>i, c_j=1} phi(f_ij) with the
face's trailing coordinates zeroed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .diagram import LinkDiagram
from .homology import SparseMat, homology_table, HomologyTable
from .resolution import Scene, Smoothing, Arc, classify_face, _untouched_map, _inversions

ORACLE_BOUND = 14


class OracleBound(RuntimeError):
    pass


def sign_assignment(scene: Scene):
    """Return eps(state, pos) in {0,1} for the edge flipping `pos` (bit 0->1)."""
    face_cache: dict[tuple[int, int, int], int] = {}

    def face_phi(p: int, q: int, t: int) -> int:
        key = (p, q, t)
        v = face_cache.get(key)
        if v is None:
            sm = scene.smoothing(t)
            v = classify_face(sm, scene.default_arc(p, 0), scene.default_arc(q, 0))[1]
            face_cache[key] = v
        return v

    def eps(state: int, pos: int) -> int:
        if (state >> pos) & 1:
            raise ValueError("edge base state must have a 0 at the flip position")
        total = 0
        q = pos + 1
        rest = state >> q
        while rest:
            if rest & 1:
                total ^= face_phi(pos, q, state & ((1 << q) - 1))
            rest >>= 1
            q += 1
        return total

    return eps


def edge_map_full(sm_src: Smoothing, sm_dst: Smoothing, arc: Arc, kind: str, labels):
    """Odd edge map on full exterior algebras: {src mask: {dst mask: coeff}}.

    Letters are circle indices of the respective smoothings, masks encode
    wedge words sorted by index.
    """
    ns = sm_src.s
    site = arc.site
    if kind == "merge":
        u = sm_src.circle_of_strand(site, 0)
        v = sm_src.circle_of_strand(site, 1)
        img = [labels["merged"] if c in (u, v) else _untouched_map(sm_src, sm_dst, c)
               for c in range(ns)]
    else:
        cs = sm_src.circle_of_strand(site, 0)
        img = [labels["s0"] if c == cs else _untouched_map(sm_src, sm_dst, c)
               for c in range(ns)]
    out = {}
    for mask in range(1 << ns):
        raw = [img[i] for i in range(ns) if mask >> i & 1]
        if len(set(raw)) < len(raw):
            continue
        sign = -1 if _inversions(raw) & 1 else 1
        word = 0
        for c in raw:
            word |= 1 << c
        if kind == "merge":
            out[mask] = {word: sign}
        else:
            res = {}
            for letter, lsign in ((labels["s1"], 1), (labels["s0"], -1)):
                if word >> letter & 1:
                    continue
                hops = bin(word & ((1 << letter) - 1)).count("1")
                res[word | (1 << letter)] = lsign * sign * (-1 if hops & 1 else 1)
            if res:
                out[mask] = res
    return out


@dataclass
class CubeComplex:
    """The full complex, bases indexed (state, word-mask) per weight."""
    scene: Scene
    basis: dict[int, list[tuple[int, int]]]
    qdeg: dict[int, list[int]]
    d: dict[int, SparseMat]
    n_minus: int
    reduced: bool = False

    def degree_range(self):
        ws = sorted(self.basis)
        return (ws[0] - self.n_minus, ws[-1] - self.n_minus)

    def qs(self, i):
        return self.qdeg.get(i + self.n_minus, [])

    def matrix(self, i):
        return self.d.get(i + self.n_minus)

    def homology(self, coeff="Z") -> HomologyTable:
        return homology_table(self, coeff)

    def check_d_squared(self):
        ws = sorted(self.d)
        for w in ws:
            if w + 1 in self.d:
                if not self.d[w + 1].compose(self.d[w]).is_zero():
                    return False
        return True


def basepoint_circle(sm: Smoothing, bp) -> int:
    """Circle index of the basepoint; bp = (site, slot) half-edge or free loop id."""
    if isinstance(bp, tuple):
        return sm.halfedge_circle[bp]
    return sm.circle_by_id(bp)


def default_basepoint(scene: Scene):
    if scene.n:
        return (scene.n - 1, 0)
    return 2 * scene.n  # first free loop


def build_full_complex(diagram, reduced: bool = False, basepoint=None,
                       bound: int = ORACLE_BOUND) -> CubeComplex:
    """The odd Khovanov complex of the full resolution hypercube over Z."""
    scene = diagram if isinstance(diagram, Scene) else Scene(diagram)
    n = scene.n
    if n > bound:
        raise OracleBound(f"{n} crossings exceeds the oracle bound {bound}")
    if reduced and basepoint is None:
        basepoint = default_basepoint(scene)
    eps = sign_assignment(scene)
    shift = scene.n_plus - 2 * scene.n_minus + (1 if reduced else 0)
    basis: dict[int, list[tuple[int, int]]] = {}
    qdeg: dict[int, list[int]] = {}
    index: dict[int, dict[tuple[int, int], int]] = {}
    for state in range(1 << n):
        w = bin(state).count("1")
        sm = scene.smoothing(state)
        bl = basis.setdefault(w, [])
        ql = qdeg.setdefault(w, [])
        ix = index.setdefault(w, {})
        bp_ci = basepoint_circle(sm, basepoint) if reduced else -1
        for word in range(1 << sm.s):
            if reduced and not (word >> bp_ci) & 1:
                continue
            ix[(state, word)] = len(bl)
            bl.append((state, word))
            ql.append(sm.s - 2 * bin(word).count("1") + w + shift)
    d: dict[int, SparseMat] = {}
    from .resolution import apply_surgery
    for state in range(1 << n):
        w = bin(state).count("1")
        sm = scene.smoothing(state)
        for pos in range(n):
            if (state >> pos) & 1:
                continue
            sgn = -1 if eps(state, pos) else 1
            arc = scene.default_arc(pos, 0)
            dst, kind, labels = apply_surgery(sm, arc)
            emap = edge_map_full(sm, dst, arc, kind, labels)
            mat = d.get(w)
            if mat is None:
                mat = d[w] = SparseMat(len(basis.get(w + 1, [])), len(basis[w]))
            tstate = state | (1 << pos)
            for src_word, row in emap.items():
                c = index[w].get((state, src_word))
                if c is None:
                    continue
                for dst_word, coeff in row.items():
                    r = index[w + 1].get((tstate, dst_word))
                    if r is None:
                        continue
                    mat[(r, c)] = mat[(r, c)] + sgn * coeff
    return CubeComplex(scene=scene, basis=basis, qdeg=qdeg, d=d,
                       n_minus=scene.n_minus, reduced=reduced)


def reduced_subcomplex(cube: CubeComplex, basepoint=None) -> CubeComplex:
    """Restrict a full complex to words containing the basepoint circle, {+1}."""
    if cube.reduced:
        raise ValueError("complex is already reduced")
    scene = cube.scene
    if basepoint is None:
        basepoint = default_basepoint(scene)
    basis: dict[int, list[tuple[int, int]]] = {}
    qdeg: dict[int, list[int]] = {}
    keep: dict[int, dict[int, int]] = {}
    for w, bl in cube.basis.items():
        nb, nq, kp = [], [], {}
        for k, (state, word) in enumerate(bl):
            sm = scene.smoothing(state)
            ci = basepoint_circle(sm, basepoint)
            if (word >> ci) & 1:
                kp[k] = len(nb)
                nb.append((state, word))
                nq.append(cube.qdeg[w][k] + 1)
        basis[w], qdeg[w], keep[w] = nb, nq, kp
    d: dict[int, SparseMat] = {}
    for w, mat in cube.d.items():
        nm = SparseMat(len(basis.get(w + 1, [])), len(basis.get(w, [])))
        for (r, c), v in mat.entries.items():
            if c in keep[w] and r in keep.get(w + 1, {}):
                nm[(keep[w + 1][r], keep[w][c])] = v
        d[w] = nm
    return CubeComplex(scene=scene, basis=basis, qdeg=qdeg, d=d,
                       n_minus=cube.n_minus, reduced=True)


def jones_statesum(diagram) -> dict[int, int]:
    """Unnormalized Jones polynomial (graded Euler characteristic) by state sum."""
    scene = diagram if isinstance(diagram, Scene) else Scene(diagram)
    out: dict[int, int] = {}
    shift = scene.n_plus - 2 * scene.n_minus
    for state in range(1 << scene.n):
        w = bin(state).count("1")
        s = scene.smoothing(state).s
        sgn = -1 if (w + scene.n_minus) & 1 else 1
        # (q + q^-1)^s expanded
        from math import comb
        for r in range(s + 1):
            p = s - 2 * r + w + shift
            out[p] = out.get(p, 0) + sgn * comb(s, r)
    return {k: v for k, v in out.items() if v}


def euler_characteristic(table: HomologyTable) -> dict[int, int]:
    out: dict[int, int] = {}
    for (i, j), g in table.groups.items():
        if g.rank:
            out[j] = out.get(j, 0) + (-g.rank if i & 1 else g.rank)
    return {k: v for k, v in out.items() if v}
