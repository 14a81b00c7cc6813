"""The scanning algorithm: cone over each crossing, deloop, eliminate."""

from __future__ import annotations

from .diagram import LinkDiagram
from .resolution import Scene
from .homology import SparseMat, homology_table, HomologyTable
from .cobordism import (Ctx, CatObject, normalize, present_ids,
                        evaluate_events, NormalizeError)
from .complex_engine import (CatComplex, initial_complex, mapping_cone_step,
                             deloop_complex, simplify)


class ScanComplex:
    """Bigraded integer complex produced by a scan (homology-table ready)."""

    def __init__(self, basis, qdeg, mats, offset):
        self.basis = basis          # degree -> list of labels
        self.qdeg = qdeg            # degree -> list of final q
        self.mats = mats            # degree -> SparseMat to degree+1
        self.offset = offset        # homological degree = internal - offset

    def degree_range(self):
        ds = sorted(self.basis)
        return (ds[0] - self.offset, ds[-1] - self.offset)

    def qs(self, i):
        return self.qdeg.get(i + self.offset, [])

    def matrix(self, i):
        return self.mats.get(i + self.offset)

    def homology(self, coeff="Z") -> HomologyTable:
        return homology_table(self, coeff)

    def total_dim(self):
        return sum(len(b) for b in self.basis.values())

    def check_d_squared(self):
        for w in sorted(self.mats):
            if w + 1 in self.mats:
                if not self.mats[w + 1].compose(self.mats[w]).is_zero():
                    return False
        return True


def scan_catcomplex(diagram: LinkDiagram, reduced: bool = False,
                    deloop: bool = True, eliminate: bool = True,
                    debug: bool = False, mirror=None) -> CatComplex:
    """Run the scan and return the final categorical complex."""
    scene = Scene(diagram)
    n = scene.n
    if n == 0:
        ctx = Ctx(scene, 0)
        cx = CatComplex(ctx)
        cx.add_object(CatObject(0, frozenset(), 0), 0)
        if mirror is not None:
            mirror.init(cx)
        return cx
    ctx = Ctx(scene, 1)
    cx = initial_complex(ctx)
    if mirror is not None:
        mirror.init(cx)
    basepoint = (n - 1, 0) if reduced else None
    for step in range(n):
        if step > 0:
            cx = mapping_cone_step(cx, step, naturality_debug=debug,
                                   mirror=mirror)
        last = (step == n - 1)
        if deloop:
            deloop_complex(cx, basepoint=basepoint if last else None,
                           keep_minus_only=reduced and last, mirror=mirror)
        if eliminate:
            simplify(cx, mirror=mirror)
        if debug:
            cx.check_d_squared(strict=True)
    return cx


def catcomplex_to_matrix(cx: CatComplex, reduced: bool = False) -> ScanComplex:
    """Apply the exterior functor to a categorical complex.

    Objects may still contain circles (debug modes); their words enter the
    basis.  Reduced complexes get the extra {+1}.
    """
    from .cobordism import evaluate_morphism
    scene = cx.ctx.scene
    ctx = cx.ctx
    shift = scene.n_plus - 2 * scene.n_minus + (1 if reduced else 0)
    offset = scene.n_minus
    basis: dict[int, list] = {}
    qdeg: dict[int, list] = {}
    index: dict[tuple, int] = {}
    import itertools
    letters_of: dict[int, list] = {}
    for deg in sorted(cx.by_degree):
        for uid in cx.by_degree[deg]:
            obj = cx.objects[uid]
            letters = sorted(present_ids(ctx, obj))
            letters_of[uid] = letters
            bl = basis.setdefault(deg, [])
            ql = qdeg.setdefault(deg, [])
            s = len(letters)
            for r in range(s + 1):
                for comb in itertools.combinations(letters, r):
                    index[(uid, comb)] = len(bl)
                    bl.append((uid, comb))
                    ql.append(obj.q + s - 2 * r + shift)
    mats: dict[int, SparseMat] = {}
    for a, b, vec in cx.entries():
        dega = cx.degree[a]
        obj_a = cx.objects[a]
        mat = mats.get(dega)
        if mat is None:
            mat = mats[dega] = SparseMat(len(basis.get(dega + 1, [])),
                                         len(basis[dega]))
        for ev, c in vec.items():
            for comb in _all_words(letters_of[a]):
                col = index[(a, comb)]
                _l, out = evaluate_events(ctx, obj_a.state, ev,
                                          letters_of[a], start={comb: c})
                for w, cc in out.items():
                    row = index.get((b, w))
                    if row is None:
                        raise NormalizeError(
                            f"image word {w} missing in target object")
                    mat[(row, col)] = mat[(row, col)] + cc
    return ScanComplex(basis, qdeg, mats, offset)


def _all_words(letters):
    import itertools
    for r in range(len(letters) + 1):
        yield from itertools.combinations(letters, r)


def scan_diagram(diagram: LinkDiagram, reduced: bool = False,
                 deloop: bool = True, eliminate: bool = True,
                 debug: bool = False) -> ScanComplex:
    """Integer bigraded complex of the diagram via the scanning algorithm."""
    cx = scan_catcomplex(diagram, reduced=reduced, deloop=deloop,
                         eliminate=eliminate, debug=debug)
    return catcomplex_to_matrix(cx, reduced=reduced)


def scan_homology(diagram: LinkDiagram, reduced: bool = False,
                  coeff: str = "Z") -> HomologyTable:
    return scan_diagram(diagram, reduced=reduced).homology(coeff)
