"""Cochain complexes over the cobordism category: cone, deloop, eliminate."""

from __future__ import annotations

from collections import defaultdict

from .cobordism import (CatObject, Ctx, normalize, compose, deloop_object,
                        pivot_inverse, target_of, present_ids, strand_token,
                        saddle_parity, evaluate_events, NormalizeError)
from .resolution import classify_face


class CatComplex:
    """Objects per homological degree with sparse MorphismVector entries."""

    def __init__(self, ctx: Ctx):
        self.ctx = ctx
        self.objects: dict[int, CatObject] = {}
        self.degree: dict[int, int] = {}
        self.by_degree: dict[int, list[int]] = defaultdict(list)
        self.out: dict[int, dict[int, dict]] = defaultdict(dict)
        self.inn: dict[int, dict[int, dict]] = defaultdict(dict)

    # -- bookkeeping -------------------------------------------------------
    def add_object(self, obj: CatObject, degree: int) -> int:
        self.objects[obj.uid] = obj
        self.degree[obj.uid] = degree
        self.by_degree[degree].append(obj.uid)
        return obj.uid

    def remove_object(self, uid: int) -> None:
        for b in list(self.out.get(uid, ())):
            del self.inn[b][uid]
        self.out.pop(uid, None)
        for a in list(self.inn.get(uid, ())):
            del self.out[a][uid]
        self.inn.pop(uid, None)
        self.by_degree[self.degree[uid]].remove(uid)
        del self.degree[uid]
        del self.objects[uid]

    def set_entry(self, a: int, b: int, vec: dict) -> None:
        if vec:
            self.out[a][b] = vec
            self.inn[b][a] = vec
        else:
            self.out.get(a, {}).pop(b, None)
            self.inn.get(b, {}).pop(a, None)

    def add_entry(self, a: int, b: int, vec: dict) -> None:
        if not vec:
            return
        cur = dict(self.out.get(a, {}).get(b, {}))
        for k, v in vec.items():
            cur[k] = cur.get(k, 0) + v
            if not cur[k]:
                del cur[k]
        self.set_entry(a, b, cur)

    def entries(self):
        for a, row in list(self.out.items()):
            for b, vec in list(row.items()):
                yield a, b, vec

    def size(self):
        return len(self.objects), sum(len(r) for r in self.out.values())

    # -- debug -------------------------------------------------------------
    def dump(self) -> str:
        lines = []
        for deg in sorted(self.by_degree):
            uids = self.by_degree[deg]
            if not uids:
                continue
            lines.append(f"degree {deg}:")
            for uid in uids:
                o = self.objects[uid]
                lines.append(f"  #{uid} state={o.state:b} q={{{o.q:+d}}} "
                             f"absent={sorted(o.absent)}")
                for b, vec in sorted(self.out.get(uid, {}).items()):
                    terms = " + ".join(f"{c}*{list(ev)}" for ev, c in sorted(vec.items()))
                    lines.append(f"    -> #{b}: {terms or '0'}")
        return "\n".join(lines)

    def check_d_squared(self, strict: bool = False) -> bool:
        """delta^2 = 0 under the exterior functor.

        Normal forms can carry pairs that cancel only through relations the
        rewriter does not apply (dots separated by the closure), so the
        sound test evaluates composites through the functor.
        """
        ok = True
        for a in list(self.objects):
            acc: dict[int, dict] = {}
            for b, vec in self.out.get(a, {}).items():
                for c, vec2 in self.out.get(b, {}).items():
                    comp = compose(self.ctx, self.objects[a], vec, vec2)
                    tgt = acc.setdefault(c, {})
                    for k, v in comp.items():
                        tgt[k] = tgt.get(k, 0) + v
            for c, tot in acc.items():
                tot = {k: v for k, v in tot.items() if v}
                if not tot:
                    continue
                _l, flat = _flat_eval(self.ctx, self.objects[a], tot)
                if flat:
                    ok = False
                    if strict:
                        raise AssertionError(
                            f"d^2 != 0 from #{a} to #{c}: {tot}")
        return ok


def initial_complex(ctx: Ctx) -> CatComplex:
    """D*_1: the two smoothings of the first crossing joined by its saddle."""
    cx = CatComplex(ctx)
    a = CatObject(0, frozenset(), 0)
    b = CatObject(1, frozenset(), 1)
    cx.add_object(a, 0)
    cx.add_object(b, 1)
    cx.set_entry(a.uid, b.uid, {(("s", 0),): 1})
    return cx


def apply_G(ctx_new: Ctx, new_site: int, src: CatObject, events, coeff: int):
    """Sign of G_i on one generator: walk the events against the 0-closure."""
    state = src.state
    sgn = coeff
    arc0 = ctx_new.arc(new_site, 0)
    for ev in events:
        tag = ev[0]
        if tag == "s":
            arc1 = ctx_new.arc(ev[1], (state >> ev[1]) & 1)
            sm = ctx_new.smoothing(state)
            phi = classify_face(sm, arc0, arc1)[1]
            sgn *= -1 if phi == 0 else 1      # (-1)^(1+phi)
            state ^= 1 << ev[1]
        elif tag in ("d", "x"):
            if saddle_parity(ctx_new, state, new_site):
                sgn = -sgn                    # crossing's saddle splits
        # births carry no sign
    return sgn


def mapping_cone_step(cx: CatComplex, new_site: int, naturality_debug=False,
                      mirror=None) -> CatComplex:
    """The scanner's cone: D_{i+1} = Cone(sigma: F_i -> G_i) over D_i."""
    ctx_new = cx.ctx.rescan(cx.ctx.scanned | (1 << new_site))
    out = CatComplex(ctx_new)
    fmap: dict[int, CatObject] = {}
    gmap: dict[int, CatObject] = {}
    for uid, obj in cx.objects.items():
        fo = CatObject(obj.state, obj.absent, obj.q)
        go = CatObject(obj.state | (1 << new_site), obj.absent, obj.q + 1)
        fmap[uid] = fo
        gmap[uid] = go
        out.add_object(fo, cx.degree[uid])
        out.add_object(go, cx.degree[uid] + 1)
    for a, b, vec in cx.entries():
        src = cx.objects[a]
        # F part: the same events, renormalized in the new context
        fvec = normalize(ctx_new, fmap[a], list(vec.items()))
        out.add_entry(fmap[a].uid, fmap[b].uid, fvec)
        # -G part with the per-event signs
        gterms = []
        for ev, c in vec.items():
            gterms.append((ev, -apply_G(ctx_new, new_site, src, ev, c)))
        gvec = normalize(ctx_new, gmap[a], gterms)
        out.add_entry(gmap[a].uid, gmap[b].uid, gvec)
        if naturality_debug:
            _audit_naturality(ctx_new, new_site, fmap[a], vec,
                              {k: -v for k, v in gvec.items()}, fmap[b])
    sigma = {(("s", new_site),): 1}
    for uid in cx.objects:
        vec = normalize(ctx_new, fmap[uid], list(sigma.items()))
        out.add_entry(fmap[uid].uid, gmap[uid].uid, vec)
    if mirror is not None:
        mirror.cone(cx, out, new_site, fmap, gmap)
    return out


def _audit_naturality(ctx, new_site, fsrc, fvec, gvec, fdst):
    """sigma o F(w) == G(w) o sigma, compared via the exterior functor."""
    sigma = {(("s", new_site),): 1}
    lhs = compose(ctx, fsrc, fvec, sigma)
    rhs = compose(ctx, fsrc, sigma, gvec)
    la, va = _flat_eval(ctx, fsrc, lhs)
    lb, vb = _flat_eval(ctx, fsrc, rhs)
    if va != vb:
        raise AssertionError(f"naturality violation at site {new_site}")


def _flat_eval(ctx, src, vec):
    from .cobordism import evaluate_morphism
    flat = {}
    for ev, c in vec.items():
        m = evaluate_morphism(ctx, src, ev, c)
        for w, row in m.items():
            for w2, c2 in row.items():
                flat[(w, w2)] = flat.get((w, w2), 0) + c2
    return None, {k: v for k, v in flat.items() if v}


def deloop_complex(cx: CatComplex, basepoint=None, keep_minus_only=False,
                   mirror=None) -> None:
    """Replace internal circles by q-shifted circle-free objects, in place.

    With keep_minus_only, objects' circles containing the basepoint
    half-edge keep only the (q-1) branch: the reduced subcomplex.
    """
    ctx = cx.ctx
    progress = True
    while progress:
        progress = False
        for uid in list(cx.objects):
            obj = cx.objects.get(uid)
            if obj is None:
                continue
            sm = ctx.smoothing(obj.state)
            circles = [cid for cid in sm.internal_ids(ctx.scanned)
                       if cid not in obj.absent]
            if not circles:
                continue
            cid = circles[0]
            is_base = False
            if basepoint is not None:
                if isinstance(basepoint, tuple):
                    base_ci = sm.halfedge_circle.get(basepoint)
                    is_base = (base_ci is not None and sm.ids[base_ci] == cid)
                else:
                    is_base = (basepoint == cid)
            om, op, outm, outp, inm, inp = deloop_object(ctx, obj, cid)
            deg = cx.degree[uid]
            keep = [(om, outm, inm)]
            if not (keep_minus_only and is_base):
                keep.append((op, outp, inp))
            ins = list(cx.inn.get(uid, {}).items())
            outs = list(cx.out.get(uid, {}).items())
            for newobj, outv, inv in keep:
                cx.add_object(newobj, deg)
                for a, vec in ins:
                    nv = compose(ctx, cx.objects[a], vec, outv)
                    cx.add_entry(a, newobj.uid, nv)
                for b, vec in outs:
                    nv = compose(ctx, newobj, inv, vec)
                    cx.add_entry(newobj.uid, b, nv)
            if mirror is not None:
                mirror.deloop(cx, uid, cid, [k[0] for k in keep])
            cx.remove_object(uid)
            progress = True


def simplify(cx: CatComplex, full: bool = True, mirror=None) -> int:
    """Gaussian elimination at +-1 identity-like pivots; returns count."""
    ctx = cx.ctx
    eliminated = 0
    progress = True
    while progress:
        progress = False
        best = None
        for deg in sorted(cx.by_degree):
            for a in cx.by_degree[deg]:
                for b, vec in cx.out.get(a, {}).items():
                    if len(vec) != 1:
                        continue
                    (ev, c), = vec.items()
                    inv = pivot_inverse(ctx, cx.objects[a], cx.objects[b], ev, c)
                    if inv is None:
                        continue
                    cost = (len(cx.inn.get(b, {})) - 1) * (len(cx.out.get(a, {})) - 1)
                    key = (cost, a, b)
                    if best is None or key < best[0]:
                        best = (key, a, b, ev, c, inv)
                if best is not None and best[0][0] == 0:
                    break
            if best is not None:
                break
        if best is None:
            break
        _key, a, b, ev, c, inv = best
        if mirror is not None:
            mirror.eliminate(cx, a, b)
        inv_items = list(inv.items())
        for a2, beta in list(cx.inn.get(b, {}).items()):
            if a2 == a:
                continue
            for b2, gamma in list(cx.out.get(a, {}).items()):
                if b2 == b:
                    continue
                terms = []
                for e1, c1 in beta.items():
                    for e2, c2 in inv_items:
                        for e3, c3 in gamma.items():
                            terms.append((tuple(e1) + tuple(e2) + tuple(e3),
                                          -c1 * c2 * c3))
                corr = normalize(ctx, cx.objects[a2], terms)
                cx.add_entry(a2, b2, corr)
        cx.remove_object(a)
        cx.remove_object(b)
        eliminated += 1
        progress = full
    return eliminated
