"""Smoothings of resolution states, surgeries, and two-surgery face types.

Local model of a crossing disc: the four semi-edge slots sit counterclockwise,
slot 0 at the incoming under-strand.  The 0-smoothing pairs slots (0,1),(2,3);
the 1-smoothing pairs (1,2),(3,0).  A strand traversed in slot-increasing
(counterclockwise) order has the disc interior - and hence any surgery-arc
attachment - on its left.
"""

from __future__ import annotations

from dataclasses import dataclass
from .diagram import LinkDiagram

# strand k of local state b occupies these slots, in canonical traversal order
STRAND_SLOTS = (((0, 1), (2, 3)), ((1, 2), (3, 0)))
SLOT_STRAND = (
    {0: 0, 1: 0, 2: 1, 3: 1},   # state 0: slot -> strand index
    {1: 0, 2: 0, 3: 1, 0: 1},   # state 1
)


class ChartError(RuntimeError):
    """A two-surgery configuration violated an asserted geometric property."""


@dataclass(frozen=True)
class Arc:
    """Oriented surgery arc at a crossing site.

    `state` is the local smoothing the arc lives in (the surgery flips it),
    `tail` the strand index (0/1) carrying the arrow's tail.
    """
    site: int
    state: int
    tail: int

    @property
    def head(self) -> int:
        return 1 - self.tail

    def flipped(self) -> "Arc":
        return Arc(self.site, self.state, 1 - self.tail)

    def s1_strand(self) -> int:
        """Post-surgery strand index on the rotated arrow's target side."""
        return (1 - self.tail) if self.state == 0 else self.tail


class Scene:
    """Combinatorial arena for one diagram: slot adjacency, signs, arrows.

    Crossings are reindexed by the diagram's scan ordering, so "site i" is
    the i-th crossing scanned.
    """

    def __init__(self, diagram: LinkDiagram):
        self.diagram = diagram
        order = diagram.ordering or tuple(range(diagram.n))
        self.order = order
        self.n = diagram.n
        self.free_loops = diagram.free_loops
        self.sign = tuple(diagram.crossings[c].sign for c in order)
        self.arrow_flip = tuple(diagram.crossings[c].arrow for c in order)
        ends: dict[int, list[tuple[int, int]]] = {}
        for si, c in enumerate(order):
            for slot, e in enumerate(diagram.crossings[c].pd):
                ends.setdefault(e, []).append((si, slot))
        self.adj: dict[tuple[int, int], tuple[int, int]] = {}
        for e, occ in ends.items():
            a, b = occ
            self.adj[a] = b
            self.adj[b] = a
        self.n_plus = diagram.n_plus
        self.n_minus = diagram.n_minus
        self._phi_cache: dict = {}
        self._smoothing_cache: dict = {}

    def default_arc(self, site: int, state: int) -> Arc:
        """Surgery arc of `site` in local smoothing `state`, default arrow.

        In the 0-smoothing the arrow is the over-strand direction rotated 90
        degrees clockwise: tail on strand 1 at positive crossings, strand 0
        at negative ones.  The dual (1-smoothing) arc gets a fixed default.
        """
        if state == 0:
            tail = 1 if self.sign[site] > 0 else 0
            if self.arrow_flip[site]:
                tail = 1 - tail
        else:
            tail = 0
        return Arc(site, state, tail)

    def smoothing(self, state: int) -> "Smoothing":
        sm = self._smoothing_cache.get(state)
        if sm is None:
            sm = Smoothing(self, state)
            if len(self._smoothing_cache) < 1 << 15:
                self._smoothing_cache[state] = sm
        return sm


class Smoothing:
    """Traced closed 1-manifold of a resolution state.

    circles: tuple of step tuples (site, k, dir); dir=+1 means canonical
    slot-order traversal.  Free loops of the diagram come last, with empty
    step tuples.  `ids[i]` is a stable id (min strand token, or a free-loop
    token) used to match circles across states.
    """

    __slots__ = ("scene", "state", "circles", "strand_pos", "halfedge_circle",
                 "free_ids", "ids")

    def __init__(self, scene: Scene, state: int):
        self.scene = scene
        self.state = state
        circles = []
        strand_pos = {}
        halfedge_circle = {}
        seen = set()
        for site0 in range(scene.n):
            for k0 in (0, 1):
                if (site0, k0) in seen:
                    continue
                steps = []
                site, k, dirn = site0, k0, 1
                while True:
                    seen.add((site, k))
                    steps.append((site, k, dirn))
                    b = (state >> site) & 1
                    slots = STRAND_SLOTS[b][k]
                    exit_slot = slots[1] if dirn == 1 else slots[0]
                    nsite, nslot = scene.adj[(site, exit_slot)]
                    nb = (state >> nsite) & 1
                    k2 = SLOT_STRAND[nb][nslot]
                    enter = STRAND_SLOTS[nb][k2]
                    dirn = 1 if nslot == enter[0] else -1
                    site, k = nsite, k2
                    if (site, k) == (site0, k0):
                        break
                circles.append(tuple(steps))
        ids = []
        for cid, steps in enumerate(circles):
            ids.append(min(s * 2 + k for (s, k, _d) in steps))
            for idx, (s, k, d) in enumerate(steps):
                strand_pos[(s, k)] = (cid, idx)
                b = (state >> s) & 1
                slots = STRAND_SLOTS[b][k]
                halfedge_circle[(s, slots[0])] = cid
                halfedge_circle[(s, slots[1])] = cid
        self.free_ids = []
        for j in range(scene.free_loops):
            circles.append(())
            self.free_ids.append(2 * scene.n + j)
            ids.append(2 * scene.n + j)
        self.circles = tuple(circles)
        self.ids = tuple(ids)
        self.strand_pos = strand_pos
        self.halfedge_circle = halfedge_circle

    @property
    def s(self) -> int:
        return len(self.circles)

    def circle_of_strand(self, site: int, k: int) -> int:
        return self.strand_pos[(site, k)][0]

    def circle_by_id(self, cid: int) -> int:
        return self.ids.index(cid)

    def internal_ids(self, scanned_mask: int) -> list[int]:
        """Ids of circles all of whose sites are scanned (deloopable)."""
        out = []
        for i, steps in enumerate(self.circles):
            if steps and all((scanned_mask >> s) & 1 for (s, _k, _d) in steps):
                out.append(self.ids[i])
        return out


def resolve_state(diagram, bits) -> Smoothing:
    """Trace the smoothing of a resolution state (bit sequence or bitmask)."""
    scene = diagram if isinstance(diagram, Scene) else Scene(diagram)
    if isinstance(bits, int):
        state = bits
    else:
        state = 0
        for i, b in enumerate(bits):
            if b:
                state |= 1 << i
    return scene.smoothing(state)


def apply_surgery(sm: Smoothing, arc: Arc):
    """Perform one surgery.  Returns (new Smoothing, kind, labels).

    kind is "merge" or "split"; labels carries circle indices in the new
    smoothing: {"merged": i} or {"s0": i, "s1": j}, the split sides named by
    rotating the framing arrow 90 degrees anticlockwise (s0 -> s1).
    """
    scene, state = sm.scene, sm.state
    if ((state >> arc.site) & 1) != arc.state:
        raise ChartError(f"arc at site {arc.site} expects local state {arc.state}")
    cA = sm.circle_of_strand(arc.site, 0)
    cB = sm.circle_of_strand(arc.site, 1)
    new = scene.smoothing(state ^ (1 << arc.site))
    if cA != cB:
        if new.s != sm.s - 1:
            raise ChartError("merge did not drop the circle count by 1")
        return new, "merge", {"merged": new.circle_of_strand(arc.site, 0)}
    if new.s != sm.s + 1:
        raise ChartError("split did not raise the circle count by 1")
    slots = STRAND_SLOTS[arc.state][arc.tail]
    # Rotating the tail arrow 90 degrees anticlockwise points at the side of
    # the tail strand's first canonical slot; that side is s1.
    other_end = scene.adj[(arc.site, slots[0])]
    s1_circle = new.halfedge_circle[other_end]
    if new.circle_of_strand(arc.site, arc.s1_strand()) != s1_circle:
        raise ChartError("side-tracking disagrees with the local strand rule")
    pair = {new.circle_of_strand(arc.site, 0), new.circle_of_strand(arc.site, 1)}
    pair.discard(s1_circle)
    if len(pair) != 1:
        raise ChartError("split produced indistinguishable sides")
    return new, "split", {"s1": s1_circle, "s0": pair.pop()}


# ---------------------------------------------------------------------------
# Exterior-algebra scratch evaluation, restricted to the circles the arcs
# touch (dimension at most 2^5).

def _untouched_map(sm_src: Smoothing, sm_dst: Smoothing, circle: int) -> int:
    steps = sm_src.circles[circle]
    if not steps:
        return sm_dst.circle_by_id(sm_src.ids[circle])
    s, k, _d = steps[0]
    slot = STRAND_SLOTS[(sm_src.state >> s) & 1][k][0]
    return sm_dst.halfedge_circle[(s, slot)]


def _inversions(seq) -> int:
    inv = 0
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                inv += 1
    return inv


def _restricted_edge(sm_src, sm_dst, arc, kind, labels, letters_src):
    """Edge map over a restricted letter set.

    letters_src: sorted tuple of src circle indices.  Returns
    (letters_dst, map) with map = {src mask: {dst mask: coeff}} over the
    positions of the letter tuples.
    """
    site = arc.site
    if kind == "merge":
        u = sm_src.circle_of_strand(site, 0)
        v = sm_src.circle_of_strand(site, 1)
        target = labels["merged"]
        img = {c: (target if c in (u, v) else _untouched_map(sm_src, sm_dst, c))
               for c in letters_src}
    else:
        cs = sm_src.circle_of_strand(site, 0)
        img = {c: (labels["s0"] if c == cs else _untouched_map(sm_src, sm_dst, c))
               for c in letters_src}
    letters_dst = sorted(set(img.values()) | ({labels["s1"]} if kind == "split" else set()))
    pos = {c: i for i, c in enumerate(letters_dst)}
    out = {}
    for mask in range(1 << len(letters_src)):
        raw = [img[letters_src[i]] for i in range(len(letters_src)) if mask >> i & 1]
        if len(set(raw)) < len(raw):
            out[mask] = {}
            continue
        sign = -1 if _inversions(raw) & 1 else 1
        word = 0
        for c in raw:
            word |= 1 << pos[c]
        if kind == "merge":
            out[mask] = {word: sign}
        else:
            res = {}
            for letter, lsign in ((labels["s1"], 1), (labels["s0"], -1)):
                p = pos[letter]
                if word >> p & 1:
                    continue
                hops = bin(word & ((1 << p) - 1)).count("1")
                res_word = word | (1 << p)
                coeff = lsign * sign * (-1 if hops & 1 else 1)
                res[res_word] = res.get(res_word, 0) + coeff
            out[mask] = {k: v for k, v in res.items() if v}
    return letters_dst, out


def _compose_maps(f, g):
    """g after f, both {mask: {mask': coeff}}."""
    out = {}
    for w, mid in f.items():
        acc = {}
        for m, c in mid.items():
            for w2, c2 in g.get(m, {}).items():
                acc[w2] = acc.get(w2, 0) + c * c2
        out[w] = {k: v for k, v in acc.items() if v}
    return out


def _relabel_map(f, letters_a, letters_b):
    """Rewrite dst masks of f from letter list a to letter list b.

    Masks encode wedge words in position order, so a change of letter order
    contributes the inversion sign of the induced permutation.
    """
    if list(letters_a) == list(letters_b):
        return f
    posb = {c: i for i, c in enumerate(letters_b)}
    out = {}
    for w, row in f.items():
        acc = {}
        for word, c in row.items():
            letters = [letters_a[i] for i in range(len(letters_a)) if word >> i & 1]
            sign = -1 if _inversions([posb[l] for l in letters]) & 1 else 1
            word2 = 0
            for l in letters:
                word2 |= 1 << posb[l]
            acc[word2] = acc.get(word2, 0) + sign * c
        out[w] = acc
    return out


def _is_zero(f):
    return all(not row for row in f.values())


def _maps_equal(f, g, neg=False):
    for w in set(f) | set(g):
        a, b = f.get(w, {}), g.get(w, {})
        for k in set(a) | set(b):
            vb = b.get(k, 0)
            if a.get(k, 0) != (-vb if neg else vb):
                return False
    return True


def _involved(sm: Smoothing, arcs) -> tuple:
    cs = set()
    for arc in arcs:
        cs.add(sm.circle_of_strand(arc.site, 0))
        cs.add(sm.circle_of_strand(arc.site, 1))
    return tuple(sorted(cs))


def _local_key(sm: Smoothing, arc0: Arc, arc1: Arc):
    """Canonical key of a two-arc configuration, for memoization."""
    marks = {}
    for j, arc in enumerate((arc0, arc1)):
        for k in (0, 1):
            ci, idx = sm.strand_pos[(arc.site, k)]
            _s, _k, dirn = sm.circles[ci][idx]
            role = 0 if k == arc.tail else 1
            side = 0 if dirn == 1 else 1
            marks.setdefault(ci, []).append((idx, (j, role, side)))
    words = []
    for ci, lst in marks.items():
        lst.sort()
        seq = tuple(m for _i, m in lst)
        words.append(min(seq[r:] + seq[:r] for r in range(len(seq))))
    return tuple(sorted(words))


def classify_face(sm: Smoothing, arc0: Arc, arc1: Arc):
    """Type (A/C/X/Y) and phi of a two-surgery configuration.

    A vs C is decided algebraically by comparing the two composites on the
    exterior algebra of the involved circles; the both-zero case is the
    interleaved-split one, separated into X and Y by the head/tail rule.
    """
    if arc0.site == arc1.site:
        raise ChartError("face arcs must sit at distinct sites")
    cache = sm.scene._phi_cache
    key = _local_key(sm, arc0, arc1)
    hit = cache.get(key)
    if hit is not None:
        return hit
    letters0 = _involved(sm, (arc0, arc1))

    def composite(first, second):
        mid, kind1, lab1 = apply_surgery(sm, first)
        l1, m1 = _restricted_edge(sm, mid, first, kind1, lab1, letters0)
        end, kind2, lab2 = apply_surgery(mid, second)
        l2, m2 = _restricted_edge(mid, end, second, kind2, lab2, tuple(l1))
        return _compose_maps(m1, m2), end, l2

    f01, end_a, la = composite(arc0, arc1)
    f10, end_b, lb = composite(arc1, arc0)
    # The two orders finish at the same state; identify circles by stable id.
    la_ids = [end_a.ids[c] for c in la]
    lb_ids = [end_b.ids[c] for c in lb]
    f01 = _relabel_map(f01, la_ids, sorted(set(la_ids) | set(lb_ids)))
    f10 = _relabel_map(f10, lb_ids, sorted(set(la_ids) | set(lb_ids)))
    if _is_zero(f01) and _is_zero(f10):
        result = _classify_xy(sm, arc0, arc1)
    elif _maps_equal(f01, f10):
        result = ("C", 1)
    elif _maps_equal(f01, f10, neg=True):
        result = ("A", 0)
    else:
        raise ChartError("two-surgery composites neither equal, opposite, nor zero")
    cache[key] = result
    return result


def _classify_xy(sm: Smoothing, arc0: Arc, arc1: Arc):
    """Head/tail rule for the interleaved-split (both-zero) case."""
    verdicts = []
    for me, other in ((arc0, arc1), (arc1, arc0)):
        new, kind, labels = apply_surgery(sm, me)
        if kind != "split":
            raise ChartError("both-zero face with a merge arc")
        c_head = new.circle_of_strand(other.site, other.head)
        c_tail = new.circle_of_strand(other.site, other.tail)
        if c_head == c_tail:
            raise ChartError("arcs of a both-zero face must interleave")
        if labels["s1"] == c_head:
            verdicts.append("head")
        elif labels["s1"] == c_tail:
            verdicts.append("tail")
        else:
            raise ChartError("other arc does not touch the split circle")
    if verdicts == ["head", "head"]:
        return ("X", 0)
    if verdicts == ["tail", "tail"]:
        return ("Y", 1)
    raise ChartError(f"mixed head/tail outcome {verdicts}")


def phi(sm: Smoothing, arc0: Arc, arc1: Arc) -> int:
    return classify_face(sm, arc0, arc1)[1]
