"""Link diagrams: PD codes, braid closures, orientations, crossing orderings.

A crossing is stored KnotAtlas-style: the four incident semi-edges are
listed counterclockwise starting at the incoming under-strand.  Slot 0 is
the incoming under-strand, slot 2 the outgoing one; slots 1 and 3 carry
the over-strand.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace


class InputError(ValueError):
    """Malformed diagram input (bad syntax, inconsistent edges, ...)."""


@dataclass(frozen=True)
class Crossing:
    pd: tuple[int, int, int, int]   # edge labels, CCW from incoming under-strand
    sign: int = 0                   # +1 / -1, set by orientation analysis
    arrow: bool = False             # flip the default surgery-arc arrow

    def slots(self):
        return self.pd


@dataclass(frozen=True)
class BraidWord:
    strands: int
    letters: tuple[int, ...]

    def __post_init__(self):
        if self.strands < 2:
            raise InputError("braid needs at least 2 strands")
        for x in self.letters:
            if x == 0 or abs(x) >= self.strands:
                raise InputError(f"braid letter {x} out of range for {self.strands} strands")


@dataclass(frozen=True)
class LinkDiagram:
    crossings: tuple[Crossing, ...]
    edges: int                        # number of diagram arcs
    free_loops: int = 0               # crossing-free unknot components
    n_plus: int = 0
    n_minus: int = 0
    components: int = 0
    ordering: tuple[int, ...] = ()    # scan order, permutation of range(n)
    name: str = ""

    @property
    def n(self) -> int:
        return len(self.crossings)

    @property
    def writhe(self) -> int:
        return self.n_plus - self.n_minus

    def edge_ends(self) -> dict[int, list[tuple[int, int]]]:
        """Map edge label -> the two (crossing index, slot) endpoints."""
        ends: dict[int, list[tuple[int, int]]] = {}
        for ci, c in enumerate(self.crossings):
            for s, e in enumerate(c.pd):
                ends.setdefault(e, []).append((ci, s))
        return ends

    def with_arrows(self, flips) -> "LinkDiagram":
        """Return a copy with the surgery arrows of the given crossings flipped."""
        fl = set(flips)
        cs = tuple(replace(c, arrow=(c.arrow ^ (i in fl))) for i, c in enumerate(self.crossings))
        return replace(self, crossings=cs)

    def with_ordering(self, ordering) -> "LinkDiagram":
        ordering = tuple(ordering)
        if sorted(ordering) != list(range(self.n)):
            raise InputError("ordering is not a permutation of the crossings")
        return replace(self, ordering=ordering)


_PD_TOKEN = re.compile(r"X\s*\(([^()]*)\)|U", re.IGNORECASE)


def parse_pd(text: str) -> LinkDiagram:
    """Parse `PD[X(a,b,c,d),...]` or the unknot token `U`."""
    s = text.strip()
    if re.fullmatch(r"(?:U\s*)+", s, re.IGNORECASE):
        k = len(re.findall(r"U", s, re.IGNORECASE))
        return analyze_orientation(LinkDiagram(crossings=(), edges=0, free_loops=k))
    m = re.fullmatch(r"PD\s*\[(.*)\]\s*", s, re.DOTALL | re.IGNORECASE)
    if not m:
        raise InputError(f"not a PD expression: {text!r}")
    body = m.group(1)
    crossings = []
    free = 0
    consumed = 0
    for tok in _PD_TOKEN.finditer(body):
        consumed += 1
        if tok.group(0).upper() == "U":
            free += 1
            continue
        entries = [t for t in tok.group(1).replace(";", ",").split(",") if t.strip()]
        if len(entries) != 4:
            raise InputError(f"crossing arity: X({tok.group(1)}) needs 4 edge labels")
        try:
            pd = tuple(int(t) for t in entries)
        except ValueError as exc:
            raise InputError(f"bad edge label in X({tok.group(1)})") from exc
        crossings.append(Crossing(pd=pd))
    leftover = _PD_TOKEN.sub("", body).replace(",", "").strip()
    if leftover or (consumed == 0 and body.strip()):
        raise InputError(f"unparsed PD content: {body!r}")
    d = LinkDiagram(crossings=tuple(crossings), edges=0, free_loops=free)
    return analyze_orientation(d)


def from_braid(word: BraidWord) -> LinkDiagram:
    """Closure of a braid word; positive letters give positive crossings."""
    k = word.strands
    # Arc ids: current open arc at each strand position.
    next_edge = 0
    current = []
    first = []
    for _ in range(k):
        current.append(next_edge)
        first.append(next_edge)
        next_edge += 1
    crossings = []
    for letter in word.letters:
        i = abs(letter) - 1          # positions i, i+1 cross
        left_in, right_in = current[i], current[i + 1]
        left_out, right_out = next_edge, next_edge + 1
        next_edge += 2
        if letter > 0:
            # left strand passes over: under-strand enters bottom right.
            pd = (right_in, right_out, left_out, left_in)
        else:
            pd = (left_in, right_in, right_out, left_out)
        crossings.append(Crossing(pd=pd))
        current[i], current[i + 1] = left_out, right_out
    # Close up: identify the top arc of each strand with its bottom arc.
    ident = {}
    free = 0
    for s in range(k):
        a, b = current[s], first[s]
        if a == b:
            free += 1                # strand untouched by any crossing
        else:
            ident[a] = b
    def resolve(e):
        while e in ident:
            e = ident[e]
        return e
    relabeled = []
    for c in crossings:
        relabeled.append(Crossing(pd=tuple(resolve(e) for e in c.pd)))
    d = LinkDiagram(crossings=tuple(relabeled), edges=0, free_loops=free)
    return analyze_orientation(d)


def braid(strands: int, letters) -> LinkDiagram:
    return from_braid(BraidWord(strands, tuple(letters)))


def torus(p: int, q: int) -> LinkDiagram:
    """The (p,q) torus link as the closure of (sigma_1 ... sigma_{p-1})^q."""
    if p < 2:
        raise InputError("torus braid needs p >= 2")
    return from_braid(BraidWord(p, tuple(range(1, p)) * q))


_BR = re.compile(r"BR\s*\[\s*(\d+)\s*;([^\]]*)\]\s*", re.IGNORECASE)


def parse_braid(text: str) -> LinkDiagram:
    """Parse `BR[s; w1 w2 ...]` with signed integer letters."""
    m = _BR.fullmatch(text.strip())
    if not m:
        raise InputError(f"not a braid expression: {text!r}")
    strands = int(m.group(1))
    body = m.group(2).replace(",", " ").split()
    try:
        letters = tuple(int(t) for t in body)
    except ValueError as exc:
        raise InputError(f"bad braid letter in {text!r}") from exc
    return from_braid(BraidWord(strands, letters))


def analyze_orientation(diagram: LinkDiagram) -> LinkDiagram:
    """Infer edge orientations, crossing signs and the component count.

    The under-strand runs slot 0 -> slot 2.  Over-strand directions are
    propagated so every edge has one head and one tail; a component that
    is everywhere an over-strand gets an arbitrary orientation.
    """
    n = len(diagram.crossings)
    ends = diagram.edge_ends()
    for e, occ in ends.items():
        if len(occ) != 2:
            raise InputError(f"edge {e} appears {len(occ)} times, expected 2")
    # over_dir[ci]: True if the over-strand enters at slot 3 (positive crossing).
    over_dir: dict[int, bool] = {}

    def role(ci, s, assign):
        # True = edge comes IN to the crossing at this slot (head endpoint).
        if s == 0:
            return True
        if s == 2:
            return False
        if ci not in assign:
            return None
        return assign[ci] if s == 3 else not assign[ci]

    # Constraint propagation over the edges.
    pending = True
    while pending:
        pending = False
        for e, ((c1, s1), (c2, s2)) in ends.items():
            r1 = role(c1, s1, over_dir)
            r2 = role(c2, s2, over_dir)
            if r1 is None and r2 is None:
                continue
            if r1 is None or r2 is None:
                known, (ci, s) = (r2, (c1, s1)) if r1 is None else (r1, (c2, s2))
                want = not known      # the other endpoint takes the other role
                over_dir[ci] = want if s == 3 else not want
                pending = True
            elif r1 == r2:
                raise InputError(f"inconsistent orientation trace at edge {e}")
        if not pending:
            # seed one undetermined crossing (all-over component) and continue
            for ci in range(n):
                if ci not in over_dir and any(
                    role(c, s, over_dir) is None
                    for occ in ends.values() for (c, s) in occ if c == ci
                ):
                    over_dir[ci] = True
                    pending = True
                    break
    for ci in range(n):
        over_dir.setdefault(ci, True)
    signs = tuple(1 if over_dir[ci] else -1 for ci in range(n))
    crossings = tuple(replace(c, sign=signs[ci]) for ci, c in enumerate(diagram.crossings))
    n_plus = sum(1 for s in signs if s > 0)
    # Component count: follow strands through crossings.
    nxt = {}
    for ci, c in enumerate(diagram.crossings):
        out_of = {0: 2, 1: 3, 3: 1}
        for s_in, s_out in out_of.items():
            incoming = role(ci, s_in, over_dir)
            if incoming:
                nxt[c.pd[s_in]] = c.pd[s_out]
    comps = 0
    seen = set()
    for e in list(nxt):
        if e in seen:
            continue
        comps += 1
        while e not in seen:
            seen.add(e)
            e = nxt[e]
    comps += diagram.free_loops
    return replace(
        diagram,
        crossings=crossings,
        edges=len(ends),
        n_plus=n_plus,
        n_minus=n - n_plus,
        components=comps,
        ordering=tuple(range(n)),
    )


def mirror(diagram: LinkDiagram) -> LinkDiagram:
    """Mirror image: reflect the plane, reversing each crossing."""
    cs = tuple(Crossing(pd=(c.pd[0], c.pd[3], c.pd[2], c.pd[1])) for c in diagram.crossings)
    d = LinkDiagram(crossings=cs, edges=0, free_loops=diagram.free_loops,
                    name=(diagram.name + "!") if diagram.name else "")
    d = analyze_orientation(d)
    return d.with_ordering(diagram.ordering)


def emit_pd(diagram: LinkDiagram) -> str:
    """Render back to PD text with freshly traced edge labels."""
    if diagram.n == 0:
        return " ".join(["U"] * max(1, diagram.free_loops))
    ends = diagram.edge_ends()
    over_in = {ci: (3 if c.sign > 0 else 1) for ci, c in enumerate(diagram.crossings)}
    label = {}
    counter = 1

    def head_slot(ci, s):
        return s == 0 or s == over_in[ci]

    for e in sorted(ends):
        if e in label:
            continue
        cur = e
        while cur not in label:
            label[cur] = counter
            counter += 1
            (c1, s1), (c2, s2) = ends[cur]
            ci, s = (c1, s1) if head_slot(c1, s1) else (c2, s2)
            out = {0: 2, 1: 3, 3: 1}[s]
            cur = diagram.crossings[ci].pd[out]
    toks = ["X(%d,%d,%d,%d)" % tuple(label[e] for e in c.pd) for c in diagram.crossings]
    toks += ["U"] * diagram.free_loops
    return "PD[" + ",".join(toks) + "]"


def girth_profile(diagram: LinkDiagram, ordering) -> list[int]:
    """Boundary size |B_i| after each scan step of the given ordering."""
    ends = diagram.edge_ends()
    seen: set[int] = set()
    profile = []
    for site in ordering:
        seen.add(site)
        b = 0
        for e, occ in ends.items():
            inside = sum(1 for (ci, _s) in occ if ci in seen)
            if inside == 1:
                b += 1
        profile.append(b)
    return profile


def order_crossings(diagram: LinkDiagram, strategy: str = "greedy-girth") -> tuple[int, ...]:
    """Choose a scan order; `greedy-girth` grows the region minimizing its boundary."""
    n = diagram.n
    if strategy == "input":
        return tuple(range(n))
    if strategy not in ("greedy-girth", "greedy"):
        raise InputError(f"unknown ordering strategy {strategy!r}")
    ends = diagram.edge_ends()
    # adjacency: how many edge-endpoints each crossing pair shares
    incident: list[set[int]] = [set() for _ in range(n)]
    for e, occ in ends.items():
        for (ci, s) in occ:
            incident[ci].add(e)
    chosen: list[int] = []
    seen: set[int] = set()
    boundary: dict[int, int] = {}   # edge -> endpoints inside
    while len(chosen) < n:
        best = None
        for cand in range(n):
            if cand in seen:
                continue
            b = 0
            for e, occ in ends.items():
                inside = sum(1 for (ci, _s) in occ if ci in seen or ci == cand)
                if inside == 1:
                    b += 1
            key = (b, cand)
            if best is None or key < best[0:2]:
                best = (b, cand)
        chosen.append(best[1])
        seen.add(best[1])
    return tuple(chosen)
