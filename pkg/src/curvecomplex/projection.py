"""Subsurface projection, subsurface distance and the bounded-geodesic-image scan.

A subsurface ``V`` is a component of the surface cut along a multicurve
``X``.  A curve crossing ``X`` is put in minimal position with it; each arc
of the curve inside ``V`` is surgered along the boundary of ``V``.  For an
arc joining two different ends of ``V`` this gives the band sum of the two
ends along the arc; for an arc returning to the same end it gives the two
curves made of the arc and either half of that end.
"""

from __future__ import annotations

import logging
import random
from collections import deque
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .arrangement import Arrangement
from .curvegraph import CurveGraph, DistanceEstimate, InvariantViolation
from .curves import Hole, RegionChart, SubsurfaceChart, curve_from_path, face_candidates, locate, reverse_path
from .intersection import disjoint, intersection_number, realize_disjointly
from .normal import add, components_of
from .universe import BudgetExceeded

log = logging.getLogger(__name__)


@dataclass
class ProjectionResult:
    component: int
    source: tuple
    curves: list
    arcs: int = 0

    @property
    def empty(self) -> bool:
        return not self.curves

    def to_dict(self) -> dict:
        return {"component": self.component, "source": list(self.source),
                "curves": [list(c) for c in self.curves], "arcs": self.arcs}


class Subsurface:
    """Component ``index`` of the surface cut along ``X``, with cached charts."""

    def __init__(self, tri, X, index: int = 0):
        self.tri = tri
        self.X = [tuple(x) for x in X]
        if not self.X:
            raise ValueError("a proper subsurface needs a nonempty cutting multicurve")
        self.chart = SubsurfaceChart(tri, self.X, component=index)
        self.index = index
        self.component = self.chart.component
        self.total = tuple(sum(v) for v in zip(*self.X))
        self._proj = {}

    @property
    def xi(self) -> int:
        return self.component.xi

    @property
    def farey_intersection(self) -> int:
        """Intersection number of Farey neighbours when this surface has complexity 1."""
        return 1 if self.component.h == 1 else 2

    def describe(self) -> dict:
        c = self.component
        return {"X": [list(x) for x in self.X], "component": self.index,
                "h": c.h, "m": c.m, "p": c.p, "u": c.u, "xi": c.xi}

    def contains(self, c) -> bool:
        c = tuple(c)
        if c in self.X or not realize_disjointly(self.tri, c, self.total):
            return False
        return locate(self.tri, self.X, c) == self.index

    def project(self, c) -> ProjectionResult:
        c = tuple(c)
        hit = self._proj.get(c)
        if hit is None:
            hit = project(c, self)
            self._proj[c] = hit
        return hit


def _local_gap(arr: Arrangement, slot: int, loc: int) -> int:
    """Number of family-1 points before local position ``loc`` on ``slot``."""
    tri = arr.tri
    e = tri.edge_of_slot[slot]
    seq = arr.seq[e]
    m = len(seq)
    if tri.slot_is_canonical[slot]:
        return sum(1 for f, _ in seq[:loc] if f == 1)
    return sum(1 for f, _ in seq[m - loc:] if f == 1)


def _arcs(V: Subsurface, c):
    """Arcs of ``c`` inside ``V`` as (start (curve, chord, region), slots, end (curve, chord, region))."""
    tri = V.tri
    arr = Arrangement(tri, [c, V.total])
    arr.reduce()
    arr._build()
    ax = V.chart.arr
    xchord = {(ch.strand, ch.index): ch for ch in ax.chords}
    strand_curve = V.chart.details.strand_curve
    nc = len(arr.family_strands[0])
    own = sorted((ch for ch in arr.chords if ch.family == 0), key=lambda ch: (ch.strand, ch.index))
    cross = {}
    for t, i, j in arr.crossings:
        cross.setdefault(i, []).append(j)
    index_of = {id(ch): k for k, ch in enumerate(arr.chords)}
    events = []
    for ch in own:
        ci = index_of[id(ch)]
        t = ch.t
        P = sum(arr.m[tri.edge_of_slot[3 * t + s]] for s in range(3))

        def along(j):
            # distance from p_in to the crossing chord's endpoint on the p_in -> p_out arc
            b = arr.chords[j]
            for p in (b.p_in, b.p_out):
                d = (p - ch.p_in) % P
                if 0 < d < (ch.p_out - ch.p_in) % P:
                    return d
            raise InvariantViolation("crossing chord does not separate the chord ends")

        g_in = _local_gap(arr, 3 * t + ch.side_in, ch.loc_in)
        g_out = _local_gap(arr, 3 * t + ch.side_out, ch.loc_out)
        v_in = 2 * (ax.offsets[t][ch.side_in] + g_in) - 1
        v_out = 2 * (ax.offsets[t][ch.side_out] + g_out) - 1
        for j in sorted(cross.get(ci, []), key=along):
            b = arr.chords[j]
            xc = xchord[(b.strand - nc, b.index)]
            events.append(("x", strand_curve[b.strand - nc], b.index,
                           ax.adjacent_region(xc, v_in), ax.adjacent_region(xc, v_out)))
        events.append(("e", 3 * t + ch.side_out))
    first = next((k for k, ev in enumerate(events) if ev[0] == "x"), None)
    if first is None:
        return []
    events = events[first:] + events[:first]
    out = []
    cur = None
    for ev in events + [events[0]]:
        if ev[0] == "x":
            if cur is not None:
                out.append((cur[0], cur[1], (ev[1], ev[2], ev[3])))
            cur = ((ev[1], ev[2], ev[4]), [])
        else:
            cur[1].append(ev[1])
    return out


def _rotated(steps, chord_index: int) -> list:
    k = next(i for i, st in enumerate(steps) if st[0] == chord_index)
    return steps[k:] + steps[:k]


def project(c, V: Subsurface) -> ProjectionResult:
    """Curves of ``V`` obtained from ``c`` by arc surgery along the boundary of ``V``."""
    tri = V.tri
    c = tuple(c)
    if c in V.X:
        return ProjectionResult(V.index, c, [], 0)
    if realize_disjointly(tri, c, V.total):
        inside = locate(tri, V.X, c) == V.index
        return ProjectionResult(V.index, c, [c] if inside else [], 0)
    chart = V.chart
    face = chart.face
    region_face = chart.arr.regions.region_face
    found = set()
    arcs = 0
    for (x0, k0, r0), slots, (x1, k1, r1) in _arcs(V, c):
        if region_face[r0] != face:
            continue
        if region_face[r1] != face:
            raise InvariantViolation("arc leaves the subsurface without crossing its boundary")
        arcs += 1
        s0 = chart.hole_side_of(x0, k0, r0)
        s1 = chart.hole_side_of(x1, k1, r1)
        if s0 is None or s1 is None:
            raise InvariantViolation("arc endpoint not on a boundary of the subsurface")
        h0, h1 = Hole("boundary", x0, s0), Hole("boundary", x1, s1)
        loop0 = [s for _, _, s in _rotated(chart.hole_steps(h0), k0)]
        cands = []
        if h0 != h1:
            loop1 = [s for _, _, s in _rotated(chart.hole_steps(h1), k1)]
            cands.append(loop0 + slots + loop1 + reverse_path(tri, slots))
        else:
            # the arc closed up by either half of the same end
            steps = _rotated(chart.hole_steps(h0), k0)
            j = next(i for i, st in enumerate(steps) if st[0] == k1)
            cands.append(slots + loop0[j:])
            cands.append(slots + reverse_path(tri, loop0[:j]))
            if j == 0:
                cands.append(slots + reverse_path(tri, loop0))
        for path in cands:
            w = curve_from_path(tri, path)
            if w is None or w in V.X:
                continue
            if not realize_disjointly(tri, w, V.total):
                raise InvariantViolation("projected curve meets the boundary of the subsurface")
            found.add(w)
    return ProjectionResult(V.index, c, sorted(found), arcs)


# -- distances inside V ------------------------------------------------------
def fills_in(V: Subsurface, a, b) -> bool:
    """Do curves ``a`` and ``b`` of ``V`` fill ``V``?

    Faces of the complement of ``a``, ``b`` and ``X`` that touch ``a`` or
    ``b`` must be disks, once-punctured disks, or annuli along ``X``.
    """
    tri = V.tri
    a, b = tuple(a), tuple(b)
    if a == b or disjoint(tri, a, b):
        return False
    arr = Arrangement(tri, [add(a, V.total), b])
    arr.reduce()
    faces, _, _ = arr.faces()
    strands = arr.face_strands()
    xs = {s for s in range(len(arr.strands)) if arr.strand_weights(s) in V.X}
    for f, face in enumerate(faces):
        if face.interior:
            continue
        touch = strands.get(f, set())
        if not touch - xs:
            continue
        if face.euler_filled == 1 and len(face.punctures) <= 1:
            continue
        if face.euler_filled == 0 and not face.punctures and touch & xs:
            continue
        return False
    return True


def witness_in(V: Subsurface, a, b):
    """A curve of ``V`` disjoint from ``a`` and ``b``, read off a complement face."""
    tri = V.tri
    a, b = tuple(a), tuple(b)
    arr = Arrangement(tri, [add(a, V.total), b])
    arr.reduce()
    faces, _, _ = arr.faces()
    strands = arr.face_strands()
    xs = {s for s in range(len(arr.strands)) if arr.strand_weights(s) in V.X}
    charts = []
    for f, face in enumerate(faces):
        if face.interior or not (strands.get(f, set()) - xs):
            continue
        if face.euler_filled == 1 and len(face.punctures) <= 1:
            continue
        charts.append(RegionChart(tri, arr, f))
    for thorough in (False, True):
        for chart in charts:
            for w in face_candidates(chart, thorough):
                if w in (a, b) or w in V.X:
                    continue
                if disjoint(tri, w, a) and disjoint(tri, w, b) and V.contains(w):
                    return w
    return None


class SubsurfaceGraph:
    """Curve graph of ``V`` on a finite vertex set, grown on demand."""

    def __init__(self, V: Subsurface, curves=()):
        self.V = V
        self.curves = []
        self.index = {}
        self.adj = []
        for c in curves:
            self.add(c)

    def _edge(self, a, b) -> bool:
        tri = self.V.tri
        if self.V.xi == 1:
            return a != b and intersection_number(tri, a, b) == self.V.farey_intersection
        return disjoint(tri, a, b)

    def add(self, c) -> int:
        c = tuple(c)
        k = self.index.get(c)
        if k is not None:
            return k
        k = len(self.curves)
        self.curves.append(c)
        self.index[c] = k
        self.adj.append(set())
        for j, d in enumerate(self.curves[:-1]):
            if self._edge(c, d):
                self.adj[k].add(j)
                self.adj[j].add(k)
        return k

    def distance(self, a, b):
        ia, ib = self.add(a), self.add(b)
        dist = {ia: 0}
        q = deque([ia])
        while q:
            v = q.popleft()
            if v == ib:
                return dist[v]
            for w in self.adj[v]:
                if w not in dist:
                    dist[w] = dist[v] + 1
                    q.append(w)
        return None


def curve_distance_in(V: Subsurface, a, b, graph: SubsurfaceGraph = None) -> DistanceEstimate:
    """Distance in the curve graph of ``V`` between two of its curves."""
    tri = V.tri
    a, b = tuple(a), tuple(b)
    if a == b:
        return DistanceEstimate(0, 0, True)
    graph = graph or SubsurfaceGraph(V)
    upper = graph.distance(a, b)
    if V.xi == 1:
        if intersection_number(tri, a, b) == V.farey_intersection:
            return DistanceEstimate(1, 1, True)
        return DistanceEstimate(2, upper, upper == 2)
    if disjoint(tri, a, b):
        return DistanceEstimate(1, 1, True)
    if not fills_in(V, a, b):
        w = witness_in(V, a, b)
        if w is None:
            raise InvariantViolation(f"non-filling pair in V without a complement curve: {a}, {b}")
        return DistanceEstimate(2, 2, True, witness=w)
    if upper is not None and upper < 3:
        raise InvariantViolation("filling pair in V at graph distance below 3")
    return DistanceEstimate(3, upper, upper == 3)


def subsurface_distance(V: Subsurface, a, b, universe_V=None) -> DistanceEstimate:
    """``d_V(a, b)``: least distance between the projections; INFINITE when one is empty."""
    pa, pb = V.project(a), V.project(b)
    if pa.empty or pb.empty:
        return DistanceEstimate(0, None, False, infinite=True)
    graph = universe_V if isinstance(universe_V, SubsurfaceGraph) else SubsurfaceGraph(V, universe_V or ())
    best = None
    for x, y in product(pa.curves, pb.curves):
        d = curve_distance_in(V, x, y, graph)
        if best is None:
            best = d
            continue
        lower = min(best.lower, d.lower)
        uppers = [u for u in (best.upper, d.upper) if u is not None]
        upper = min(uppers) if uppers else None
        best = DistanceEstimate(lower, upper, upper == lower)
    return best


# -- bounded geodesic image scan ---------------------------------------------
@dataclass
class BgitRow:
    a: tuple
    b: tuple
    distance: int
    geodesics: int
    all_cut: bool
    d_V: DistanceEstimate = None
    status: str = "OK"

    def to_dict(self) -> dict:
        return {"a": list(self.a), "b": list(self.b), "distance": self.distance,
                "geodesics": self.geodesics, "all_cut": self.all_cut, "status": self.status,
                "d_V": self.d_V.to_dict() if self.d_V else None}


def geodesic_vertices(g: CurveGraph, i: int, j: int, path_budget: int):
    """(distance, number of shortest paths, vertices on some shortest path) in the universe."""
    da = g.bfs(i)
    d = int(da[j])
    if d < 0:
        return None, 0, []
    db = g.bfs(j)
    on = [v for v in range(len(g)) if da[v] >= 0 and db[v] >= 0 and da[v] + db[v] == d]
    count = {i: 1}
    for v in sorted(on, key=lambda v: da[v]):
        if v == i:
            continue
        count[v] = sum(count.get(w, 0) for w in g.adj[v] if da[w] == da[v] - 1 and w in count)
        if count[v] > path_budget:
            raise BudgetExceeded(f"more than {path_budget} shortest paths")
    return d, count[j], on


def bgit_scan(g: CurveGraph, V: Subsurface, pairs, path_budget: int = 1000, universe_V=None) -> dict:
    """Record ``d_V(a, b)`` for every sampled pair all of whose universe geodesics cut ``V``."""
    graph = universe_V if isinstance(universe_V, SubsurfaceGraph) else SubsurfaceGraph(V, universe_V or ())
    rows = []
    for a, b in pairs:
        i, j = g.index_of(a), g.index_of(b)
        try:
            d, count, on = geodesic_vertices(g, i, j, path_budget)
        except BudgetExceeded:
            rows.append(BgitRow(g.curve(i), g.curve(j), -1, -1, False, status="BUDGET_EXCEEDED"))
            continue
        if d is None:
            rows.append(BgitRow(g.curve(i), g.curve(j), -1, 0, False, status="DISCONNECTED"))
            continue
        all_cut = all(not V.project(g.curve(v)).empty for v in on)
        row = BgitRow(g.curve(i), g.curve(j), d, count, all_cut)
        if all_cut:
            row.d_V = subsurface_distance(V, g.curve(i), g.curve(j), graph)
        rows.append(row)
    recorded = [r.d_V for r in rows if r.d_V is not None and not r.d_V.infinite]
    return {
        "subsurface": V.describe(),
        "path_budget": path_budget,
        "sample_size": len(rows),
        "rows": [r.to_dict() for r in rows],
        "recorded": len(recorded),
        "max_d_V_lower": max((d.lower for d in recorded), default=None),
        "max_d_V_upper": max((d.upper for d in recorded if d.upper is not None), default=None),
        "budget_exceeded": sum(1 for r in rows if r.status == "BUDGET_EXCEEDED"),
    }


def sample_pairs(n_items: int, count: int, seed: int = 0) -> list:
    """Distinct index pairs drawn from one seeded generator."""
    rng = random.Random(seed)
    total = n_items * (n_items - 1) // 2
    if count >= total:
        return [(i, j) for i in range(n_items) for j in range(i + 1, n_items)]
    seen = set()
    while len(seen) < count:
        i, j = rng.randrange(n_items), rng.randrange(n_items)
        if i != j:
            seen.add((min(i, j), max(i, j)))
    return sorted(seen)


def lipschitz_check(V: Subsurface, pairs, universe_V=None, bound: int = 4) -> dict:
    """Projected disjoint pairs stay within ``bound`` in the curve graph of ``V``."""
    graph = universe_V if isinstance(universe_V, SubsurfaceGraph) else SubsurfaceGraph(V, universe_V or ())
    checked = 0
    violations = []
    values = []
    for a, b in pairs:
        if V.project(a).empty or V.project(b).empty:
            continue
        d = subsurface_distance(V, a, b, graph)
        checked += 1
        values.append(d.upper)
        if d.upper is None or d.upper > bound:
            violations.append({"a": list(a), "b": list(b), "d_V": d.to_dict()})
    return {"checked": checked, "violations": violations, "bound": bound,
            "max_upper": max((v for v in values if v is not None), default=None)}


__all__ = [
    "ProjectionResult",
    "Subsurface",
    "project",
    "fills_in",
    "witness_in",
    "SubsurfaceGraph",
    "curve_distance_in",
    "subsurface_distance",
    "BgitRow",
    "geodesic_vertices",
    "bgit_scan",
    "sample_pairs",
    "lipschitz_check",
]
