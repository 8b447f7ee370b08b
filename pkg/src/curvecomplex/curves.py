"""Building curves from closed paths in the dual graph.

A dual path is a list of slots, each the side through which the path leaves
its current triangle.  The punctured surface retracts onto the dual graph,
so a free homotopy class is a cyclically reduced dual path; the normal
representative of a curve crosses exactly the edges of that reduced path.
Every construction here is checked by tracing the resulting coordinates
back and comparing dual paths, so a non-simple class is never returned.

Curves inside a subsurface ``V`` (a component of the complement of a
multicurve ``X``) come from the region graph of ``V``: pieces of triangles
cut by ``X`` joined across shared gaps.  ``V`` retracts onto that graph.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .intersection import cut_details, is_essential
from .normal import components_of, trace
from .surface import IdealTriangulation


def reduce_path(tri: IdealTriangulation, slots) -> list:
    """Cyclically reduced form of a closed dual path."""
    gl = tri.gluing
    out = []
    for s in slots:
        if out and gl[out[-1]] == s:
            out.pop()
        else:
            out.append(s)
    i, j = 0, len(out) - 1
    while i < j and gl[out[j]] == out[i]:
        i += 1
        j -= 1
    return out[i:j + 1]


def check_closed(tri: IdealTriangulation, slots) -> None:
    gl = tri.gluing
    for k, s in enumerate(slots):
        nxt = slots[(k + 1) % len(slots)]
        if gl[s] // 3 != nxt // 3:
            raise ValueError(f"dual path breaks after step {k}")


def path_weights(tri: IdealTriangulation, slots) -> tuple:
    w = [0] * tri.num_edges
    for s in slots:
        w[tri.edge_of_slot[s]] += 1
    return tuple(w)


def curve_path(tri: IdealTriangulation, w) -> list:
    """Dual path of the single traced component of ``w``."""
    cycles, _ = trace(tri, w)
    if len(cycles) != 1:
        raise ValueError("not a single curve")
    return [3 * ch.t + ch.side_out for ch in cycles[0]]


def reverse_path(tri: IdealTriangulation, slots) -> list:
    gl = tri.gluing
    return [gl[s] for s in reversed(slots)]


def _is_rotation(a, b) -> bool:
    if len(a) != len(b):
        return False
    if not a:
        return True
    doubled = a + a
    n = len(a)
    first = b[0]
    return any(doubled[k] == first and doubled[k:k + n] == b for k in range(n))


def curve_from_path(tri: IdealTriangulation, slots):
    """Normal coordinates of the simple curve freely homotopic to ``slots``.

    Returns ``None`` when the class is trivial, not simple, or peripheral /
    inessential.
    """
    check_closed(tri, slots) if slots else None
    red = reduce_path(tri, slots)
    if not red:
        return None
    w = path_weights(tri, red)
    comps = components_of(tri, w)
    if comps != [(w, 1)]:
        return None
    traced = curve_path(tri, w)
    if not (_is_rotation(traced, red) or _is_rotation(reverse_path(tri, traced), red)):
        return None
    if not is_essential(tri, w):
        return None
    return w


@dataclass(frozen=True)
class Hole:
    """An end of a subsurface: a puncture label or a boundary side (curve, side)."""

    kind: str    # "puncture" or "boundary"
    index: int   # vertex label, or index of the cutting curve
    side: int = 0

    def describe(self) -> str:
        if self.kind == "puncture":
            return f"puncture {self.index + 1}"
        return f"boundary {self.index}{'LR'[self.side]}"


class RegionChart:
    """The region graph of one face of an arrangement.

    Nodes are the pieces of triangles lying in the face, joined across
    shared gaps; the face retracts onto this graph with its punctures.
    """

    def __init__(self, tri: IdealTriangulation, arr, face: int):
        self.tri = tri
        self.arr = arr
        self.face = face
        reg = arr.regions
        self.nodes = [n for n, f in enumerate(reg.region_face) if f == face]
        node_set = set(self.nodes)
        gl = tri.gluing
        eos = tri.edge_of_slot
        adj = {n: [] for n in self.nodes}
        for slot, row in enumerate(reg.slot_gap):
            other = gl[slot]
            m = arr.m[eos[slot]]
            for g, node in enumerate(row):
                if node in node_set:
                    adj[node].append((slot, reg.slot_gap[other][m - g]))
        for n in adj:
            adj[n].sort()
        self.adj = adj

    def puncture_holes(self) -> list:
        reg = self.arr.regions
        node_set = set(self.nodes)
        out = set()
        for t, corners in enumerate(reg.corner):
            for c, node in enumerate(corners):
                if node in node_set:
                    out.add(self.tri.triangles[t][c])
        return [Hole("puncture", p) for p in sorted(out)]

    def puncture_loop(self, label: int):
        """(start region, dual path) of a small loop around puncture ``label``."""
        tri = self.tri
        reg = self.arr.regions
        for orbit in tri.corner_orbits_raw():
            t, c = orbit[0]
            if tri.triangles[t][c] == label:
                slots = [3 * tt + (cc - 1) % 3 for tt, cc in orbit]
                return reg.corner[t][c], slots
        raise KeyError(label)

    # -- paths in the region graph --------------------------------------
    def region_path(self, a: int, b: int, avoid=frozenset()) -> list:
        """Slots of a shortest region-graph path from ``a`` to ``b``."""
        if a == b:
            return []
        prev = {a: None}
        q = deque([a])
        while q:
            n = q.popleft()
            for slot, nb in self.adj[n]:
                if nb in prev or nb in avoid:
                    continue
                prev[nb] = (n, slot)
                if nb == b:
                    path = []
                    cur = b
                    while prev[cur] is not None:
                        p, s = prev[cur]
                        path.append(s)
                        cur = p
                    return path[::-1]
                q.append(nb)
        raise ValueError("regions are not connected inside the subsurface")

    def hole_loop(self, hole: Hole):
        if hole.kind != "puncture":
            raise ValueError("a bare region chart only knows puncture loops")
        return self.puncture_loop(hole.index)

    def band_sum(self, h1: Hole, h2: Hole, route: int = 0):
        """The curve cutting off a pair of pants with ends ``h1`` and ``h2``.

        ``route`` picks among alternative connecting arcs (0 = shortest).
        """
        r1, loop1 = self.hole_loop(h1)
        r2, loop2 = self.hole_loop(h2)
        for kappa in self._routes(r1, r2, route):
            path = loop1 + kappa + loop2 + reverse_path(self.tri, kappa)
            w = curve_from_path(self.tri, path)
            if w is not None:
                return w
        return None

    def _routes(self, r1: int, r2: int, route: int):
        base = self.region_path(r1, r2)
        if route == 0:
            yield base
            return
        # alternatives: force the path through another region
        count = 0
        for mid in self.nodes:
            try:
                p = self.region_path(r1, mid) + self.region_path(mid, r2)
            except ValueError:
                continue
            if p == base:
                continue
            count += 1
            if count == route:
                yield p
                return

    def cycle_curves(self) -> list:
        """Curves from fundamental cycles of a breadth-first spanning tree."""
        root = self.nodes[0]
        prev = {root: None}
        order = [root]
        q = deque([root])
        while q:
            n = q.popleft()
            for slot, nb in self.adj[n]:
                if nb not in prev:
                    prev[nb] = (n, slot)
                    order.append(nb)
                    q.append(nb)

        def to_root(n):
            path = []
            while prev[n] is not None:
                p, s = prev[n]
                path.append(s)
                n = p
            return path[::-1]

        tree = {(p[1]) for p in prev.values() if p is not None}
        tree |= {self.tri.gluing[s] for s in tree}
        out = []
        seen = set()
        for n in order:
            for slot, nb in self.adj[n]:
                if slot in tree:
                    continue
                key = min(slot, self.tri.gluing[slot])
                if key in seen:
                    continue
                seen.add(key)
                path = to_root(n) + [slot] + reverse_path(self.tri, to_root(nb))
                w = curve_from_path(self.tri, path)
                if w is not None and w not in out:
                    out.append(w)
        return out

    def simple_cycle_curves(self, limit: int = 5000, pair_limit: int = 60) -> list:
        """Curves carried by simple cycles of the region graph and their products.

        Slower than :meth:`cycle_curves` but it reaches loops parallel to a
        boundary of the face.  Such a loop can run twice along a path joining
        two cycles, so products ``c1 p c2 p^-1`` (either orientation of
        ``c2``) of the first ``pair_limit`` cycles are tried as well.
        """
        gl = self.tri.gluing
        rank = {n: k for k, n in enumerate(self.nodes)}
        out = []
        cycles = []
        for s in self.nodes:
            # cycles whose smallest node is s
            stack = [(s, [], {s})]
            while stack and len(cycles) < limit:
                n, path, on = stack.pop()
                for slot, nb in self.adj[n]:
                    if path and slot == gl[path[-1]]:
                        continue
                    if nb == s:
                        if len(path) == 1 and slot == gl[path[0]]:
                            continue
                        cycles.append((s, path + [slot]))
                    elif rank[nb] > rank[s] and nb not in on:
                        stack.append((nb, path + [slot], on | {nb}))

        def keep(path):
            w = curve_from_path(self.tri, path)
            if w is not None and w not in out:
                out.append(w)

        for _, c in cycles:
            keep(c)
        few = cycles[:pair_limit]
        for i in range(len(few)):
            for j in range(i + 1, len(few)):
                (s1, c1), (s2, c2) = few[i], few[j]
                p = self.region_path(s1, s2)
                back = reverse_path(self.tri, p)
                keep(c1 + p + c2 + back)
                keep(c1 + p + reverse_path(self.tri, c2) + back)
        return out


def face_candidates(chart: RegionChart, thorough: bool = False) -> list:
    """Curves living in one face: band sums of puncture pairs and cycle curves.

    ``thorough`` swaps the fundamental cycles for every simple cycle of the
    face's region graph.
    """
    cands = []
    holes = chart.puncture_holes()
    for i in range(len(holes)):
        for j in range(i + 1, len(holes)):
            w = chart.band_sum(holes[i], holes[j])
            if w is not None:
                cands.append(w)
    cands += chart.simple_cycle_curves() if thorough else chart.cycle_curves()
    return sorted(set(cands))


class SubsurfaceChart(RegionChart):
    """A component ``V`` of the surface cut along ``X``, with its region graph."""

    def __init__(self, tri: IdealTriangulation, X, component: int = None, face: int = None):
        self.X = [tuple(x) for x in X]
        self.details = cut_details(tri, self.X)
        if face is None:
            inv = {c: f for f, c in self.details.face_component.items()}
            face = inv[component if component is not None else 0]
        super().__init__(tri, self.details.arrangement, face)
        self.component_index = self.details.face_component[face]
        self.component = self.details.surface.components[self.component_index]

    # -- holes -----------------------------------------------------------
    def holes(self) -> list:
        out = [Hole("puncture", p - 1) for p in self.component.punctures]
        out += [Hole("boundary", ci, side) for ci, side in self.component.boundary_sources]
        return out

    def _strand_of(self, ci: int) -> int:
        return self.details.strand_curve.index(ci)

    def hole_steps(self, hole: Hole) -> list:
        """Loop around a boundary hole as (chord index, region, exit slot) steps.

        All loops turn the same way: the hole on the left, ``V`` on the right.
        """
        sid = self._strand_of(hole.index)
        chords = sorted((c for c in self.arr.chords if c.strand == sid), key=lambda c: c.index)
        forward = (hole.side == 1) == (self.arr.strand_orientation(sid) == 1)
        if forward:
            return [(c.index, self.arr.region_node(c.t, 2 * c.p_in + 1), 3 * c.t + c.side_out) for c in chords]
        order = [chords[0]] + chords[:0:-1]
        return [(c.index, self.arr.region_node(c.t, 2 * c.p_out + 1), 3 * c.t + c.side_in) for c in order]

    def hole_side_of(self, ci: int, chord_index: int, region: int):
        """Which side (0/1) of curve ``ci`` has ``region`` next to chord ``chord_index``."""
        for side in (0, 1):
            if (ci, side) not in self.component.boundary_sources:
                continue
            for k, reg, _ in self.hole_steps(Hole("boundary", ci, side)):
                if k == chord_index and reg == region:
                    return side
        return None

    def hole_loop(self, hole: Hole):
        """(start region, dual path) of a loop around ``hole`` kept inside ``V``."""
        if hole.kind == "puncture":
            return self.puncture_loop(hole.index)
        steps = self.hole_steps(hole)
        return steps[0][1], [s for _, _, s in steps]

    def contains(self, c) -> bool:
        """Is curve ``c`` (disjoint from X, not in X) inside this component?"""
        return locate(self.tri, self.X, c) == self.component_index


def locate(tri: IdealTriangulation, X, c):
    """Index of the component of the cut along ``X`` containing curve ``c``.

    ``None`` when ``c`` meets ``X`` or belongs to it.
    """
    c = tuple(c)
    X = [tuple(x) for x in X]
    if c in X:
        return None
    try:
        d = cut_details(tri, X + [c])
    except ValueError:
        return None
    k = len(X)
    left, right = d.sides[k]
    # the face on either side of c merges back into the component of the X-cut
    base = cut_details(tri, X)
    if not X:
        return 0
    comp = d.surface.components[d.face_component[left]]
    for ci, side in comp.boundary_sources:
        if ci < k:
            return _component_with_source(base, ci, side)
    comp = d.surface.components[d.face_component[right]]
    for ci, side in comp.boundary_sources:
        if ci < k:
            return _component_with_source(base, ci, side)
    # neither side touches X: only possible without X at all
    return None


def _component_with_source(details, ci: int, side: int) -> int:
    for idx, comp in enumerate(details.surface.components):
        if (ci, side) in comp.boundary_sources:
            return idx
    raise KeyError((ci, side))


def pants_curve(tri: IdealTriangulation, p1: int, p2: int):
    """Curve around punctures ``p1`` and ``p2`` (1-based), via the joining edge if any."""
    chart = SubsurfaceChart(tri, [], component=0)
    return chart.band_sum(Hole("puncture", p1 - 1), Hole("puncture", p2 - 1))


__all__ = [
    "reduce_path",
    "path_weights",
    "curve_path",
    "reverse_path",
    "curve_from_path",
    "Hole",
    "SubsurfaceChart",
    "face_candidates",
    "locate",
    "pants_curve",
]
