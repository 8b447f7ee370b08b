"""Two multicurves drawn together on the triangulation.

Each family (multicurve) is realized normally.  Along every edge the points
of the two families are merged into one sequence (an *interleaving*); inside
every triangle each normal arc is a straight chord, so two chords cross iff
their endpoints alternate around the triangle.  Changing interleavings is the
only move: removing an empty bigon swaps one adjacent pair of points on each
edge the bigon strip crosses.

Faces of the complement are found triangle by triangle.  Boundary gaps of a
triangle lie in the same region iff no chord separates them, regions are
glued across edges through shared gaps, and the Euler characteristic of a
face is ``regions - gaps (+ punctures, when filled in)``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .normal import corner_counts, trace, to_canonical
from .surface import IdealTriangulation

ORDERINGS = ("a_inner", "b_inner", "a_first", "b_first")


@dataclass
class ArcChord:
    t: int
    family: int
    strand: int       # global cycle id
    index: int        # position of the chord along its cycle
    side_in: int
    loc_in: int       # local merged position on side_in
    side_out: int
    loc_out: int
    p_in: int         # position around the triangle boundary
    p_out: int


@dataclass
class Face:
    regions: int
    gaps: int
    punctures: tuple
    interior: bool = False  # an interior region of a single triangle

    @property
    def euler(self) -> int:
        return self.regions - self.gaps

    @property
    def euler_filled(self) -> int:
        return self.regions - self.gaps + len(self.punctures)

    @property
    def is_disk(self) -> bool:
        return self.euler_filled == 1 and not self.punctures

    @property
    def is_punctured_disk(self) -> bool:
        return self.euler_filled == 1 and len(self.punctures) == 1


class _UnionFind:
    def __init__(self):
        self.parent = []

    def add(self) -> int:
        self.parent.append(len(self.parent))
        return len(self.parent) - 1

    def find(self, x: int) -> int:
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a: int, b: int) -> None:
        a, b = self.find(a), self.find(b)
        if a != b:
            if a < b:
                a, b = b, a
            self.parent[a] = b


class Arrangement:
    """One or two multicurves with explicit interleavings on every edge."""

    def __init__(self, tri: IdealTriangulation, families, ordering="a_inner"):
        self.tri = tri
        self.families = [tuple(int(x) for x in f) for f in families]
        if not 1 <= len(self.families) <= 2:
            raise ValueError("an arrangement holds one or two families")
        self.strands = []        # (family, cycle)
        self.strand_family = []
        self._labels = []
        for f, w in enumerate(self.families):
            cycles, labels = trace(tri, w) if any(w) else ([], [[] for _ in w])
            self._labels.append(labels)
            for c in cycles:
                self.strands.append(c)
                self.strand_family.append(f)
        self.family_strands = [
            [i for i, f in enumerate(self.strand_family) if f == fam] for fam in range(len(self.families))
        ]
        self.seq = self._initial_sequences(ordering)
        self._dirty = True

    # -- interleavings ---------------------------------------------------
    def _initial_sequences(self, ordering) -> list:
        tri = self.tri
        seqs = []
        rng = None
        if isinstance(ordering, str) and ordering.startswith("random:"):
            rng = random.Random(int(ordering.split(":", 1)[1]))
        for e in range(tri.num_edges):
            slot = tri.edge_slots[e][0]
            t, s = divmod(slot, 3)
            blocks = []
            for f, w in enumerate(self.families):
                k = corner_counts(tri, w, t)[s]
                n = w[e]
                blocks.append(([(f, q) for q in range(k)], [(f, q) for q in range(k, n)]))
            if len(blocks) == 1:
                seqs.append(blocks[0][0] + blocks[0][1])
                continue
            (a0, a1), (b0, b1) = blocks
            if rng is not None:
                seqs.append(_random_merge(a0 + a1, b0 + b1, rng))
            elif ordering == "a_inner":
                seqs.append(a0 + b0 + b1 + a1)
            elif ordering == "b_inner":
                seqs.append(b0 + a0 + a1 + b1)
            elif ordering == "a_first":
                seqs.append(a0 + a1 + b0 + b1)
            elif ordering == "b_first":
                seqs.append(b0 + b1 + a0 + a1)
            else:
                raise ValueError(f"unknown ordering {ordering!r}")
        return seqs

    def swap(self, e: int, i: int) -> None:
        """Exchange canonical merged positions ``i`` and ``i + 1`` on edge ``e``."""
        s = self.seq[e]
        s[i], s[i + 1] = s[i + 1], s[i]
        self._dirty = True

    # -- derived geometry ------------------------------------------------
    def _build(self) -> None:
        if not self._dirty:
            return
        tri = self.tri
        eos = tri.edge_of_slot
        canon = tri.slot_is_canonical
        m = [len(s) for s in self.seq]
        where = []  # where[f][e][q] -> canonical merged index
        for f, w in enumerate(self.families):
            rows = [[0] * w[e] for e in range(tri.num_edges)]
            for e, sq in enumerate(self.seq):
                for idx, (ff, q) in enumerate(sq):
                    if ff == f:
                        rows[e][q] = idx
            where.append(rows)
        self.m = m
        offsets = []
        for t in range(tri.num_triangles):
            a = m[eos[3 * t]]
            b = m[eos[3 * t + 1]]
            offsets.append((0, a, a + b))
        self.offsets = offsets

        def local(f, slot, q_fam):
            e = eos[slot]
            n_f = self.families[f][e]
            qc = to_canonical(tri, slot, q_fam, n_f)
            idx = where[f][e][qc]
            return idx if canon[slot] else m[e] - 1 - idx

        chords = []
        by_tri = [[] for _ in range(tri.num_triangles)]
        at = {}
        for sid, cyc in enumerate(self.strands):
            f = self.strand_family[sid]
            for j, ch in enumerate(cyc):
                t = ch.t
                li = local(f, 3 * t + ch.side_in, ch.q_in)
                lo = local(f, 3 * t + ch.side_out, ch.q_out)
                off = offsets[t]
                c = ArcChord(t, f, sid, j, ch.side_in, li, ch.side_out, lo, off[ch.side_in] + li, off[ch.side_out] + lo)
                ci = len(chords)
                chords.append(c)
                by_tri[t].append(ci)
                at[(3 * t + ch.side_in, li)] = ci
                at[(3 * t + ch.side_out, lo)] = ci
        self.chords = chords
        self.by_tri = by_tri
        self.at = at
        crossings = []
        for t, cis in enumerate(by_tri):
            fam0 = [ci for ci in cis if chords[ci].family == 0]
            fam1 = [ci for ci in cis if chords[ci].family == 1]
            for i in fam0:
                a = chords[i]
                lo, hi = sorted((a.p_in, a.p_out))
                for j in fam1:
                    b = chords[j]
                    if (lo < b.p_in < hi) != (lo < b.p_out < hi):
                        crossings.append((t, i, j))
        self.crossings = crossings
        self._dirty = False

    def crossing_count(self) -> int:
        self._build()
        return len(self.crossings)

    @staticmethod
    def _cross(a: ArcChord, b: ArcChord) -> bool:
        lo, hi = sorted((a.p_in, a.p_out))
        return (lo < b.p_in < hi) != (lo < b.p_out < hi)

    # -- bigons ----------------------------------------------------------
    def find_bigon(self):
        """Swaps removing one empty bigon, or ``None`` when there is none."""
        self._build()
        for t, i, j in self.crossings:
            a, b = self.chords[i], self.chords[j]
            for ea in ((a.side_in, a.loc_in), (a.side_out, a.loc_out)):
                for eb in ((b.side_in, b.loc_in), (b.side_out, b.loc_out)):
                    if ea[0] != eb[0] or abs(ea[1] - eb[1]) != 1:
                        continue
                    swaps = self._walk_strip(t, i, j, ea, eb)
                    if swaps is not None:
                        return swaps
        return None

    def _walk_strip(self, t, i, j, ea, eb):
        tri = self.tri
        gl = tri.gluing
        eos = tri.edge_of_slot
        canon = tri.slot_is_canonical
        slot = 3 * t + ea[0]
        la, lb = ea[1], eb[1]
        swaps = []
        seen = set()
        while True:
            e = eos[slot]
            lo = min(la, lb)
            ci = lo if canon[slot] else self.m[e] - 2 - lo
            if (e, ci) in seen:
                return None
            seen.add((e, ci))
            swaps.append((e, ci))
            other = gl[slot]
            n = self.m[e]
            la2, lb2 = n - 1 - la, n - 1 - lb
            ca = self.at[(other, la2)]
            cb = self.at[(other, lb2)]
            a, b = self.chords[ca], self.chords[cb]
            if self._cross(a, b):
                if (ca, cb) == (i, j):
                    return None
                return swaps
            u, r = divmod(other, 3)
            na = (a.side_out, a.loc_out) if (a.side_in, a.loc_in) == (r, la2) else (a.side_in, a.loc_in)
            nb = (b.side_out, b.loc_out) if (b.side_in, b.loc_in) == (r, lb2) else (b.side_in, b.loc_in)
            if na[0] != nb[0] or abs(na[1] - nb[1]) != 1:
                return None
            slot = 3 * u + na[0]
            la, lb = na[1], nb[1]

    def reduce(self) -> int:
        """Remove empty bigons until none is left; returns the number removed."""
        removed = 0
        before = self.crossing_count()
        while True:
            swaps = self.find_bigon()
            if swaps is None:
                return removed
            for e, ci in swaps:
                self.swap(e, ci)
            removed += 1
            after = self.crossing_count()
            if after != before - 2:
                raise AssertionError(f"bigon removal changed crossings {before} -> {after}")
            before = after

    # -- faces -----------------------------------------------------------
    def faces(self, separating=None):
        """Faces of the complement of the chords of the ``separating`` families.

        Returns ``(faces, gap_face, region_of)``: ``gap_face`` maps a global gap
        ``(edge, canonical gap index)`` to its face, ``region_of(t, value)``
        gives the face containing boundary position ``value`` of triangle ``t``
        (values are half-integers between merged points).
        """
        self._build()
        tri = self.tri
        eos = tri.edge_of_slot
        canon = tri.slot_is_canonical
        fams = set(range(len(self.families))) if separating is None else set(separating)
        uf = _UnionFind()
        tri_regions = []   # per triangle: {sig: node}
        gap_node = {}      # (e, gcan) -> list of nodes
        slot_gap = [None] * (3 * tri.num_triangles)
        region_tri = []
        corner_node = []
        interior = []
        for t in range(tri.num_triangles):
            spans = self._spans(t, fams)
            regions = {}
            corners = []
            for s in range(3):
                slot = 3 * t + s
                e = eos[slot]
                ms = self.m[e]
                row = []
                for g in range(ms + 1):
                    sig = _signature(spans, 2 * (self.offsets[t][s] + g) - 1)
                    node = regions.get(sig)
                    if node is None:
                        node = uf.add()
                        region_tri.append(t)
                        regions[sig] = node
                    row.append(node)
                    gcan = g if canon[slot] else ms - g
                    gap_node.setdefault((e, gcan), []).append(node)
                slot_gap[slot] = row
                corners.append(row[0])
            tri_regions.append(regions)
            corner_node.append(corners)
            cross_here = sum(
                1 for (tt, i, j) in self.crossings
                if tt == t and self.chords[i].family in fams and self.chords[j].family in fams
            )
            total = 1 + len(spans) + cross_here
            interior.append(total - len(regions))
        for nodes in gap_node.values():
            for x in nodes[1:]:
                uf.union(nodes[0], x)
        stats = {}
        for node in range(len(region_tri)):
            stats.setdefault(uf.find(node), [0, 0, set()])[0] += 1
        for nodes in gap_node.values():
            stats[uf.find(nodes[0])][1] += 1
        for t in range(tri.num_triangles):
            for c in range(3):
                stats[uf.find(corner_node[t][c])][2].add(tri.triangles[t][c])
        roots = sorted(stats)
        index = {r: i for i, r in enumerate(roots)}
        faces = [Face(stats[r][0], stats[r][1], tuple(sorted(stats[r][2]))) for r in roots]
        for t in range(tri.num_triangles):
            for _ in range(interior[t]):
                faces.append(Face(1, 0, (), interior=True))
        gap_face = {key: index[uf.find(nodes[0])] for key, nodes in gap_node.items()}
        self.regions = RegionData(
            region_tri=region_tri,
            region_face=[index[uf.find(n)] for n in range(len(region_tri))],
            slot_gap=slot_gap,
            corner=corner_node,
            tri_regions=tri_regions,
            families=frozenset(fams),
        )

        def region_of(t, value2):
            """Face of doubled boundary position ``value2`` (odd) in triangle ``t``."""
            return self.regions.region_face[self.region_node(t, value2)]

        return faces, gap_face, region_of

    def face_strands(self) -> dict:
        """Strands bounding each (non-interior) face of the last :meth:`faces` call."""
        reg = self.regions
        out = {}
        for c in self.chords:
            if c.family not in reg.families:
                continue
            for v in (2 * c.p_in + 1, 2 * c.p_out + 1):
                out.setdefault(reg.region_face[self.region_node(c.t, v)], set()).add(c.strand)
        return out

    def adjacent_region(self, chord, toward2: int) -> int:
        """Region next to ``chord`` on the side holding doubled position ``toward2``."""
        lo, hi = sorted((chord.p_in, chord.p_out))
        if 2 * lo < toward2 < 2 * hi:
            return self.region_node(chord.t, 2 * lo + 1)
        return self.region_node(chord.t, 2 * hi + 1)

    def _spans(self, t: int, fams) -> list:
        spans = []
        for ci in self.by_tri[t]:
            c = self.chords[ci]
            if c.family in fams:
                spans.append((min(c.p_in, c.p_out), max(c.p_in, c.p_out)))
        return spans

    def region_node(self, t: int, value2: int) -> int:
        """Region (before gluing) containing doubled boundary position ``value2``."""
        sig = _signature(self._spans(t, self.regions.families), value2)
        return self.regions.tri_regions[t][sig]

    def strand_orientation(self, sid: int) -> int:
        """+1 if the traced direction of strand ``sid`` is its canonical one.

        Canonical direction: at the lowest point of the curve on its first
        edge of positive weight, the curve enters the canonical triangle.
        This depends on the curve alone, not on the other components around it.
        """
        self._build()
        w = self.strand_weights(sid)
        e0 = next(e for e, x in enumerate(w) if x)
        slot0 = self.tri.edge_slots[e0][0]
        t0, s0 = divmod(slot0, 3)
        best = None
        for ci in self.by_tri[t0]:
            c = self.chords[ci]
            if c.strand != sid:
                continue
            if c.side_in == s0 and (best is None or c.loc_in < best[0]):
                best = (c.loc_in, 1)
            if c.side_out == s0 and (best is None or c.loc_out < best[0]):
                best = (c.loc_out, -1)
        return best[1]

    def strand_sides(self, sid: int, region_of) -> tuple:
        """(face on the left, face on the right) of strand ``sid``, canonically oriented."""
        self._build()
        for c in self.chords:
            if c.strand == sid and c.index == 0:
                left, right = region_of(c.t, 2 * c.p_out + 1), region_of(c.t, 2 * c.p_in + 1)
                if self.strand_orientation(sid) < 0:
                    left, right = right, left
                return left, right
        raise KeyError(sid)

    def strand_weights(self, sid: int) -> tuple:
        w = [0] * self.tri.num_edges
        for ch in self.strands[sid]:
            w[self.tri.edge_of_slot[3 * ch.t + ch.side_out]] += 1
        return tuple(w)


@dataclass
class RegionData:
    """Regions of triangles cut by chords, before gluing across edges.

    ``slot_gap[slot][g]`` is the region at local gap ``g`` of a side, and
    ``corner[t][c]`` the region touching corner ``c``.
    """

    region_tri: list
    region_face: list
    slot_gap: list
    corner: list
    tri_regions: list
    families: frozenset


def _signature(spans, value2: int) -> int:
    sig = 0
    for k, (lo, hi) in enumerate(spans):
        if 2 * lo < value2 < 2 * hi:
            sig |= 1 << k
    return sig


def _random_merge(xs, ys, rng) -> list:
    out = []
    i = j = 0
    while i < len(xs) or j < len(ys):
        if j == len(ys) or (i < len(xs) and rng.random() < 0.5):
            out.append(xs[i])
            i += 1
        else:
            out.append(ys[j])
            j += 1
    return out
