"""Curve graphs over a finite universe: spheres, distances, connectivity, fillings."""

from __future__ import annotations

import json
import logging
import math
from collections import deque
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .classify import Classifier
from .curves import Hole, RegionChart, face_candidates
from .disk import LabeledDisk
from .intersection import disjoint, fills, minimal_overlay
from .surface import make_surface
from .universe import CurveUniverse

log = logging.getLogger(__name__)


class GraphError(ValueError):
    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


class InvariantViolation(AssertionError):
    """An internal cross-check failed; results cannot be trusted."""


class EdgeRule(str, Enum):
    DISJOINT = "disjoint"
    C0 = "c0"
    GOOD_EDGE = "good"


def _rule(rule) -> EdgeRule:
    if isinstance(rule, EdgeRule):
        return rule
    key = str(rule).lower()
    for r in EdgeRule:
        if key in (r.value, r.name.lower()):
            return r
    raise GraphError("BAD_RULE", f"unknown edge rule {rule!r}")


class CurveGraph:
    """Graph on the curves of a universe under one edge rule."""

    def __init__(self, universe: CurveUniverse, rule: EdgeRule, matrix: np.ndarray, farey: bool = False):
        self.universe = universe
        self.rule = rule
        self.matrix = matrix
        self.farey = farey
        if matrix.shape != (len(universe), len(universe)):
            raise InvariantViolation("adjacency has the wrong shape")
        if (matrix != matrix.T).any() or matrix.diagonal().any():
            raise InvariantViolation("adjacency must be symmetric and irreflexive")
        self.adj = [tuple(np.flatnonzero(row).tolist()) for row in matrix]

    def __len__(self) -> int:
        return len(self.universe)

    @property
    def tri(self):
        return self.universe.tri

    def index_of(self, c) -> int:
        if isinstance(c, (int, np.integer)):
            return int(c)
        i = self.universe.index.get(tuple(c))
        if i is None:
            raise GraphError("ORIGIN_MISSING", f"curve {tuple(c)} is not in the universe")
        return i

    def curve(self, i: int) -> tuple:
        return self.universe.curves[i]

    def neighbors(self, i: int) -> tuple:
        return self.adj[i]

    def has_edge(self, i: int, j: int) -> bool:
        return bool(self.matrix[i, j])

    def edges(self) -> list:
        return [(i, j) for i in range(len(self)) for j in self.adj[i] if i < j]

    @property
    def num_edges(self) -> int:
        return int(self.matrix.sum()) // 2

    def bfs(self, origin: int) -> np.ndarray:
        """Graph distance from ``origin``; -1 for unreachable vertices."""
        memo = self.__dict__.setdefault("_bfs_memo", {})
        if origin not in memo:
            memo[origin] = self._bfs(origin)
        return memo[origin].copy()

    def _bfs(self, origin: int) -> np.ndarray:
        dist = np.full(len(self), -1, dtype=np.int64)
        dist[origin] = 0
        q = deque([origin])
        while q:
            v = q.popleft()
            for w in self.adj[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    q.append(w)
        return dist

    def induced(self, vertices) -> list:
        vs = set(vertices)
        return [(i, j) for i in sorted(vs) for j in self.adj[i] if i < j and j in vs]

    # -- export ------------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "rule": self.rule.value,
            "farey": self.farey,
            "surface": [self.universe.genus, self.universe.punctures],
            "W": self.universe.W,
            "universe": self.universe.fingerprint,
            "vertices": [list(c) for c in self.universe.curves],
            "adjacency": [list(a) for a in self.adj],
        }

    def to_dot(self, vertices=None, layer=None) -> str:
        vs = range(len(self)) if vertices is None else sorted(vertices)
        lines = [f"graph curves_{self.rule.value} {{"]
        for v in vs:
            lab = ",".join(map(str, self.curve(v)))
            extra = f", layer_index={int(layer[v])}" if layer is not None else ""
            lines.append(f'  c{v} [label="{lab}"{extra}];')
        for i, j in (self.edges() if vertices is None else self.induced(vertices)):
            lines.append(f"  c{i} -- c{j};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_graph(u: CurveUniverse, rule="disjoint", jobs: int = 1, classifier: Classifier = None) -> CurveGraph:
    """Adjacency under ``rule``.

    On surfaces of complexity 1 no two distinct curves are disjoint; there the
    DISJOINT rule uses the usual Farey convention (minimal intersection, 1 on
    the once-punctured torus and 2 on the four-punctured sphere).
    """
    rule = _rule(rule)
    N = len(u)
    if N == 0:
        return CurveGraph(u, rule, np.zeros((0, 0), dtype=bool))
    xi = make_surface(u.genus, u.punctures).xi
    if xi == 1 and rule is EdgeRule.DISJOINT:
        M = u.intersection_matrix(jobs)
        A = M == (1 if u.genus == 1 else 2)
        np.fill_diagonal(A, False)
        return CurveGraph(u, rule, A, farey=True)
    A = u.disjointness(jobs)
    if rule is EdgeRule.DISJOINT:
        return CurveGraph(u, rule, A)
    cl = classifier or Classifier(u.tri)
    curves = u.curves
    if rule is EdgeRule.C0:
        ok = [cl.is_essentially_nonseparating(c) for c in curves]
    else:
        ok = [bool(cl.is_good_simplex([c])) for c in curves]
    B = np.zeros_like(A)
    for i in range(N):
        if not ok[i]:
            continue
        for j in np.flatnonzero(A[i]):
            if j <= i or not ok[j]:
                continue
            if rule is EdgeRule.C0:
                e = cl.c0_edge(curves[i], curves[j])
            else:
                e = bool(cl.is_good_simplex([curves[i], curves[j]]))
            B[i, j] = B[j, i] = e
    return CurveGraph(u, rule, B)


# -- spheres ---------------------------------------------------------------
@dataclass
class SphereSlice:
    origin: tuple
    r: int
    vertices: list
    edges: list

    def to_dict(self) -> dict:
        return {"origin": list(self.origin), "r": self.r, "vertices": self.vertices,
                "edges": [list(e) for e in self.edges]}


def sphere(g: CurveGraph, o, r: int) -> SphereSlice:
    i = g.index_of(o)
    dist = g.bfs(i)
    verts = np.flatnonzero(dist == r).tolist()
    return SphereSlice(g.curve(i), r, verts, g.induced(verts))


def layers(g: CurveGraph, o) -> np.ndarray:
    return g.bfs(g.index_of(o))


# -- distances -------------------------------------------------------------
@dataclass
class DistanceEstimate:
    lower: int
    upper: int = None            # None means UNBOUNDED
    exact: bool = False
    witness: tuple = None        # common neighbour certifying distance 2
    infinite: bool = False       # a subsurface projection was empty

    def __post_init__(self):
        if self.upper is not None and self.lower > self.upper:
            raise InvariantViolation(f"distance bounds cross: {self.lower} > {self.upper}")
        if self.exact and self.lower != self.upper:
            raise InvariantViolation("exact distance with unequal bounds")

    def to_dict(self) -> dict:
        return {"lower": self.lower, "upper": "UNBOUNDED" if self.upper is None else self.upper,
                "exact": self.exact, "infinite": self.infinite,
                "witness": list(self.witness) if self.witness else None}


def common_neighbor_witness(tri, x, y):
    """A curve disjoint from both ``x`` and ``y``, read off a complement face.

    Faces of the minimal overlay that are neither disks nor once-punctured
    disks carry an essential curve: one around two of their punctures or a
    cycle of the face.  Fundamental cycles are tried on every face before
    the slower scan over all simple cycles.  ``None`` when the pair fills.
    """
    x, y = tuple(x), tuple(y)
    ov = minimal_overlay(tri, x, y)
    arr = ov.arrangement
    charts = [RegionChart(tri, arr, f) for f, face in enumerate(ov.faces)
              if not face.interior and not (face.euler_filled == 1 and len(face.punctures) <= 1)]
    for thorough in (False, True):
        for chart in charts:
            for w in face_candidates(chart, thorough):
                if w not in (x, y) and disjoint(tri, w, x) and disjoint(tri, w, y):
                    return w
    return None


def distance_estimate(x, y, g: CurveGraph) -> DistanceEstimate:
    """Curve-complex distance between two universe curves, with honest bounds."""
    tri = g.tri
    x, y = tuple(x), tuple(y)
    i, j = g.index_of(x), g.index_of(y)
    if x == y:
        return DistanceEstimate(0, 0, True)
    if g.farey:
        if g.has_edge(i, j):
            return DistanceEstimate(1, 1, True)
        d = int(g.bfs(i)[j])
        return DistanceEstimate(2, d if d >= 0 else None, d == 2)
    if disjoint(tri, x, y):
        return DistanceEstimate(1, 1, True)
    d = int(g.bfs(i)[j]) if g.rule is EdgeRule.DISJOINT else -1
    upper = d if d >= 0 else None
    if not fills(tri, x, y):
        w = common_neighbor_witness(tri, x, y)
        if w is None:
            raise InvariantViolation(f"non-filling pair without a complement curve: {x}, {y}")
        return DistanceEstimate(2, 2, True, witness=w)
    if upper is not None and upper < 3:
        raise InvariantViolation(f"filling pair at universe distance {upper}: {x}, {y}")
    return DistanceEstimate(3, upper, upper == 3)


def log2_bound(i: int) -> float:
    """The combinatorial distance bound ``2 log2 i + 2``."""
    return 2 * math.log2(i) + 2


# -- connectivity and homology ---------------------------------------------
def connected_components(g: CurveGraph, vertices=None) -> list:
    """Components of the induced subgraph, each sorted, ordered by least vertex."""
    vs = sorted(range(len(g)) if vertices is None else set(vertices))
    parent = {v: v for v in vs}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a, b in g.induced(vs) if vertices is not None else g.edges():
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    groups = {}
    for v in vs:
        groups.setdefault(find(v), []).append(v)
    return sorted(groups.values(), key=lambda c: c[0])


def flag_complex(vertices, edges):
    """(vertices, edges, triangles) of the flag 2-complex of a graph."""
    vs = sorted(set(vertices))
    es = sorted({(min(a, b), max(a, b)) for a, b in edges})
    nb = {v: set() for v in vs}
    for a, b in es:
        nb[a].add(b)
        nb[b].add(a)
    tris = []
    for a, b in es:
        for c in sorted(nb[a] & nb[b]):
            if c > b:
                tris.append((a, b, c))
    return vs, es, tris


def _rank_gf2(columns) -> int:
    """Rank over the field with two elements of bitmask columns."""
    pivots = {}
    rank = 0
    for col in columns:
        v = col
        while v:
            top = v.bit_length() - 1
            p = pivots.get(top)
            if p is None:
                pivots[top] = v
                rank += 1
                break
            v ^= p
    return rank


def h1_rank_mod2(vertices, edges) -> int:
    """First Betti number mod 2 of the flag 2-complex of the graph."""
    vs, es, tris = flag_complex(vertices, edges)
    vindex = {v: k for k, v in enumerate(vs)}
    eindex = {e: k for k, e in enumerate(es)}
    rank1 = _rank_gf2((1 << vindex[a]) | (1 << vindex[b]) for a, b in es)
    rank2 = _rank_gf2(
        (1 << eindex[(a, b)]) | (1 << eindex[(a, c)]) | (1 << eindex[(b, c)]) for a, b, c in tris
    )
    return len(es) - rank1 - rank2


def graph_h1(g: CurveGraph, vertices) -> int:
    vs = sorted(set(vertices))
    return h1_rank_mod2(vs, g.induced(vs))


# -- disk filling ------------------------------------------------------------
@dataclass
class FillResult:
    disk: LabeledDisk = None
    status: str = "UNKNOWN"          # FILLED or UNKNOWN
    faces_tried: int = 0
    nodes: int = 0

    def __bool__(self) -> bool:
        return self.disk is not None


def _check_loop(g: CurveGraph, loop) -> list:
    idx = [g.index_of(c) for c in loop]
    if len(idx) < 3 or len(set(idx)) != len(idx):
        raise GraphError("INVALID_LOOP", "a loop needs at least three distinct vertices")
    for k in range(len(idx)):
        a, b = idx[k], idx[(k + 1) % len(idx)]
        if not g.has_edge(a, b):
            raise GraphError("INVALID_LOOP", f"{g.curve(a)} and {g.curve(b)} are not adjacent")
    return idx


def fill_loop(g: CurveGraph, loop, allowed=None, area_budget: int = 8, node_budget: int = 200_000,
              forbidden=()) -> FillResult:
    """Search for an embedded disk bounded by ``loop``.

    Disks are grown inward from the loop by two moves: cutting off an ear
    (two frontier neighbours already adjacent) or attaching a triangle on a
    frontier edge with a fresh allowed vertex.  Iterative deepening on the
    face count finds a smallest disk reachable this way.  Exhaustion returns
    UNKNOWN, never a proof that no disk exists.  ``allowed`` is a predicate
    on vertex indices of ``g`` for new interior vertices.  ``forbidden`` lists edges
    (pairs of curves or indices) the disk must not use, e.g. edges already
    present in a disk it will be glued into.
    """
    idx = _check_loop(g, loop)
    allowed = allowed or (lambda v: True)
    adj = [set(a) for a in g.adj]
    result = FillResult()
    state = {"nodes": 0}

    def edge(a, b):
        return (a, b) if a < b else (b, a)

    def search(frontier, used, edges, faces, budget):
        state["nodes"] += 1
        if state["nodes"] > node_budget:
            return None
        L = len(frontier)
        if len(faces) + L - 2 > budget:
            return None
        if L == 3:
            a, b, c = frontier
            if c in adj[a] and frozenset(frontier) not in {frozenset(f) for f in faces}:
                return faces + [(a, b, c)]
            return None
        for k in range(L):
            a, b, c = frontier[k - 1], frontier[k], frontier[(k + 1) % L]
            if c in adj[a] and edge(a, c) not in edges:
                nf = frontier[:k] + frontier[k + 1:]
                got = search(nf, used, edges | {edge(a, c)}, faces + [(a, b, c)], budget)
                if got is not None:
                    return got
        if len(faces) + 1 + L - 1 > budget:
            return None
        for k in range(L):
            a, b = frontier[k], frontier[(k + 1) % L]
            for w in sorted(adj[a] & adj[b]):
                if w in used or not allowed(w):
                    continue
                nf = frontier[:k + 1] + [w] + frontier[k + 1:]
                got = search(nf, used | {w}, edges | {edge(a, w), edge(b, w)}, faces + [(a, w, b)], budget)
                if got is not None:
                    return got
        return None

    start_edges = {edge(idx[k], idx[(k + 1) % len(idx)]) for k in range(len(idx))}
    start_edges |= {edge(g.index_of(a), g.index_of(b)) for a, b in forbidden}
    for budget in range(max(1, len(idx) - 2), area_budget + 1):
        result.faces_tried = budget
        faces = search(list(idx), set(idx), start_edges, [], budget)
        if faces is not None:
            verts = sorted({v for f in faces for v in f})
            local = {v: k for k, v in enumerate(verts)}
            result.disk = LabeledDisk(
                [g.curve(v) for v in verts],
                [tuple(local[v] for v in f) for f in faces],
                [local[v] for v in idx],
            )
            result.status = "FILLED"
            break
        if state["nodes"] > node_budget:
            break
    result.nodes = state["nodes"]
    return result


def random_loops(g: CurveGraph, vertices, count: int, rng, max_len: int = 6, tries: int = 200) -> list:
    """Embedded edge loops of the induced subgraph, by self-avoiding random walks.

    A walk from a random vertex closes as soon as it reaches a neighbour of
    its start; loops are vertex index lists, without repeats.
    """
    verts = sorted(set(vertices))
    inside = set(verts)
    out = []
    seen = set()
    for _ in range(tries * max(1, count)):
        if len(out) >= count or not verts:
            break
        start = verts[rng.randrange(len(verts))]
        walk = [start]
        while len(walk) < max_len:
            nbrs = [w for w in g.neighbors(walk[-1]) if w in inside and w not in walk]
            if not nbrs:
                break
            walk.append(nbrs[rng.randrange(len(nbrs))])
            if len(walk) >= 3 and g.has_edge(walk[-1], start):
                key = frozenset(walk)
                if key not in seen:
                    seen.add(key)
                    out.append(walk)
                break
    return out


# -- census ------------------------------------------------------------------
def sphere_census(g: CurveGraph, o, radii) -> dict:
    """Per-radius and consecutive-union rows: counts, components, mod 2 H1 rank."""
    i = g.index_of(o)
    dist = g.bfs(i)
    rows = []
    unions = []
    for r in radii:
        vs = np.flatnonzero(dist == r).tolist()
        comps = connected_components(g, vs)
        rows.append({"r": r, "vertices": len(vs), "edges": len(g.induced(vs)),
                     "components": len(comps), "component_sizes": [len(c) for c in comps],
                     "h1_rank_mod2": graph_h1(g, vs) if vs else 0})
        ws = np.flatnonzero((dist == r) | (dist == r + 1)).tolist()
        comps = connected_components(g, ws)
        unions.append({"r": r, "layers": [r, r + 1], "vertices": len(ws), "edges": len(g.induced(ws)),
                       "components": len(comps), "component_sizes": [len(c) for c in comps],
                       "h1_rank_mod2": graph_h1(g, ws) if ws else 0})
    return {"origin": list(g.curve(i)), "reachable": int((dist >= 0).sum()),
            "unreachable": int((dist < 0).sum()), "spheres": rows, "unions": unions}


__all__ = [
    "EdgeRule",
    "GraphError",
    "InvariantViolation",
    "CurveGraph",
    "build_graph",
    "SphereSlice",
    "sphere",
    "layers",
    "DistanceEstimate",
    "common_neighbor_witness",
    "distance_estimate",
    "log2_bound",
    "connected_components",
    "flag_complex",
    "h1_rank_mod2",
    "graph_h1",
    "FillResult",
    "fill_loop",
    "random_loops",
    "sphere_census",
]
