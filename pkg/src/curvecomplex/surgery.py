"""Constructive moves on curve-labeled disks, each verified before it is reported.

Every operation returns a :class:`SurgeryOutcome`.  Witnesses are searched
for in two stages: first the explicit constructions (non-separating curves
around a genus, pants curves around two punctures, curves from arcs between
ends of a cut component), then a scan of the universe in its sorted order.
A SUCCESS is only ever built from a verification record in which every
postcondition was re-checked independently (fresh cuts, intersection numbers
computed without the disjointness shortcut).

Layers ``S_r`` are always breadth-first layers of the finite universe graph
around the origin, so witnesses must themselves be universe curves.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations

import numpy as np

from .classify import Classifier, Region, _key
from .curvegraph import CurveGraph, EdgeRule, GraphError, InvariantViolation, fill_loop, random_loops
from .curves import Hole, SubsurfaceChart, locate
from .disk import (AnnulusProfile, DiskConstraints, DiskViolation, LabeledDisk,
                   annulus_profile, verify_disk)
from .intersection import CutError, cut_along, intersection_number

log = logging.getLogger(__name__)


class Status(str, Enum):
    SUCCESS = "SUCCESS"
    PRECONDITION_UNMET = "PRECONDITION_UNMET"
    UNIVERSE_EXHAUSTED = "UNIVERSE_EXHAUSTED"


def _jsonable(x):
    if isinstance(x, (LabeledDisk, AnnulusProfile, SurgeryOutcome, DiskViolation)):
        return x.to_dict()
    if isinstance(x, Enum):
        return x.value
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


@dataclass
class SurgeryOutcome:
    """Result of one surgery call, with its verification record and diagnostics."""

    op: str
    status: Status
    witness: object = None
    verification: dict = field(default_factory=dict)
    branch: str = ""
    inputs: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)
    universe: str = None

    def __post_init__(self):
        self.status = Status(self.status)
        if self.status is Status.SUCCESS:
            failed = [k for k, ok in self.verification.items() if not ok]
            if not self.verification or failed:
                raise InvariantViolation(f"{self.op}: SUCCESS with failed checks {failed}")

    def __bool__(self) -> bool:
        return self.status is Status.SUCCESS

    def to_dict(self) -> dict:
        return {
            "op": self.op,
            "status": self.status.value,
            "branch": self.branch,
            "inputs": _jsonable(self.inputs),
            "witness": _jsonable(self.witness),
            "verification": {k: bool(v) for k, v in self.verification.items()},
            "diagnostics": _jsonable(self.diagnostics),
            "universe": self.universe,
        }


# -- context -----------------------------------------------------------------
class Checker:
    """Independent re-verification: a fresh classifier and full intersection numbers."""

    def __init__(self, tri):
        self.tri = tri
        self.cl = Classifier(tri)

    def disjoint(self, a, b) -> bool:
        a, b = tuple(a), tuple(b)
        return a != b and intersection_number(self.tri, a, b, shortcut=False) == 0

    def good(self, *curves) -> bool:
        try:
            return self.cl.is_good(*curves)
        except CutError:
            return False


class SurgeryContext:
    """A universe's disjointness graph, its BFS layers around an origin, and classifiers."""

    def __init__(self, graph: CurveGraph, origin, classifier: Classifier = None):
        if graph.rule is not EdgeRule.DISJOINT or graph.farey:
            raise GraphError("BAD_RULE", "surgery needs the disjointness graph of a surface with complexity at least 2")
        self.graph = graph
        self.universe = graph.universe
        self.tri = graph.tri
        oi = graph.index_of(origin)
        self.origin = graph.curve(oi)
        self.dist = graph.bfs(oi)
        self.cl = classifier or Classifier(self.tri)
        self.checker = Checker(self.tri)
        self.fingerprint = self.universe.fingerprint

    def index(self, c):
        return self.universe.index.get(tuple(c))

    def curve(self, i: int) -> tuple:
        return self.universe.curves[i]

    def layer(self, c):
        i = self.index(c)
        if i is None or self.dist[i] < 0:
            return None
        return int(self.dist[i])

    def adjacent(self, a, b) -> bool:
        i, j = self.index(a), self.index(b)
        return i is not None and j is not None and self.graph.has_edge(i, j)

    def common_neighbors(self, curves, layers=None) -> list:
        idx = [self.index(c) for c in curves]
        mask = np.all(self.graph.matrix[idx], axis=0)
        if layers is not None:
            mask &= np.isin(self.dist, list(layers))
        return np.flatnonzero(mask).tolist()

    def good(self, *curves) -> bool:
        try:
            return self.cl.is_good(*curves)
        except CutError:
            return False

    def layer_of(self, c):
        return self.layer(c)


def context(U, o) -> SurgeryContext:
    """Reuse a context for (graph, origin) or build one."""
    if isinstance(U, SurgeryContext):
        if o is not None and U.origin != tuple(o):
            raise GraphError("ORIGIN_MISMATCH", "context was built for a different origin")
        return U
    cache = U.__dict__.setdefault("_surgery_contexts", {})
    key = tuple(U.curve(U.index_of(o)))
    if key not in cache:
        cache[key] = SurgeryContext(U, key)
    return cache[key]


def _curves(*cs):
    return [tuple(int(v) for v in c) for c in cs]


def _require(ctx: SurgeryContext, layers: dict) -> list:
    """Unmet layer/universe requirements, as human-readable strings."""
    out = []
    for name, (c, allowed) in layers.items():
        k = ctx.layer(c)
        if ctx.index(c) is None:
            out.append(f"{name} is not a universe curve")
        elif k not in allowed:
            out.append(f"{name} lies in S_{k}, expected one of {sorted(allowed)}")
    return out


def _record(ctx: SurgeryContext, layers=(), disjoint=(), good=(), distinct=()) -> dict:
    """Verification record re-checked with the independent checker."""
    ch = ctx.checker
    rec = {}
    for name, c, allowed in layers:
        rec[f"{name} in S{sorted(allowed)}"] = ctx.layer(c) in allowed
    for a, b in disjoint:
        rec[f"disjoint {_short(a)} {_short(b)}"] = ch.disjoint(a, b)
    for simplex in good:
        rec[f"good {' '.join(_short(c) for c in simplex)}"] = ch.good(*simplex)
    for name, cs in distinct:
        rec[f"distinct {name}"] = len(set(map(tuple, cs))) == len(cs)
    return rec


def _short(c) -> str:
    return "(" + ",".join(map(str, c)) + ")"


# -- explicit constructions ----------------------------------------------------
def _nonseparating_in(tri, X, c) -> bool:
    return len(cut_along(tri, list(X) + [c]).components) == len(cut_along(tri, list(X)).components)


def constructions(tri, X, component: int, kinds=("nonseparating", "pants", "arc"), arc_from=None) -> list:
    """Curves built inside one component of the cut along ``X``, as (kind, curve).

    ``nonseparating``: fundamental cycles of the component's region graph that
    do not separate it; ``pants``: band sums around two punctures; ``arc``:
    band sums along an arc joining a boundary to another end.  ``arc_from``
    restricts arcs to start on boundaries coming from the given indices of X.
    """
    X = _key(X)
    chart = SubsurfaceChart(tri, X, component=component)
    comp = chart.component
    holes = chart.holes()
    punct = [h for h in holes if h.kind == "puncture"]
    bnd = [h for h in holes if h.kind == "boundary"]
    found = []
    for kind in kinds:
        if kind == "nonseparating" and comp.h > 0:
            for c in chart.cycle_curves():
                if c not in X and _nonseparating_in(tri, X, c):
                    found.append((kind, c))
        elif kind == "pants":
            for h1, h2 in combinations(punct, 2):
                found.append((kind, chart.band_sum(h1, h2)))
        elif kind == "arc":
            starts = [h for h in bnd if arc_from is None or h.index in arc_from]
            for h1 in starts:
                for h2 in punct + bnd:
                    if h2 != h1:
                        found.append((kind, chart.band_sum(h1, h2)))
    out = []
    seen = set()
    for kind, c in found:
        if c is None or c in seen or c in X:
            continue
        seen.add(c)
        out.append((kind, c))
    return out


def _ordered_kinds(comp, proof_order) -> tuple:
    rest = [k for k in ("nonseparating", "pants", "arc") if k not in proof_order]
    return tuple(proof_order) + tuple(rest)


# -- curve-level lemmas on a 2-boundary component --------------------------------
def _component(cl: Classifier, V: Region):
    return cl.region_component(V)


def find_good_edge_partner(a, V: Region, cl: Classifier) -> SurgeryOutcome:
    """A curve a' of V with (a, a') a good edge of the ambient surface.

    V is component ``V.index`` of the cut along ``V.X`` and must have two
    boundary circles and complexity at least 3; ``a`` must be a good curve of V.
    """
    (a,) = _curves(a)
    tri = cl.tri
    inputs = {"a": a, "V": {"X": V.X, "index": V.index}}
    comp = _component(cl, V)

    def out(status, **kw):
        return SurgeryOutcome("find_good_edge_partner", status, inputs=inputs, **kw)

    unmet = []
    if comp.boundaries != 2:
        unmet.append(f"V has {comp.boundaries} boundaries, expected 2")
    if comp.xi < 3:
        unmet.append(f"complexity of V is {comp.xi} < 3")
    if not unmet and not cl.inside(V, a):
        unmet.append("a is not a curve of V")
    if not unmet and not cl.is_good(a):
        unmet.append("a is not good")
    if unmet:
        return out(Status.PRECONDITION_UNMET, diagnostics={"unmet": unmet})

    members, cs, idx = cl.pieces(V, [a])
    Xa = cs.curves
    ja = idx[a]
    non_pants = [k for k in members if not cs.components[k].is_pants]
    plan = []
    for k in non_pants:
        piece = cs.components[k]
        b_bar = piece.boundaries
        if piece.h > 0:
            plan.append(("genus", k, ("nonseparating",), None))
        elif piece.m >= 2:
            plan.append(("pants", k, ("pants",), None))
        elif b_bar >= 4:
            plan.append(("arc", k, ("arc",), {ja}))
    fallback = [("fallback", k, ("nonseparating", "pants", "arc"), None) for k in members]
    tried = []
    for branch, k, kinds, arc_from in plan + fallback:
        for kind, c in constructions(tri, Xa, k, kinds, arc_from):
            ok = c != a and cl.inside(V, c) and cl.is_good(a, c)
            tried.append({"branch": branch, "kind": kind, "curve": c, "accepted": ok})
            if ok:
                rec = {"a' is a curve of V": Checker(tri).cl.inside(V, c)}
                rec.update(_record_plain(tri, disjoint=[(a, c)], good=[(a, c)]))
                return out(Status.SUCCESS, witness=c, branch=f"{branch}:{kind}", verification=rec,
                           diagnostics={"tried": tried, "piece": list(cs.components[k].signature())})
    return out(Status.UNIVERSE_EXHAUSTED, diagnostics={"tried": tried, "reason": "every construction failed verification"})


def _record_plain(tri, disjoint=(), good=()) -> dict:
    ch = Checker(tri)
    rec = {}
    for a, b in disjoint:
        rec[f"disjoint {_short(a)} {_short(b)}"] = ch.disjoint(a, b)
    for simplex in good:
        rec[f"good {' '.join(_short(c) for c in simplex)}"] = ch.good(*simplex)
    return rec


def _is_pants(cl, c) -> bool:
    return cl.is_pants_curve(c)


def find_good_triangle_apex(a, b, V: Region, cl: Classifier) -> SurgeryOutcome:
    """A curve c of V making (a, b, c) a good triangle.

    V must have two boundary circles and complexity at least 6, and (a, b)
    must be a good edge of curves of V.
    """
    a, b = _curves(a, b)
    tri = cl.tri
    inputs = {"a": a, "b": b, "V": {"X": V.X, "index": V.index}}
    comp = _component(cl, V)

    def out(status, **kw):
        return SurgeryOutcome("find_good_triangle_apex", status, inputs=inputs, **kw)

    unmet = []
    if comp.boundaries != 2:
        unmet.append(f"V has {comp.boundaries} boundaries, expected 2")
    if comp.xi < 6:
        unmet.append(f"complexity of V is {comp.xi} < 6")
    if not unmet:
        if a == b or not (cl.inside(V, a) and cl.inside(V, b)):
            unmet.append("a and b must be distinct curves of V")
        elif not Checker(tri).disjoint(a, b) or not cl.is_good(a, b):
            unmet.append("(a, b) is not a good edge")
    if unmet:
        return out(Status.PRECONDITION_UNMET, diagnostics={"unmet": unmet})

    h = comp.h
    pa, pb = _is_pants(cl, a), _is_pants(cl, b)
    genus_case = h > 2 or (h == 1 and pa and pb) or (h == 2 and (pa or pb))
    kinds = ("nonseparating", "pants", "arc") if genus_case else ("pants", "nonseparating", "arc")
    case = "genus" if genus_case else ("planar" if h == 0 else "pants")
    members, cs, idx = cl.pieces(V, [a, b])
    order = sorted(members, key=lambda k: (cs.components[k].is_pants, -cs.components[k].xi, k))
    tried = []
    for kind in kinds:
        for k in order:
            for _, c in constructions(tri, cs.curves, k, (kind,)):
                ok = c not in (a, b) and cl.inside(V, c) and cl.is_good(a, b, c)
                tried.append({"kind": kind, "piece": k, "curve": c, "accepted": ok})
                if ok:
                    rec = {"c is a curve of V": Checker(tri).cl.inside(V, c)}
                    rec.update(_record_plain(tri, disjoint=[(a, c), (b, c)], good=[(a, b, c)]))
                    return out(Status.SUCCESS, witness=c, branch=f"{case}:{kind}", verification=rec,
                               diagnostics={"tried": tried, "V": list(comp.signature())})
    return out(Status.UNIVERSE_EXHAUSTED, diagnostics={"tried": tried, "reason": "every construction failed verification"})


# -- layer-based moves -----------------------------------------------------------
def _outcome(op, ctx, inputs):
    def make(status, **kw):
        return SurgeryOutcome(op, status, inputs=inputs, universe=ctx.fingerprint, **kw)
    return make


def _triangle_unmet(ctx, x, y, z) -> list:
    out = []
    for p, q in ((x, y), (x, z), (y, z)):
        if not ctx.adjacent(p, q):
            out.append(f"{_short(p)} and {_short(q)} are not disjoint distinct curves")
    return out


def find_tetra_apex(x, y, z, o, r: int, U, avoid=()) -> SurgeryOutcome:
    """w in S_{r+1} with (w, x, y, z) a tetrahedron whose faces are all good."""
    ctx = context(U, o)
    x, y, z = _curves(x, y, z)
    out = _outcome("find_tetra_apex", ctx, {"x": x, "y": y, "z": z, "r": r})
    unmet = _require(ctx, {"x": (x, {r}), "y": (y, {r, r + 1}), "z": (z, {r, r + 1})})
    unmet = unmet or _triangle_unmet(ctx, x, y, z)
    if not unmet and not ctx.good(x, y, z):
        unmet.append("(x, y, z) is not a good triangle")
    if unmet:
        return out(Status.PRECONDITION_UNMET, diagnostics={"unmet": unmet})
    avoid = set(_curves(*avoid)) | {x, y, z}

    def verify(w):
        return _record(ctx, layers=[("w", w, {r + 1})],
                       disjoint=[(w, x), (w, y), (w, z)],
                       good=[(w, x, y), (w, x, z), (w, y, z), (x, y, z)])

    def acceptable(w):
        return (w not in avoid and ctx.layer(w) == r + 1 and ctx.adjacent(w, x) and ctx.adjacent(w, y)
                and ctx.adjacent(w, z) and ctx.good(w, x, y) and ctx.good(w, x, z) and ctx.good(w, y, z))

    k = ctx.cl.unique_non_pants_index([x, y, z])
    tried = []
    for kind, w in constructions(ctx.tri, [x, y, z], k):
        ok = acceptable(w)
        tried.append({"kind": kind, "curve": w, "layer": ctx.layer(w), "accepted": ok})
        if ok:
            return out(Status.SUCCESS, witness=w, branch=f"construction:{kind}", verification=verify(w),
                       diagnostics={"tried": tried})
    scanned = 0
    for i in ctx.common_neighbors([x, y, z], layers=[r + 1]):
        w = ctx.curve(i)
        scanned += 1
        if acceptable(w):
            return out(Status.SUCCESS, witness=w, branch="universe-scan", verification=verify(w),
                       diagnostics={"tried": tried, "scanned": scanned})
    return out(Status.UNIVERSE_EXHAUSTED, diagnostics={"tried": tried, "scanned": scanned,
                                                       "reason": f"no universe curve in S_{r + 1} completes a good tetrahedron"})


def fix_bad_triangle(x, y, z, o, r: int, U, avoid=()) -> SurgeryOutcome:
    """a in S_r or S_{r+1} making (a,x,y), (a,x,z), (a,y,z) good; a in S_1 when x = o."""
    ctx = context(U, o)
    x, y, z = _curves(x, y, z)
    out = _outcome("fix_bad_triangle", ctx, {"x": x, "y": y, "z": z, "r": r})
    unmet = _require(ctx, {"x": (x, {r}), "y": (y, {r, r + 1}), "z": (z, {r, r + 1})})
    unmet = unmet or _triangle_unmet(ctx, x, y, z)
    if not unmet:
        for p, q in ((x, y), (x, z), (y, z)):
            if not ctx.good(p, q):
                unmet.append(f"edge {_short(p)} {_short(q)} is not good")
        if not unmet and ctx.good(x, y, z):
            unmet.append("(x, y, z) is already a good triangle")
    if unmet:
        return out(Status.PRECONDITION_UNMET, diagnostics={"unmet": unmet})
    at_origin = x == ctx.origin
    allowed = {1} if at_origin else {r, r + 1}
    avoid = set(_curves(*avoid)) | {x, y, z}

    def acceptable(a):
        return (a not in avoid and ctx.layer(a) in allowed and all(ctx.adjacent(a, p) for p in (x, y, z))
                and ctx.good(a, x, y) and ctx.good(a, x, z) and ctx.good(a, y, z))

    def verify(a):
        return _record(ctx, layers=[("a", a, allowed)], disjoint=[(a, x), (a, y), (a, z)],
                       good=[(a, x, y), (a, x, z), (a, y, z)])

    X = _key([x, y, z])
    members, cs, _ = ctx.cl.pieces(ctx.cl.ambient(), X)
    non_pants = [k for k in members if not cs.components[k].is_pants]
    home = locate(ctx.tri, X, ctx.origin)
    # components the origin cuts through come first
    non_pants.sort(key=lambda k: (k == home, k))
    tried = []
    for k in non_pants:
        piece = cs.components[k]
        if piece.xi == 1:
            kinds = ("nonseparating", "pants", "arc")
        else:
            kinds = _ordered_kinds(piece, [kd for kd, cond in (("pants", piece.m >= 2), ("nonseparating", piece.h >= 1)) if cond])
        for kind, a in constructions(ctx.tri, X, k, kinds):
            ok = acceptable(a)
            tried.append({"piece": k, "kind": kind, "curve": a, "layer": ctx.layer(a), "accepted": ok})
            if ok:
                return out(Status.SUCCESS, witness=a, branch=f"construction:{kind}", verification=verify(a),
                           diagnostics={"tried": tried, "origin_vertex": at_origin})
    scanned = 0
    for i in ctx.common_neighbors([x, y, z], layers=sorted(allowed)):
        a = ctx.curve(i)
        scanned += 1
        if acceptable(a):
            return out(Status.SUCCESS, witness=a, branch="universe-scan", verification=verify(a),
                       diagnostics={"tried": tried, "scanned": scanned, "origin_vertex": at_origin})
    return out(Status.UNIVERSE_EXHAUSTED, diagnostics={"tried": tried, "scanned": scanned,
                                                       "reason": "no universe curve fixes the triangle"})


def replace_bad_triangle(a, x, y, o, r: int, U, avoid=()) -> SurgeryOutcome:
    """Tile the bad triangle (a, x, y) by good triangles with one or two new vertices.

    Branch 1: c in S_{r+1} with (a,c,x), (c,x,y), (a,c,y) good.  Branch 2:
    c in S_r and d in S_{r+1} with the six triangles (a,c,x), (c,x,y),
    (a,c,y), (c,x,d), (c,y,d), (d,x,y) good.
    """
    ctx = context(U, o)
    a, x, y = _curves(a, x, y)
    out = _outcome("replace_bad_triangle", ctx, {"a": a, "x": x, "y": y, "r": r})
    unmet = _require(ctx, {"x": (x, {r}), "y": (y, {r, r + 1}), "a": (a, {r, r + 1})})
    if unmet:
        return out(Status.PRECONDITION_UNMET, diagnostics={"unmet": unmet})
    fix = fix_bad_triangle(x, a, y, o, r, ctx, avoid)
    if fix.status is not Status.SUCCESS:
        return out(fix.status, diagnostics={"fix_bad_triangle": fix.to_dict()})
    c = fix.witness
    avoid = set(_curves(*avoid)) | {a, x, y, c}
    if ctx.layer(c) == r + 1:
        triangles = [(a, c, x), (c, x, y), (a, c, y)]
        rec = _record(ctx, layers=[("c", c, {r + 1})], good=triangles)
        return out(Status.SUCCESS, witness={"c": c, "triangles": triangles}, branch="c-outer",
                   verification=rec, diagnostics={"fix_bad_triangle": fix.to_dict()})
    tetra = find_tetra_apex(c, x, y, o, r, ctx, avoid)
    if tetra.status is not Status.SUCCESS:
        return out(Status.UNIVERSE_EXHAUSTED, diagnostics={"fix_bad_triangle": fix.to_dict(),
                                                          "find_tetra_apex": tetra.to_dict()})
    d = tetra.witness
    triangles = [(a, c, x), (c, x, y), (a, c, y), (c, x, d), (c, y, d), (d, x, y)]
    rec = _record(ctx, layers=[("c", c, {r}), ("d", d, {r + 1})], good=triangles)
    return out(Status.SUCCESS, witness={"c": c, "d": d, "triangles": triangles}, branch="c-inner",
               verification=rec, diagnostics={"fix_bad_triangle": fix.to_dict(), "find_tetra_apex": tetra.to_dict()})


def diamond_path(a, b, x, y, o, r: int, U, avoid=(), node_budget: int = 20_000) -> SurgeryOutcome:
    """Path a = v_0, ..., v_p = b in S_{r+1} with every (v_i, v_{i+1}, x) and (v_i, v_{i+1}, y) good.

    Breadth-first search over universe curves of S_{r+1} disjoint from x and
    y, first inside the unique non-pants piece of the complement of x and y,
    then anywhere in the layer.
    """
    ctx = context(U, o)
    a, b, x, y = _curves(a, b, x, y)
    out = _outcome("diamond_path", ctx, {"a": a, "b": b, "x": x, "y": y, "r": r})
    unmet = _require(ctx, {"a": (a, {r + 1}), "b": (b, {r + 1}), "x": (x, {r}), "y": (y, {r, r + 1})})
    if not unmet:
        for t in ((a, x, y), (b, x, y)):
            if _triangle_unmet(ctx, *t) or not ctx.good(*t):
                unmet.append(f"{' '.join(map(_short, t))} is not a good triangle")
    if unmet:
        return out(Status.PRECONDITION_UNMET, diagnostics={"unmet": unmet})

    def verify(path):
        rec = _record(ctx, layers=[(f"v{i}", v, {r + 1}) for i, v in enumerate(path)],
                      disjoint=[(p, q) for p, q in zip(path, path[1:])],
                      good=[t for p, q in zip(path, path[1:]) for t in ((p, q, x), (p, q, y))],
                      distinct=[("path", path)])
        rec["endpoints"] = path[0] == a and path[-1] == b
        return rec

    if a == b:
        return out(Status.SUCCESS, witness=[a], branch="trivial", verification=verify([a]))
    avoid = set(_curves(*avoid)) - {a, b}
    k = ctx.cl.unique_non_pants_index([x, y])
    V = ctx.cl.region([x, y], k) if k is not None else None
    base = [i for i in ctx.common_neighbors([x, y], layers=[r + 1]) if ctx.curve(i) not in avoid]
    stages = []
    if V is not None:
        stages.append(("non-pants-piece", [i for i in base if ctx.cl.inside(V, ctx.curve(i))]))
    stages.append(("layer", base))
    diag = {}
    for name, verts in stages:
        vs = set(verts) | {ctx.index(a), ctx.index(b)}
        src, dst = ctx.index(a), ctx.index(b)
        prev = {src: None}
        q = deque([src])
        nodes = 0
        while q and dst not in prev and nodes < node_budget:
            v = q.popleft()
            nodes += 1
            cv = ctx.curve(v)
            for w in ctx.graph.neighbors(v):
                if w in prev or w not in vs:
                    continue
                cw = ctx.curve(w)
                if ctx.good(cv, cw, x) and ctx.good(cv, cw, y):
                    prev[w] = v
                    q.append(w)
        diag[name] = {"candidates": len(vs), "reached": len(prev), "expanded": nodes}
        if dst in prev:
            path = []
            cur = dst
            while cur is not None:
                path.append(ctx.curve(cur))
                cur = prev[cur]
            path.reverse()
            return out(Status.SUCCESS, witness=path, branch=name, verification=verify(path), diagnostics=diag)
    diag["reason"] = "b is not reachable through good triangles in the layer"
    return out(Status.UNIVERSE_EXHAUSTED, diagnostics=diag)


# -- cones -----------------------------------------------------------------------
def _loop_unmet(ctx, loop) -> list:
    out = []
    if len(loop) < 3 or len(set(loop)) != len(loop):
        out.append("a loop needs at least three distinct curves")
        return out
    for p, q in zip(loop, loop[1:] + loop[:1]):
        if not ctx.adjacent(p, q):
            out.append(f"{_short(p)} and {_short(q)} are not adjacent universe curves")
    return out


def _disk_from_faces(ctx, boundary, faces) -> LabeledDisk:
    verts = sorted({v for f in faces for v in f} | set(boundary))
    local = {v: k for k, v in enumerate(verts)}
    return LabeledDisk(list(verts), [tuple(local[v] for v in f) for f in faces], [local[v] for v in boundary])


def cone_replace(z, link_loop, o, r: int, U, avoid=(), area_budget: int = 8,
                 node_budget: int = 100_000) -> SurgeryOutcome:
    """A disk in S_{r+1} filling the link of z, replacing the cone on z.

    Tried in order: a direct fill with interior curves of S_{r+1} disjoint
    from z; an outward-pushed cone (tetrahedron apexes joined by diamond
    paths, the strip between the cones made explicit) filled the same way;
    a direct fill anywhere in S_{r+1}.
    """
    ctx = context(U, o)
    (z,) = _curves(z)
    loop = _curves(*link_loop)
    out = _outcome("cone_replace", ctx, {"z": z, "link": loop, "r": r})
    unmet = _require(ctx, {"z": (z, {r})})
    unmet += _require(ctx, {f"x{i}": (c, {r + 1}) for i, c in enumerate(loop)})
    unmet = unmet or _loop_unmet(ctx, loop)
    factedge = {}
    if not unmet:
        for p, q in zip(loop, loop[1:] + loop[:1]):
            if not ctx.adjacent(p, z) or not ctx.good(p, q, z):
                unmet.append(f"({_short(p)}, {_short(q)}, z) is not a good triangle")
        kz = ctx.cl.unique_non_pants_index([z])
        if not unmet and kz is not None:
            Uz = ctx.cl.region([z], kz)
            factedge = {f"{_short(p)} {_short(q)}": ctx.cl.is_good(p, q, U=Uz)
                        for p, q in zip(loop, loop[1:] + loop[:1])}
    if unmet:
        return out(Status.PRECONDITION_UNMET, diagnostics={"unmet": unmet})
    avoid_i = {ctx.index(c) for c in _curves(*avoid) if ctx.index(c) is not None}
    zi = ctx.index(z)
    layer_ok = ctx.dist == r + 1
    zrow = ctx.graph.matrix[zi]

    def in_U(extra=frozenset()):
        return lambda v: bool(layer_ok[v] and zrow[v]) and v not in avoid_i and v not in extra

    def in_layer(v):
        return bool(layer_ok[v]) and v not in avoid_i

    def verify(disk):
        viol = verify_disk(disk, DiskConstraints(ctx.tri, loop=loop, layer_of=ctx.layer, layers=(r + 1, r + 1)))
        return {"disk verified": not viol, "boundary is the link": disk.boundary_labels() == loop}, viol

    diag = {"factedge": factedge}
    fr = fill_loop(ctx.graph, loop, in_U(), area_budget, node_budget)
    diag["fill_in_U"] = {"status": fr.status, "nodes": fr.nodes}
    if fr:
        rec, viol = verify(fr.disk)
        if not viol:
            return out(Status.SUCCESS, witness=fr.disk, branch="fill-in-U", verification=rec, diagnostics=diag)
        diag["fill_in_U"]["violations"] = [v.to_dict() for v in viol]
    pushed = _pushed_cone(ctx, z, loop, o, r, avoid_i, in_U, area_budget, node_budget)
    diag["pushed_cone"] = pushed["diagnostics"]
    if pushed.get("disk") is not None:
        rec, viol = verify(pushed["disk"])
        if not viol:
            return out(Status.SUCCESS, witness=pushed["disk"], branch="pushed-cone", verification=rec, diagnostics=diag)
        diag["pushed_cone"]["violations"] = [v.to_dict() for v in viol]
    fr = fill_loop(ctx.graph, loop, in_layer, area_budget, node_budget)
    diag["fill_in_layer"] = {"status": fr.status, "nodes": fr.nodes}
    if fr:
        rec, viol = verify(fr.disk)
        if not viol:
            return out(Status.SUCCESS, witness=fr.disk, branch="fill-in-layer", verification=rec, diagnostics=diag)
        diag["fill_in_layer"]["violations"] = [v.to_dict() for v in viol]
    diag["reason"] = "no filling found within the budgets"
    return out(Status.UNIVERSE_EXHAUSTED, diagnostics=diag)


def _pushed_cone(ctx, z, loop, o, r, avoid_i, in_U, area_budget, node_budget) -> dict:
    """One outward push of a good cone, returned as an explicit disk (or diagnostics)."""
    n = len(loop)
    used = set(loop) | {z} | {ctx.curve(i) for i in avoid_i}
    apexes = []
    events = []
    for j in range(n):
        t = find_tetra_apex(z, loop[j], loop[(j + 1) % n], o, r, ctx, used)
        events.append(t.to_dict())
        if not t:
            return {"diagnostics": {"stage": "apex", "edge": j, "events": events}}
        apexes.append(t.witness)
        used.add(t.witness)
    faces = [(loop[j], loop[(j + 1) % n], apexes[j]) for j in range(n)]
    Y = []
    for j in range(n):
        prev_apex, apex = apexes[j - 1], apexes[j]
        d = diamond_path(prev_apex, apex, z, loop[j], o, r, ctx, used)
        events.append(d.to_dict())
        if not d:
            return {"diagnostics": {"stage": "diamond", "vertex": j, "events": events}}
        path = d.witness
        for p, q in zip(path, path[1:]):
            faces.append((loop[j], p, q))
        used.update(path)
        Y.extend(path[:-1])
    if len(Y) < 3 or len(set(Y)) != len(Y):
        return {"diagnostics": {"stage": "pushed-loop", "loop": Y, "events": events,
                                "reason": "pushed cone is not an embedded loop of length at least 3"}}
    strip = {ctx.index(c) for f in faces for c in f}
    strip_edges = {tuple(sorted(p)) for f in faces for p in combinations(f, 2)}
    fr = fill_loop(ctx.graph, Y, in_U(frozenset(strip)), area_budget, node_budget, strip_edges)
    if not fr:
        return {"diagnostics": {"stage": "fill", "loop": Y, "nodes": fr.nodes, "events": events}}
    faces += [tuple(fr.disk.labels[v] for v in f) for f in fr.disk.faces]
    return {"disk": _disk_from_faces(ctx, loop, faces),
            "diagnostics": {"stage": "done", "pushed_loop": Y, "events": events}}


# -- the outward push of a loop ------------------------------------------------
@dataclass
class PushBudgets:
    area: int = 10               # faces allowed in the first filling
    nodes: int = 200_000         # search nodes per filling
    rewrites: int = 200          # accepted rewrites across all phases
    path_nodes: int = 20_000     # breadth-first nodes per diamond path


class _WorkDisk:
    """A disk under rewriting: faces as frozensets of curves and a fixed boundary."""

    def __init__(self, boundary, faces=()):
        self.boundary = list(boundary)
        self.faces = {frozenset(f) for f in faces}

    def vertices(self) -> set:
        return {v for f in self.faces for v in f} | set(self.boundary)

    def edges(self) -> set:
        return {frozenset(p) for f in self.faces for p in combinations(sorted(f), 2)}

    def faces_with(self, *vs) -> list:
        return sorted((f for f in self.faces if set(vs) <= f), key=lambda f: sorted(f))

    def link_cycle(self, v) -> list:
        pairs = [tuple(sorted(f - {v})) for f in self.faces_with(v)]
        adj = {}
        for p, q in pairs:
            adj.setdefault(p, []).append(q)
            adj.setdefault(q, []).append(p)
        start = min(adj)
        cyc = [start]
        prev = None
        cur = start
        while True:
            nxt = [w for w in adj[cur] if w != prev]
            if not nxt:
                break
            nxt = min(nxt) if prev is None else nxt[0]
            if nxt == start:
                break
            cyc.append(nxt)
            prev, cur = cur, nxt
        return cyc

    def replace(self, remove, add) -> bool:
        """Swap faces; refuse (and leave the disk alone) if an edge would border three faces."""
        remove = {frozenset(f) for f in remove}
        add = {frozenset(f) for f in add}
        if not remove <= self.faces:
            return False
        trial = (self.faces - remove) | add
        count = {}
        for f in trial:
            if len(f) != 3:
                return False
            for p in combinations(sorted(f), 2):
                count[p] = count.get(p, 0) + 1
        if any(k > 2 for k in count.values()) or len(trial) != len(self.faces) - len(remove) + len(add):
            return False
        self.faces = trial
        return True

    def labeled(self) -> LabeledDisk:
        faces = [tuple(sorted(f)) for f in sorted(self.faces, key=lambda f: sorted(f))]
        verts = sorted(self.vertices())
        local = {v: k for k, v in enumerate(verts)}
        return LabeledDisk(verts, [tuple(local[v] for v in f) for f in faces], [local[v] for v in self.boundary])


def _counts(ctx, work: _WorkDisk, k: int) -> tuple:
    inside = lambda cs: all(ctx.layer(c) == k for c in cs)
    v = sum(1 for c in work.vertices() if ctx.layer(c) == k)
    e = sum(1 for p in work.edges() if inside(p))
    f = sum(1 for fc in work.faces if inside(fc))
    return v, e, f


def _good_vertex_candidates(ctx, around, exclude, layers=None):
    """Universe curves adjacent to every curve of ``around``, good, not excluded."""
    for i in ctx.common_neighbors(around, layers):
        c = ctx.curve(i)
        if c not in exclude and ctx.good(c):
            yield c


class _Push:
    def __init__(self, ctx, gamma, r, budgets):
        self.ctx = ctx
        self.gamma = gamma
        self.r = r
        self.budgets = budgets
        self.events = []
        self.rewrites = 0
        self.phase = "start"

    def log(self, kind, **data):
        self.events.append({"phase": self.phase, "event": kind, **_jsonable(data)})

    # phase 0 -----------------------------------------------------------------
    def repair_loop(self):
        """Homotope gamma to a loop of good vertices and good edges, recording the strip."""
        ctx = self.ctx
        loop = list(self.gamma)
        strip = []
        touched = set(loop)
        i = 0
        while i < len(loop):
            q = loop[i]
            if not ctx.good(q):
                p, s = loop[i - 1], loop[(i + 1) % len(loop)]
                best = None
                for c in _good_vertex_candidates(ctx, [p, q, s], touched):
                    score = (ctx.good(p, c) and ctx.good(c, s))
                    if best is None or score > best[0]:
                        best = (score, c)
                    if score:
                        break
                if best is None:
                    self.log("bad-vertex-unrepaired", vertex=q)
                    return None, strip
                c = best[1]
                strip += [(p, q, c), (q, s, c)]
                touched.add(c)
                loop[i] = c
                self.log("bad-vertex-replaced", old=q, new=c)
            i += 1
        i = 0
        while i < len(loop):
            p, s = loop[i], loop[(i + 1) % len(loop)]
            if not ctx.good(p, s):
                w = next((c for c in _good_vertex_candidates(ctx, [p, s], touched)
                          if ctx.good(p, c) and ctx.good(c, s)), None)
                if w is None:
                    self.log("bad-edge-unrepaired", edge=[p, s])
                    return None, strip
                strip.append((p, w, s))
                touched.add(w)
                loop.insert(i + 1, w)
                self.log("bad-edge-split", edge=[p, s], new=w)
            i += 1
        return loop, strip

    # phase 2 -----------------------------------------------------------------
    def repair_edges(self, work: _WorkDisk) -> bool:
        ctx = self.ctx
        progress = True
        while progress:
            progress = False
            for v in sorted(work.vertices() - set(work.boundary)):
                if ctx.good(v):
                    continue
                link = work.link_cycle(v)
                used = work.vertices()
                for c in _good_vertex_candidates(ctx, link, used):
                    if all(ctx.good(c, x) for x in link):
                        old = work.faces_with(v)
                        new = [(f - {v}) | {c} for f in old]
                        if work.replace(old, new):
                            self.rewrites += 1
                            self.log("bad-vertex-relabeled", old=v, new=c)
                            progress = True
                            break
                if progress:
                    break
            if progress:
                continue
            bad = sorted((tuple(sorted(e)) for e in work.edges() if not ctx.good(*e)))
            for x, y in bad:
                fs = work.faces_with(x, y)
                if len(fs) != 2:
                    continue
                (a,) = fs[0] - {x, y}
                (b,) = fs[1] - {x, y}
                if ctx.adjacent(a, b) and ctx.good(a, b) and frozenset((a, b)) not in work.edges():
                    if work.replace(fs, [{a, b, x}, {a, b, y}]):
                        self.rewrites += 1
                        self.log("bad-edge-flipped", edge=[x, y], new=[a, b])
                        progress = True
                        break
                used = work.vertices()
                for c in _good_vertex_candidates(ctx, [a, b, x, y], used):
                    if all(ctx.good(c, t) for t in (a, b, x, y)):
                        if work.replace(fs, [{c, a, x}, {c, x, b}, {c, b, y}, {c, y, a}]):
                            self.rewrites += 1
                            self.log("bad-edge-coned", edge=[x, y], new=c)
                            progress = True
                            break
                if progress:
                    break
            if self.rewrites > self.budgets.rewrites:
                return False
        return all(ctx.good(*e) for e in work.edges()) and all(ctx.good(v) for v in work.vertices())

    # phase 3 -----------------------------------------------------------------
    def _check_decrease(self, before, after, what):
        if not after < before:
            raise InvariantViolation(f"{what}: counter went from {before} to {after}")

    def push_layer(self, work: _WorkDisk, k: int) -> bool:
        ctx = self.ctx
        o = ctx.origin
        while _counts(ctx, work, k)[2] > 0:
            if self.rewrites > self.budgets.rewrites:
                return False
            f_before = _counts(ctx, work, k)[2]
            face = min((f for f in work.faces if all(ctx.layer(c) == k for c in f)), key=lambda f: sorted(f))
            x, y, z = sorted(face)
            used = work.vertices()
            if ctx.good(x, y, z):
                t = find_tetra_apex(x, y, z, o, k, ctx, used)
                self.log("face", outcome=t.to_dict())
                if not t:
                    return False
                w = t.witness
                new = [(w, x, y), (w, x, z), (w, y, z)]
            else:
                fx = fix_bad_triangle(x, y, z, o, k, ctx, used)
                self.log("face", outcome=fx.to_dict())
                if not fx:
                    return False
                w = fx.witness
                if ctx.layer(w) == k + 1:
                    new = [(w, x, y), (w, x, z), (w, y, z)]
                else:
                    used = used | {w}
                    apex = []
                    for p, q in ((x, y), (x, z), (y, z)):
                        t = find_tetra_apex(w, p, q, o, k, ctx, used)
                        self.log("face", outcome=t.to_dict())
                        if not t:
                            return False
                        apex.append(t.witness)
                        used = used | {t.witness}
                    a, b, c = apex
                    new = [(a, x, y), (a, w, y), (a, w, x), (b, x, z), (b, x, w), (b, w, z),
                           (c, y, z), (c, w, y), (c, w, z)]
            if not work.replace([face], new):
                self.log("face-rewrite-rejected", face=sorted(face))
                return False
            self.rewrites += 1
            self._check_decrease(f_before, _counts(ctx, work, k)[2], f"faces in S_{k}")
        while _counts(ctx, work, k)[1] > 0:
            if self.rewrites > self.budgets.rewrites:
                return False
            edge = min((tuple(sorted(e)) for e in work.edges() if all(ctx.layer(c) == k for c in e)))
            x, y = edge
            fs = work.faces_with(x, y)
            if len(fs) != 2:
                self.log("edge-on-boundary", edge=list(edge))
                return False
            apexes = []
            for f in fs:
                (a,) = f - {x, y}
                if ctx.layer(a) != k + 1:
                    self.log("edge-apex-layer", edge=list(edge), apex=a, layer=ctx.layer(a))
                    return False
                if not ctx.good(a, x, y):
                    rb = replace_bad_triangle(a, x, y, o, k, ctx, work.vertices())
                    self.log("edge-prepare", outcome=rb.to_dict())
                    if not rb:
                        return False
                    wit = rb.witness
                    c = wit["c"]
                    if "d" in wit:
                        d = wit["d"]
                        new = [(a, c, x), (a, c, y), (c, x, d), (c, y, d), (d, x, y)]
                        a = d
                    else:
                        new = [(a, c, x), (a, c, y), (c, x, y)]
                        a = c
                    if not work.replace([f], new):
                        return False
                    self.rewrites += 1
                apexes.append(a)
            e_before = _counts(ctx, work, k)[1]
            a, b = apexes
            dp = diamond_path(a, b, x, y, o, k, ctx, work.vertices(), self.budgets.path_nodes)
            self.log("edge", outcome=dp.to_dict())
            if not dp:
                return False
            path = dp.witness
            old = [{a, x, y}, {b, x, y}]
            new = [(t, p, q) for p, q in zip(path, path[1:]) for t in (x, y)]
            if not work.replace(old, new):
                self.log("edge-rewrite-rejected", edge=list(edge))
                return False
            self.rewrites += 1
            self._check_decrease(e_before, _counts(ctx, work, k)[1], f"edges in S_{k}")
        while _counts(ctx, work, k)[0] > 0:
            if self.rewrites > self.budgets.rewrites:
                return False
            z = min(c for c in work.vertices() if ctx.layer(c) == k)
            if z in work.boundary:
                self.log("vertex-on-boundary", vertex=z)
                return False
            link = work.link_cycle(z)
            for p, q in list(zip(link, link[1:] + link[:1])):
                if ctx.good(z, p, q):
                    continue
                fx = fix_bad_triangle(z, p, q, o, k, ctx, work.vertices())
                self.log("cone-prepare", outcome=fx.to_dict())
                if not fx or ctx.layer(fx.witness) != k + 1:
                    self.log("cone-unrepaired", vertex=z, triangle=[z, p, q])
                    return False
                w = fx.witness
                if not work.replace([{z, p, q}], [(w, p, q), (w, p, z), (w, q, z)]):
                    return False
                self.rewrites += 1
            link = work.link_cycle(z)
            v_before = _counts(ctx, work, k)[0]
            cr = cone_replace(z, link, o, k, ctx, work.vertices() - set(link),
                              self.budgets.area, self.budgets.nodes)
            self.log("vertex", outcome=cr.to_dict())
            if not cr:
                return False
            disk = cr.witness
            new = [tuple(disk.labels[v] for v in f) for f in disk.faces]
            if not work.replace(work.faces_with(z), new):
                self.log("vertex-rewrite-rejected", vertex=z)
                return False
            self.rewrites += 1
            self._check_decrease(v_before, _counts(ctx, work, k)[0], f"vertices in S_{k}")
        return True


def push_loop(gamma, o, U, r: int = None, budgets: PushBudgets = None) -> SurgeryOutcome:
    """Fill an edge loop of S_r by a disk with good edges pushed off S_0 .. S_{r-3}.

    Phases: (0) repair the loop to good vertices and good edges, keeping the
    strip between old and new loop; (1) fill the repaired loop; (2) rewrite
    the filling until every vertex and edge is good; (3) for k = 0 .. r-3
    push faces, then edges, then vertices off S_k.  Each phase reports its
    progress when it stops.
    """
    ctx = context(U, o)
    budgets = budgets or PushBudgets()
    gamma = _curves(*gamma)
    layers_seen = {ctx.layer(c) for c in gamma}
    if r is None:
        r = next(iter(layers_seen)) if len(layers_seen) == 1 else None
    out = _outcome("push_loop", ctx, {"gamma": gamma, "r": r, "origin": ctx.origin,
                                      "budgets": vars(budgets)})
    unmet = []
    if r is None or layers_seen != {r}:
        unmet.append(f"loop is not contained in one layer (layers {sorted(map(str, layers_seen))})")
    unmet = unmet or _loop_unmet(ctx, gamma)
    if unmet:
        return out(Status.PRECONDITION_UNMET, diagnostics={"unmet": unmet})
    run = _Push(ctx, gamma, r, budgets)

    def stop(reason, work=None, **extra):
        diag = {"phase": run.phase, "reason": reason, "events": run.events, **extra}
        if work is not None and work.faces:
            diag["partial_faces"] = [sorted(f) for f in work.faces]
        return out(Status.UNIVERSE_EXHAUSTED, diagnostics=diag)

    run.phase = "repair-loop"
    loop2, strip = run.repair_loop()
    if loop2 is None:
        return stop("could not repair the loop to good edges")
    if len(loop2) < 3 or len(set(loop2)) != len(loop2):
        return stop("repaired loop is not embedded", loop=loop2)
    run.phase = "fill"
    strip_curves = {c for f in strip for c in f}
    blocked = {ctx.index(c) for c in strip_curves} - {ctx.index(c) for c in loop2}
    strip_edges = {tuple(sorted(p)) for f in strip for p in combinations(f, 2)}
    fr = fill_loop(ctx.graph, loop2, lambda v: v not in blocked, budgets.area, budgets.nodes, strip_edges)
    run.log("fill", status=fr.status, nodes=fr.nodes, faces_tried=fr.faces_tried)
    if not fr:
        return stop("no filling of the repaired loop within the area budget", loop=loop2)
    work = _WorkDisk(gamma, list(strip) + [tuple(fr.disk.labels[v] for v in f) for f in fr.disk.faces])
    run.phase = "good-edges"
    if not run.repair_edges(work):
        return stop("could not make every edge of the filling good", work)
    run.phase = "push"
    for k in range(0, r - 2):
        if not run.push_layer(work, k):
            return stop(f"could not clear S_{k}", work, layer=k)
    run.phase = "done"
    disk = work.labeled()
    disk.good = [True] * len(disk.faces) if all(ctx.good(*(disk.labels[v] for v in f)) for f in disk.faces) \
        else [None] * len(disk.faces)
    profile = annulus_profile(disk, ctx.layer)
    viol = verify_disk(disk, DiskConstraints(ctx.tri, loop=gamma, layer_of=ctx.layer,
                                             layers=(max(0, r - 2) if r >= 3 else 0, 10 ** 9),
                                             classifier=ctx.checker.cl))
    rec = {"disk verified": not viol,
           "every edge good": all(ctx.checker.good(*(disk.labels[v] for v in e)) for e in disk.edges()),
           "profile recomputed": annulus_profile(disk, ctx.layer).to_dict() == profile.to_dict()}
    for k in range(0, r - 2):
        rec[f"sigma({k}) = 0"] = profile.sigma(k) == 0
    diag = {"events": run.events, "repaired_loop": loop2, "rewrites": run.rewrites,
            "violations": [v.to_dict() for v in viol],
            "width": [min(profile.v), max(profile.v)] if profile.v else None}
    if not all(rec.values()):
        raise InvariantViolation(f"push_loop produced an unverifiable disk: {rec}, {diag['violations']}")
    return out(Status.SUCCESS, witness={"disk": disk, "profile": profile}, branch="pipeline",
               verification=rec, diagnostics=diag)


def clear_layer(disk: LabeledDisk, k: int, o, U, budgets: PushBudgets = None) -> SurgeryOutcome:
    """Push every face, edge and vertex of a good-edge disk off the layer S_k.

    Assumes nothing of the disk lies below S_k and its boundary misses S_k.  This is one step of the outward push, usable on its own.
    """
    ctx = context(U, o)
    budgets = budgets or PushBudgets()
    boundary = disk.boundary_labels()
    out = _outcome("clear_layer", ctx, {"disk": disk, "k": k})
    unmet = []
    used = [disk.labels[v] for v in sorted({v for f in disk.faces for v in f} | set(disk.boundary))]
    if any(ctx.layer(c) is None or ctx.layer(c) < k for c in used):
        unmet.append(f"disk has vertices outside the universe or below S_{k}")
    if any(ctx.layer(c) == k for c in boundary):
        unmet.append(f"boundary meets S_{k}")
    if not all(ctx.good(disk.labels[a], disk.labels[b]) for a, b in disk.edges()):
        unmet.append("disk has bad edges")
    if verify_disk(disk, DiskConstraints(ctx.tri, check_edges=False)):
        unmet.append("input is not a valid disk")
    if unmet:
        return out(Status.PRECONDITION_UNMET, diagnostics={"unmet": unmet})
    run = _Push(ctx, boundary, None, budgets)
    run.phase = f"clear-S{k}"
    work = _WorkDisk(boundary, [tuple(disk.labels[v] for v in f) for f in disk.faces])
    before = _counts(ctx, work, k)
    if not run.push_layer(work, k):
        return out(Status.UNIVERSE_EXHAUSTED, diagnostics={"events": run.events, "before": before,
                                                          "after": _counts(ctx, work, k),
                                                          "partial_faces": [sorted(f) for f in work.faces]})
    new = work.labeled()
    viol = verify_disk(new, DiskConstraints(ctx.tri, loop=boundary, layer_of=ctx.layer, layers=(k + 1, 10 ** 9)))
    rec = {"disk verified": not viol,
           "every edge good": all(ctx.checker.good(new.labels[a], new.labels[b]) for a, b in new.edges()),
           f"sigma({k}) = 0": annulus_profile(new, ctx.layer).sigma(k) == 0}
    return out(Status.SUCCESS if all(rec.values()) else Status.UNIVERSE_EXHAUSTED, witness=new,
               branch="pushed", verification=rec,
               diagnostics={"events": run.events, "before": before, "rewrites": run.rewrites,
                            "violations": [v.to_dict() for v in viol]})


def sample_loops(ctx: SurgeryContext, r: int, count: int, rng, max_len: int = 6, tries: int = 200) -> list:
    """Embedded edge loops of S_r, as curve lists (see :func:`random_loops`)."""
    verts = [i for i in range(len(ctx.universe)) if ctx.dist[i] == r]
    return [[ctx.curve(i) for i in L] for L in random_loops(ctx.graph, verts, count, rng, max_len, tries)]


def transcript(outcomes) -> list:
    """JSON event log of a sequence of outcomes."""
    return [o.to_dict() for o in outcomes]


__all__ = [
    "Status",
    "SurgeryOutcome",
    "SurgeryContext",
    "Checker",
    "context",
    "constructions",
    "find_good_edge_partner",
    "find_good_triangle_apex",
    "find_tetra_apex",
    "fix_bad_triangle",
    "replace_bad_triangle",
    "diamond_path",
    "cone_replace",
    "PushBudgets",
    "push_loop",
    "clear_layer",
    "sample_loops",
    "transcript",
    "LabeledDisk",
    "AnnulusProfile",
    "annulus_profile",
    "DiskConstraints",
    "DiskViolation",
    "verify_disk",
]
