"""Multicurves as normal coordinates on an ideal triangulation.

A multicurve is a tuple of nonnegative edge weights.  Inside triangle ``t``
the arcs are corner arcs; corner ``c`` carries
``(w[side c] + w[side c-1] - w[side c+1]) / 2`` of them.  Along side ``s``
(from corner ``s`` to corner ``s + 1``) the points are ordered: the arcs of
corner ``s`` innermost first, then the arcs of corner ``s + 1`` outermost
first.  These conventions fix a unique normal realization of every valid
weight vector, which the tracing, cutting and overlay code all share.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field

from .surface import IdealTriangulation

log = logging.getLogger(__name__)

DEFAULT_CURVE_CEILING = 5_000_000


class NormalCurveError(ValueError):
    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


@dataclass(frozen=True)
class Violation:
    triangle: int
    kind: str  # "parity" or "triangle_inequality"
    weights: tuple


def side_weights(tri: IdealTriangulation, w, t: int) -> tuple:
    eos = tri.edge_of_slot
    return (w[eos[3 * t]], w[eos[3 * t + 1]], w[eos[3 * t + 2]])


def corner_counts(tri: IdealTriangulation, w, t: int) -> tuple:
    x0, x1, x2 = side_weights(tri, w, t)
    # corner c sits between side c-1 and side c
    return ((x0 + x2 - x1) // 2, (x1 + x0 - x2) // 2, (x2 + x1 - x0) // 2)


def validate_multicurve(tri: IdealTriangulation, w) -> list:
    """Every violated parity / triangle inequality constraint, per triangle."""
    if len(w) != tri.num_edges:
        raise NormalCurveError("LENGTH_MISMATCH", f"expected {tri.num_edges} weights, got {len(w)}")
    out = []
    for t in range(tri.num_triangles):
        x = side_weights(tri, w, t)
        if any(v < 0 for v in x):
            out.append(Violation(t, "negative", x))
            continue
        if sum(x) % 2:
            out.append(Violation(t, "parity", x))
        a, b, c = x
        if a > b + c or b > a + c or c > a + b:
            out.append(Violation(t, "triangle_inequality", x))
    return out


def is_valid(tri: IdealTriangulation, w) -> bool:
    return len(w) == tri.num_edges and not validate_multicurve(tri, w)


@dataclass
class Chord:
    """One normal arc, traversed from (side_in, q_in) to (side_out, q_out).

    ``q`` values are local indices along the side, counted from its start corner.
    """

    t: int
    side_in: int
    q_in: int
    side_out: int
    q_out: int


def exit_point(tri: IdealTriangulation, w, t: int, s: int, q: int, counts=None) -> tuple:
    """Where the arc entering triangle ``t`` through side ``s`` at local ``q`` leaves."""
    k = counts if counts is not None else corner_counts(tri, w, t)
    if q < k[s]:
        s2 = (s - 1) % 3
        n2 = w[tri.edge_of_slot[3 * t + s2]]
        return s2, n2 - 1 - q
    n = w[tri.edge_of_slot[3 * t + s]]
    return (s + 1) % 3, n - 1 - q


def to_canonical(tri: IdealTriangulation, slot: int, q: int, n: int) -> int:
    return q if tri.slot_is_canonical[slot] else n - 1 - q


def trace(tri: IdealTriangulation, w) -> tuple:
    """Trace the normal realization of ``w``.

    Returns ``(cycles, labels)``: each cycle is a list of :class:`Chord` in
    traversal order; ``labels[e][q]`` is the cycle index of canonical point
    ``q`` on edge ``e``.  Traversal of each cycle starts on a canonical slot.
    """
    eos = tri.edge_of_slot
    gl = tri.gluing
    counts = [corner_counts(tri, w, t) for t in range(tri.num_triangles)]
    labels = [[-1] * w[e] for e in range(tri.num_edges)]
    cycles = []
    for e in range(tri.num_edges):
        start_slot = tri.edge_slots[e][0]
        for q0 in range(w[e]):
            if labels[e][q0] >= 0:
                continue
            cid = len(cycles)
            chords = []
            slot, q = start_slot, q0
            while True:
                t, s = divmod(slot, 3)
                s2, q2 = exit_point(tri, w, t, s, q, counts[t])
                chords.append(Chord(t, s, q, s2, q2))
                out_slot = 3 * t + s2
                e2 = eos[out_slot]
                n2 = w[e2]
                labels[e2][to_canonical(tri, out_slot, q2, n2)] = cid
                slot = gl[out_slot]
                q = n2 - 1 - q2
                if slot == start_slot and q == q0:
                    break
            cycles.append(chords)
    return cycles, labels


def cycle_weights(tri: IdealTriangulation, chords) -> tuple:
    w = [0] * tri.num_edges
    for ch in chords:
        w[tri.edge_of_slot[3 * ch.t + ch.side_out]] += 1
    return tuple(w)


def components_of(tri: IdealTriangulation, w) -> list:
    """Connected components with multiplicities, sorted by coordinates."""
    w = tuple(w)
    if not any(w):
        return []
    cycles, _ = trace(tri, w)
    counter = Counter(cycle_weights(tri, c) for c in cycles)
    return sorted(counter.items())


def component_count(tri: IdealTriangulation, w) -> int:
    """Number of traced components, without building coordinate vectors."""
    if not any(w):
        return 0
    cycles, _ = trace(tri, w)
    return len(cycles)


def add(a, b) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


def scale(a, k: int) -> tuple:
    return tuple(k * x for x in a)


def peripheral_curve(tri: IdealTriangulation, v: int) -> tuple:
    """The curve around puncture ``v``: every edge end at ``v`` counts once."""
    w = [0] * tri.num_edges
    for e in range(tri.num_edges):
        a, b = tri.edge_endpoints(e)
        w[e] = (a == v) + (b == v)
    return tuple(w)


def _edge_order(tri: IdealTriangulation) -> list:
    """Edges ordered so that triangles close as early as possible."""
    order, seen = [], set()
    for t in _triangle_bfs(tri):
        for s in range(3):
            e = tri.edge_of_slot[3 * t + s]
            if e not in seen:
                seen.add(e)
                order.append(e)
    return order


def _triangle_bfs(tri: IdealTriangulation) -> list:
    order, seen = [0], {0}
    i = 0
    while i < len(order):
        t = order[i]
        i += 1
        for s in range(3):
            u = tri.gluing[3 * t + s] // 3
            if u not in seen:
                seen.add(u)
                order.append(u)
    return order


def iter_valid_weights(tri: IdealTriangulation, W: int, prefix=None):
    """Every valid nonzero weight vector with entries <= W (unordered).

    Depth first over an edge order in which triangles close early; the domain
    of each edge is narrowed by every triangle whose other two sides are set.
    ``prefix`` fixes the values of the first few edges of the search order,
    which is how the search is split into independent subtrees.
    """
    order = _edge_order(tri)
    pos = {e: i for i, e in enumerate(order)}
    # for each depth, the triangles whose other two edges are both earlier
    checks = [[] for _ in order]
    for t in range(tri.num_triangles):
        es = [tri.edge_of_slot[3 * t + s] for s in range(3)]
        for k in range(3):
            e = es[k]
            others = es[:k] + es[k + 1:]
            if all(pos[o] < pos[e] for o in others if o != e) and others.count(e) == 0:
                checks[pos[e]].append(tuple(others))
            elif e in others:
                # a triangle with a repeated edge: x, x, y
                other = [o for o in es if o != e]
                if other and pos[other[0]] < pos[e] and es.count(e) == 2:
                    checks[pos[e]].append(("double", other[0]))
                elif not other:
                    pass
    # triangles with a repeated side need a dedicated check once complete
    repeated = []
    for t in range(tri.num_triangles):
        es = [tri.edge_of_slot[3 * t + s] for s in range(3)]
        if len(set(es)) < 3:
            repeated.append((max(pos[e] for e in es), es))
    repeated_at = [[] for _ in order]
    for depth, es in repeated:
        repeated_at[depth].append(es)

    w = [0] * tri.num_edges
    n = len(order)
    start = 0
    if prefix:
        for i, v in enumerate(prefix):
            w[order[i]] = v
        start = len(prefix)

    def domain(depth):
        e = order[depth]
        lo, hi, parity = 0, W, None
        for chk in checks[depth]:
            if chk[0] == "double":
                continue
            a, b = w[chk[0]], w[chk[1]]
            lo = max(lo, abs(a - b))
            hi = min(hi, a + b)
            p = (a + b) & 1
            if parity is None:
                parity = p
            elif parity != p:
                return ()
        if lo > hi:
            return ()
        if parity is None:
            return range(lo, hi + 1)
        if (lo & 1) != parity:
            lo += 1
        return range(lo, hi + 1, 2)

    def ok_repeated(depth):
        for es in repeated_at[depth]:
            x = [w[e] for e in es]
            if sum(x) & 1:
                return False
            a, b, c = x
            if a > b + c or b > a + c or c > a + b:
                return False
        return True

    def rec(depth):
        if depth == n:
            if any(w):
                yield tuple(w)
            return
        e = order[depth]
        for v in domain(depth):
            w[e] = v
            if ok_repeated(depth):
                yield from rec(depth + 1)
        w[e] = 0

    yield from rec(start)


def search_prefixes(tri: IdealTriangulation, W: int, depth: int = 2) -> list:
    """All value assignments for the first ``depth`` edges of the search order."""
    from itertools import product
    return [list(p) for p in product(range(W + 1), repeat=depth)]
