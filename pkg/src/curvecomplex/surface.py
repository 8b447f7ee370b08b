"""Surface signatures, ideal triangulations and complexity bookkeeping.

Conventions used throughout the package
---------------------------------------
A triangulation has ``F`` triangles.  Triangle ``t`` has corners 0, 1, 2 in
counter-clockwise order and side ``s`` runs from corner ``s`` to corner
``s + 1``.  Side ``s`` of triangle ``t`` is the *slot* ``3 * t + s``.  The
gluing is an orientation-reversing involution on slots: if slot ``(t, s)`` is
glued to ``(u, r)`` then corner ``s`` of ``t`` is identified with corner
``r + 1`` of ``u`` and corner ``s + 1`` of ``t`` with corner ``r``.

Each edge has a canonical slot (the smaller slot index); positions along an
edge are always measured in the direction of its canonical slot.

Canonical triangulations (frozen; universe caches depend on them):

* genus 0, ``n`` punctures: a cone from the apex ``N`` (puncture 1) over a
  ring ``r_0 .. r_{k-1}`` (``k = n - 1``, ``r_i`` is puncture ``i + 2``),
  closed off by fanning the bottom ``k``-gon from ``r_0``.  Upper triangles
  ``(N, r_i, r_{i+1})`` come first, then lower triangles ``(r_0, r_{j+1}, r_j)``
  for ``j = 1 .. k-2``.  For ``n = 4`` this is the boundary of a tetrahedron.
  Punctures ``i`` and ``i + 1`` (cyclically) are always joined by an edge.
* genus ``g >= 1``: the ``4g``-gon with word ``a1 b1 a1^-1 b1^-1 ...`` fanned
  from its first corner (one vertex, puncture 1), followed by ``n - 1``
  stellar subdivisions.  The ``j``-th extra puncture (``j = 0, 1, ...``) is
  placed in triangle ``j mod (4g - 2)`` of the original fan, and is numbered
  ``j + 2``.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from functools import cached_property

SCHEMA_VERSION = 1
SCHEMA_NAME = "curvecomplex.triangulation"


class SurfaceError(ValueError):
    """Raised for disallowed surface signatures.  ``code`` is machine readable."""

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


@dataclass(frozen=True)
class SurfaceSig:
    genus: int
    punctures: int

    @property
    def xi(self) -> int:
        return 3 * self.genus - 3 + self.punctures

    def header(self) -> str:
        return f"{self.genus},{self.punctures},{self.xi}"

    def __str__(self) -> str:
        return f"S_{self.genus},{self.punctures}"


def make_surface(g: int, n: int) -> SurfaceSig:
    if g < 0 or n < 0:
        raise SurfaceError("REJECT_SIGNATURE", f"negative genus or punctures ({g}, {n})")
    if n == 0:
        raise SurfaceError("REJECT_SIGNATURE", "closed surfaces are not supported")
    if (g, n) == (0, 3):
        raise SurfaceError("REJECT_SIGNATURE", "the thrice punctured sphere has no curves")
    if 3 * g - 3 + n < 1:
        raise SurfaceError("REJECT_SIGNATURE", f"complexity {3 * g - 3 + n} < 1")
    return SurfaceSig(g, n)


@dataclass(frozen=True)
class CutComponent:
    """A connected piece of a surface cut along a multicurve.

    ``boundary_sources`` lists, for every boundary circle, the index of the
    cutting curve it came from together with the side (0 = left, 1 = right
    of the curve's traversal direction).
    """

    h: int
    m: int
    p: int
    u: int
    boundary_sources: tuple = ()
    punctures: tuple = ()

    @property
    def xi(self) -> int:
        return complexity_of(self)

    @property
    def is_pants(self) -> bool:
        return self.xi == 0

    @property
    def boundaries(self) -> int:
        return 2 * self.p + self.u

    def signature(self) -> tuple:
        return (self.h, self.m, self.p, self.u)


def complexity_of(c: CutComponent) -> int:
    return 3 * c.h - 3 + c.m + 2 * c.p + c.u


def hat_of(c: CutComponent) -> tuple:
    """(genus, punctures, boundaries) after gluing every paired boundary."""
    return (c.h + c.p, c.m, c.u)


def hat_complexity(desc: tuple) -> int:
    g, m, b = desc
    return 3 * g - 3 + m + b


@dataclass(frozen=True)
class CutSurface:
    components: tuple
    curves: tuple  # the cutting curves, as weight tuples

    def xi_total(self) -> int:
        return sum(c.xi for c in self.components) + len(self.curves)


class IdealTriangulation:
    """An ideal triangulation given by triangle vertex labels and a slot gluing."""

    def __init__(self, genus: int, punctures: int, triangles, gluing):
        self.genus = genus
        self.punctures = punctures
        self.triangles = tuple(tuple(int(v) for v in tri) for tri in triangles)
        self.gluing = tuple(int(x) for x in gluing)
        self._check()

    # -- structure -------------------------------------------------------
    @property
    def num_triangles(self) -> int:
        return len(self.triangles)

    @property
    def num_edges(self) -> int:
        return len(self.gluing) // 2

    @property
    def num_vertices(self) -> int:
        return self.punctures

    @cached_property
    def edge_of_slot(self) -> tuple:
        out = [-1] * len(self.gluing)
        e = 0
        for slot in range(len(self.gluing)):
            if out[slot] < 0:
                out[slot] = e
                out[self.gluing[slot]] = e
                e += 1
        return tuple(out)

    @cached_property
    def edge_slots(self) -> tuple:
        """Per edge: (canonical slot, other slot)."""
        pairs = [None] * self.num_edges
        for slot, e in enumerate(self.edge_of_slot):
            if pairs[e] is None:
                pairs[e] = (slot, self.gluing[slot])
        return tuple(pairs)

    @cached_property
    def slot_is_canonical(self) -> tuple:
        return tuple(self.edge_slots[e][0] == slot for slot, e in enumerate(self.edge_of_slot))

    def vertex_of_corner(self, t: int, c: int) -> int:
        return self.triangles[t][c]

    @cached_property
    def corner_orbits(self) -> tuple:
        """Corners around each vertex, indexed by vertex label."""
        orbits = {}
        for orbit in self.corner_orbits_raw():
            t, c = orbit[0]
            orbits[self.triangles[t][c]] = tuple(orbit)
        return tuple(orbits[v] for v in range(self.punctures))

    def edge_endpoints(self, e: int) -> tuple:
        slot = self.edge_slots[e][0]
        t, s = divmod(slot, 3)
        return (self.triangles[t][s], self.triangles[t][(s + 1) % 3])

    def _check(self) -> None:
        n_slots = 3 * len(self.triangles)
        if len(self.gluing) != n_slots:
            raise ValueError("gluing must cover every slot")
        for slot, other in enumerate(self.gluing):
            if other == slot or self.gluing[other] != slot:
                raise ValueError(f"gluing is not a fixed-point-free involution at slot {slot}")
            t, s = divmod(slot, 3)
            u, r = divmod(other, 3)
            a, b = self.triangles[t][s], self.triangles[t][(s + 1) % 3]
            if (self.triangles[u][(r + 1) % 3], self.triangles[u][r]) != (a, b):
                raise ValueError(f"gluing at slot {slot} does not respect vertex labels")
        # connectivity
        seen = {0}
        stack = [0]
        while stack:
            t = stack.pop()
            for s in range(3):
                u = self.gluing[3 * t + s] // 3
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        if len(seen) != len(self.triangles):
            raise ValueError("triangulation is not connected")
        orbit_labels = set()
        for orbit in self.corner_orbits_raw():
            labels = {self.triangles[t][c] for t, c in orbit}
            if len(labels) != 1:
                raise ValueError("corner orbit carries several vertex labels")
            orbit_labels |= labels
        if orbit_labels != set(range(self.punctures)):
            raise ValueError("vertex labels must be 0..punctures-1, one per corner orbit")
        F = len(self.triangles)
        if self.punctures - F * 3 // 2 + F != 2 - 2 * self.genus:
            raise ValueError("Euler characteristic does not match genus")

    def corner_orbits_raw(self):
        seen = set()
        for t in range(len(self.triangles)):
            for c in range(3):
                if (t, c) in seen:
                    continue
                orbit = []
                cur = (t, c)
                while cur not in seen:
                    seen.add(cur)
                    orbit.append(cur)
                    ct, cc = cur
                    other = self.gluing[3 * ct + (cc - 1) % 3]
                    cur = divmod(other, 3)
                yield orbit

    # -- serialization ---------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_NAME,
            "version": SCHEMA_VERSION,
            "genus": self.genus,
            "punctures": self.punctures,
            "triangles": [list(t) for t in self.triangles],
            "gluing": list(self.gluing),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, data: dict) -> "IdealTriangulation":
        if data.get("schema") != SCHEMA_NAME or data.get("version") != SCHEMA_VERSION:
            raise ValueError("unsupported triangulation schema")
        return cls(data["genus"], data["punctures"], data["triangles"], data["gluing"])

    @classmethod
    def from_json(cls, text: str) -> "IdealTriangulation":
        return cls.from_dict(json.loads(text))

    @cached_property
    def fingerprint(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()[:16]

    def __eq__(self, other) -> bool:
        return isinstance(other, IdealTriangulation) and self.to_json() == other.to_json()

    def __hash__(self) -> int:
        return hash(self.fingerprint)

    def __repr__(self) -> str:
        return f"IdealTriangulation(g={self.genus}, n={self.punctures}, F={self.num_triangles})"


def _glue(gluing: list, t: int, s: int, u: int, r: int) -> None:
    gluing[3 * t + s] = 3 * u + r
    gluing[3 * u + r] = 3 * t + s


def _genus_zero(n: int) -> IdealTriangulation:
    k = n - 1
    apex = 0
    ring = [i + 1 for i in range(k)]  # puncture labels minus one
    tris = [(apex, ring[i], ring[(i + 1) % k]) for i in range(k)]
    tris += [(ring[0], ring[j + 1], ring[j]) for j in range(1, k - 1)]
    low = {j: k + j - 1 for j in range(1, k - 1)}
    gl = [-1] * (3 * len(tris))
    for i in range(k):
        _glue(gl, i, 2, (i + 1) % k, 0)            # apex to r_{i+1}
    _glue(gl, 0, 1, low[1], 2)                      # r_0 r_1
    _glue(gl, k - 1, 1, low[k - 2], 0)              # r_{k-1} r_0
    for j in range(1, k - 1):
        _glue(gl, j, 1, low[j], 1)                  # r_j r_{j+1}
    for j in range(1, k - 2):
        _glue(gl, low[j], 0, low[j + 1], 2)         # diagonal r_0 r_{j+1}
    return IdealTriangulation(0, n, tris, gl)


def _positive_genus(g: int, n: int) -> IdealTriangulation:
    sides = 4 * g
    # fan triangles j = 1 .. 4g-2 -> index j-1, vertices (P0, Pj, Pj+1); all P are vertex 0
    tris = [[0, 0, 0] for _ in range(sides - 2)]
    gl = [-1] * (3 * len(tris))
    for j in range(1, sides - 2):
        _glue(gl, j - 1, 2, j, 0)  # diagonal P0 P_{j+1}

    def polygon_slot(j: int) -> tuple:
        if j == 0:
            return (0, 0)
        if j == sides - 1:
            return (sides - 3, 2)
        return (j - 1, 1)

    for h in range(g):
        for a, b in ((4 * h, 4 * h + 2), (4 * h + 1, 4 * h + 3)):
            ta, sa = polygon_slot(a)
            tb, sb = polygon_slot(b)
            _glue(gl, ta, sa, tb, sb)

    original = len(tris)
    for j in range(n - 1):
        v = j + 1
        t = j % original
        a, b, c = tris[t]
        old = [gl[3 * t + s] for s in range(3)]
        t1, t2 = len(tris), len(tris) + 1
        tris[t] = [a, b, v]
        tris.append([b, c, v])
        tris.append([c, a, v])
        gl.extend([-1] * 6)
        for s in range(3):
            gl[3 * t + s] = -1
        targets = [(t, 0), (t1, 0), (t2, 0)]
        for s, (nt, ns) in enumerate(targets):
            o = old[s]
            if o == 3 * t + s:
                raise AssertionError("self-glued slot")
            # the old partner may itself be one of t's slots that has moved
            ot, os_ = divmod(o, 3)
            if ot == t:
                nt2, ns2 = targets[os_]
                gl[3 * nt + ns] = 3 * nt2 + ns2
            else:
                gl[3 * nt + ns] = o
                gl[o] = 3 * nt + ns
        _glue(gl, t, 1, t1, 2)
        _glue(gl, t1, 1, t2, 2)
        _glue(gl, t2, 1, t, 2)
    return IdealTriangulation(g, n, tris, gl)


def standard_triangulation(s: SurfaceSig) -> IdealTriangulation:
    s = make_surface(s.genus, s.punctures)
    if s.genus == 0:
        return _genus_zero(s.punctures)
    return _positive_genus(s.genus, s.punctures)


def triangulation_for(g: int, n: int) -> IdealTriangulation:
    return standard_triangulation(make_surface(g, n))


__all__ = [
    "SurfaceError",
    "SurfaceSig",
    "CutComponent",
    "CutSurface",
    "IdealTriangulation",
    "make_surface",
    "standard_triangulation",
    "triangulation_for",
    "complexity_of",
    "hat_of",
    "hat_complexity",
    "SCHEMA_VERSION",
]
