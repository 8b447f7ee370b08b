"""Geometric intersection numbers, cutting along multicurves, filling pairs."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .arrangement import Arrangement, Face
from .normal import NormalCurveError, add, components_of
from .surface import CutComponent, CutSurface, IdealTriangulation


class CutError(ValueError):
    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


@dataclass
class Overlay:
    """Two multicurves in minimal position."""

    arrangement: Arrangement
    bigons_removed: int
    faces: list

    @property
    def crossings(self) -> int:
        return self.arrangement.crossing_count()

    def is_bigon_free(self) -> bool:
        return self.arrangement.find_bigon() is None


def minimal_overlay(tri: IdealTriangulation, a, b, ordering="a_inner") -> Overlay:
    arr = Arrangement(tri, [a, b], ordering)
    removed = arr.reduce()
    faces, _, _ = arr.faces()
    return Overlay(arr, removed, faces)


def realize_disjointly(tri: IdealTriangulation, a, b) -> bool:
    """True iff the normal realization of ``a + b`` splits back into ``a`` and ``b``."""
    if not any(a) or not any(b):
        return True
    expect = Counter(dict(components_of(tri, a)))
    expect.update(dict(components_of(tri, b)))
    return Counter(dict(components_of(tri, add(a, b)))) == expect


def intersection_number(tri: IdealTriangulation, a, b, ordering="a_inner", shortcut=True) -> int:
    """Minimal number of crossings between representatives of ``a`` and ``b``.

    Isotopic inputs return 0 by definition.  With ``shortcut`` a disjointness
    test on ``a + b`` answers the zero case without building an overlay.
    """
    a, b = tuple(a), tuple(b)
    if a == b:
        return 0
    if shortcut and realize_disjointly(tri, a, b):
        return 0
    arr = Arrangement(tri, [a, b], ordering)
    arr.reduce()
    return arr.crossing_count()


def disjoint(tri: IdealTriangulation, a, b) -> bool:
    """Distinct curves with disjoint representatives."""
    return tuple(a) != tuple(b) and realize_disjointly(tri, a, b)


@dataclass
class CutDetails:
    surface: CutSurface
    arrangement: Arrangement
    faces: list
    region_of: object
    strand_curve: list          # strand id -> index into X
    sides: list                 # per curve of X: (left face, right face)
    face_component: dict        # face index -> component index


def _cut(tri: IdealTriangulation, X) -> CutDetails:
    X = [tuple(int(v) for v in x) for x in X]
    counts = Counter(X)
    for x, k in counts.items():
        if k > 1:
            raise CutError("DUPLICATE_COMPONENT", "a curve appears twice in the cutting set")
    for x in X:
        comps = components_of(tri, x)
        if comps != [(x, 1)]:
            raise CutError("NOT_DISJOINT", "cutting set member is not a single curve")
    total = tuple([0] * tri.num_edges)
    for x in X:
        total = add(total, x)
    if X and Counter(dict(components_of(tri, total))) != Counter(X):
        raise CutError("NOT_DISJOINT", "cutting curves do not realize disjointly")
    arr = Arrangement(tri, [total])
    faces, _, region_of = arr.faces()
    index = {x: i for i, x in enumerate(X)}
    strand_curve = [index[arr.strand_weights(sid)] for sid in range(len(arr.strands))]
    sides = [None] * len(X)
    for sid, ci in enumerate(strand_curve):
        sides[ci] = arr.strand_sides(sid, region_of)
    boundary = {f: [] for f in range(len(faces))}
    for ci, (left, right) in enumerate(sides):
        boundary[left].append((ci, 0))
        boundary[right].append((ci, 1))
    comps = []
    face_component = {}
    for f, face in enumerate(faces):
        srcs = tuple(sorted(boundary[f]))
        b = len(srcs)
        m = len(face.punctures)
        chi = face.euler
        twice_h = 2 - b - m - chi
        if twice_h < 0 or twice_h % 2:
            raise AssertionError(f"inconsistent cut face: chi={chi}, b={b}, m={m}")
        curves_here = Counter(ci for ci, _ in srcs)
        p = sum(1 for k in curves_here.values() if k == 2)
        u = sum(1 for k in curves_here.values() if k == 1)
        face_component[f] = len(comps)
        comps.append(CutComponent(twice_h // 2, m, p, u, srcs, tuple(v + 1 for v in face.punctures)))
    return CutDetails(CutSurface(tuple(comps), tuple(X)), arr, faces, region_of, strand_curve, sides, face_component)


def cut_along(tri: IdealTriangulation, X) -> CutSurface:
    """Components of the surface cut along the multicurve ``X`` (a list of curves)."""
    return _cut(tri, X).surface


def cut_details(tri: IdealTriangulation, X) -> CutDetails:
    return _cut(tri, X)


def is_essential(tri: IdealTriangulation, c) -> bool:
    """A single traced component is essential iff neither side is a disk or once-punctured disk."""
    c = tuple(c)
    if not any(c):
        return False
    if components_of(tri, c) != [(c, 1)]:
        raise NormalCurveError("NOT_A_CURVE", "is_essential expects a single component")
    for comp in cut_along(tri, [c]).components:
        if comp.h == 0 and comp.m <= 1 and comp.p == 0 and comp.u == 1:
            return False
    return True


def fills(tri: IdealTriangulation, a, b) -> bool:
    """Every complement face of the minimal overlay is a disk or once-punctured disk."""
    a, b = tuple(a), tuple(b)
    if a == b or realize_disjointly(tri, a, b):
        return False
    ov = minimal_overlay(tri, a, b)
    return all(f.euler_filled == 1 and len(f.punctures) <= 1 for f in ov.faces)


def face_census(faces) -> dict:
    kinds = Counter()
    for f in faces:
        if f.is_disk:
            kinds["disk"] += 1
        elif f.is_punctured_disk:
            kinds["punctured_disk"] += 1
        else:
            kinds["other"] += 1
    return dict(kinds)


__all__ = [
    "CutError",
    "Overlay",
    "Face",
    "minimal_overlay",
    "intersection_number",
    "disjoint",
    "realize_disjointly",
    "cut_along",
    "cut_details",
    "is_essential",
    "fills",
    "face_census",
]
