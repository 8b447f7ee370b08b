"""Pants curves, (eventually / essentially) non-separating curves, C0 edges, goodness.

Every predicate is answered by cutting the ambient surface along the relevant
curves and reading off the pieces.  A subsurface is always named by the
multicurve ``X`` it is cut out by together with a component index of that
cut, so every question reduces to one :func:`cut_along` call on ``X``
plus a few extra curves.  Pants-curve punctures are literal punctures.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .intersection import CutError, cut_along, cut_details
from .surface import CutComponent, IdealTriangulation


class ClassifyError(ValueError):
    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


@dataclass
class GoodnessVerdict:
    verdict: bool
    witness: tuple = ()            # failing subsimplex (curves)
    non_pants: tuple = ()          # its non-pants components (empty if there are none)

    def __bool__(self) -> bool:
        return self.verdict


@dataclass(frozen=True)
class Piece:
    """A component of a further cut, seen from inside a fixed subsurface."""

    component: CutComponent
    index: int


@dataclass(frozen=True)
class Region:
    """Subsurface ``U``: component ``index`` of the surface cut along ``X``."""

    X: tuple
    index: int = 0


def _key(curves) -> tuple:
    return tuple(sorted(tuple(int(v) for v in c) for c in curves))


class Classifier:
    """All predicates for one triangulation, with memoized cuts."""

    def __init__(self, tri: IdealTriangulation):
        self.tri = tri
        self._cuts = {}
        self._good = {}

    # -- cutting ---------------------------------------------------------
    def cut(self, curves):
        """Cut along a set of curves; returns (CutSurface, index of each curve)."""
        key = _key(curves)
        hit = self._cuts.get(key)
        if hit is None:
            hit = cut_along(self.tri, list(key))
            self._cuts[key] = hit
        return hit, {c: i for i, c in enumerate(key)}

    def ambient(self) -> Region:
        return Region((), 0)

    def region(self, X, index: int = 0) -> Region:
        X = _key(X)
        return Region(X, index)

    def region_component(self, U: Region) -> CutComponent:
        cs, _ = self.cut(U.X)
        return cs.components[U.index]

    def pieces(self, U: Region, Y):
        """Pieces of ``U`` cut along ``Y`` (curves inside ``U``).

        Returns ``(pieces, cut, index)`` where ``pieces`` are the components of
        the cut along ``X + Y`` lying in ``U``.
        """
        Y = _key(Y)
        cs, idx = self.cut(list(U.X) + list(Y))
        n = len(cs.components)
        if not U.X:
            return list(range(n)), cs, idx
        base, bidx = self.cut(U.X)
        sources = set()
        for ci, side in base.components[U.index].boundary_sources:
            sources.add((idx[U.X[ci]], side))
        # pieces of U are connected to U's boundary through the curves of Y
        parent = list(range(n))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        side_piece = {}
        for k, comp in enumerate(cs.components):
            for src in comp.boundary_sources:
                side_piece[src] = k
        key = cs.curves
        for y in Y:
            j = idx[y]
            a, b = side_piece[(j, 0)], side_piece[(j, 1)]
            parent[find(a)] = find(b)
        roots = {find(side_piece[s]) for s in sources}
        return [k for k in range(n) if find(k) in roots], cs, idx

    def inside(self, U: Region, c) -> bool:
        """Is curve ``c`` a curve of ``U`` (disjoint from X, not in X, inside U)?"""
        c = tuple(c)
        if c in U.X:
            return False
        try:
            cs, idx = self.cut(list(U.X) + [c])
        except CutError:
            return False
        if not U.X:
            return True
        j = idx[c]
        for comp in cs.components:
            srcs = comp.boundary_sources
            if (j, 0) in srcs or (j, 1) in srcs:
                for ci, side in srcs:
                    if ci != j:
                        return self._source_in(U, cs.curves[ci], side, cs)
        return False

    def _source_in(self, U: Region, curve, side, cs) -> bool:
        base, bidx = self.cut(U.X)
        if curve not in bidx:
            return False
        return (bidx[curve], side) in base.components[U.index].boundary_sources

    # -- hat gluing ------------------------------------------------------
    def hat_components(self, U: Region, Y) -> list:
        """Components of the glued surface hat(U) cut along ``Y``, as (h, m, b).

        Pieces of ``U`` are re-glued along the paired boundaries of ``U``.
        """
        members, cs, idx = self.pieces(U, Y)
        pairs = []
        if U.X:
            base, _ = self.cut(U.X)
            comp = base.components[U.index]
            seen = {}
            for ci, side in comp.boundary_sources:
                seen.setdefault(ci, []).append(side)
            pairs = [U.X[ci] for ci, sides in seen.items() if len(sides) == 2]
        side_piece = {}
        for k in members:
            for src in cs.components[k].boundary_sources:
                side_piece[src] = k
        parent = {k: k for k in members}

        def find(a):
            while parent[a] != a:
                a = parent[a]
            return a

        glued = set()
        for x in pairs:
            j = idx[x]
            a, b = side_piece[(j, 0)], side_piece[(j, 1)]
            glued.add(j)
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
        groups = {}
        for k in members:
            groups.setdefault(find(k), []).append(k)
        out = []
        for ks in sorted(groups.values()):
            chi = 0
            m = 0
            b = 0
            for k in ks:
                c = cs.components[k]
                nb = len(c.boundary_sources)
                chi += 2 - 2 * c.h - nb - c.m
                m += c.m
                b += sum(1 for ci, _ in c.boundary_sources if ci not in glued)
            h = (2 - chi - b - m) // 2
            out.append((h, m, b))
        return out

    # -- predicates ------------------------------------------------------
    def is_pants_curve(self, c, U: Region = None) -> bool:
        """``c`` bounds a genus 0 piece whose ends are two punctures and ``c``."""
        U = U or self.ambient()
        c = tuple(c)
        members, cs, idx = self.pieces(U, [c])
        j = idx[c]
        for k in members:
            comp = cs.components[k]
            srcs = comp.boundary_sources
            if len(srcs) == 1 and srcs[0][0] == j and comp.h == 0 and comp.m == 2:
                return True
        return False

    def is_eventually_nonseparating(self, Y, U: Region = None) -> bool:
        U = U or self.ambient()
        Y = _key(Y)
        if not Y:
            return True
        return len(self.hat_components(U, Y)) == 1

    def is_essentially_nonseparating(self, c, U: Region = None) -> bool:
        return self.is_eventually_nonseparating([c], U) or self.is_pants_curve(c, U)

    def c0_edge(self, a, b, U: Region = None) -> bool:
        """hat(U) minus ``a`` and ``b`` has at most one non-pants component."""
        U = U or self.ambient()
        for v in (a, b):
            if not self.is_essentially_nonseparating(v, U):
                raise ClassifyError("PRECONDITION_VERTEX", f"{tuple(v)} is not essentially non-separating")
        comps = self.hat_components(U, [a, b])
        non_pants = [c for c in comps if 3 * c[0] - 3 + c[1] + c[2] != 0]
        return len(non_pants) <= 1

    def c0_edge_cases(self, a, b, U: Region = None) -> bool:
        """The three-case definition, kept as an independent cross-check.

        (1) ``a + b`` eventually non-separating, (2) one of them a pants
        curve, (3) ``a + b`` bounds a genus 0 piece with one puncture and no
        other boundary.
        """
        U = U or self.ambient()
        if self.is_eventually_nonseparating([a, b], U):
            return True
        if self.is_pants_curve(a, U) or self.is_pants_curve(b, U):
            return True
        members, cs, idx = self.pieces(U, [a, b])
        ja, jb = idx[tuple(a)], idx[tuple(b)]
        for k in members:
            comp = cs.components[k]
            curves = sorted(ci for ci, _ in comp.boundary_sources)
            if curves == sorted((ja, jb)) and comp.h == 0 and comp.m == 1:
                return True
        return False

    def unique_non_pants(self, Y, U: Region = None):
        """(status, component, non-pants list): status is 'UNIQUE', 'NONE' or 'NOT_UNIQUE'."""
        U = U or self.ambient()
        members, cs, _ = self.pieces(U, Y)
        non_pants = [cs.components[k] for k in members if cs.components[k].xi != 0]
        if len(non_pants) == 1:
            return "UNIQUE", non_pants[0], non_pants
        if not non_pants:
            return "NONE", None, []
        return "NOT_UNIQUE", None, non_pants

    def unique_non_pants_index(self, Y, U: Region = None):
        """Component index (in the cut along X + Y) of the unique non-pants, else None."""
        U = U or self.ambient()
        members, cs, _ = self.pieces(U, Y)
        non_pants = [k for k in members if cs.components[k].xi != 0]
        return non_pants[0] if len(non_pants) == 1 else None

    def is_good_simplex(self, X, U: Region = None) -> GoodnessVerdict:
        """Every nonempty subsimplex of ``X`` leaves a unique non-pants in ``U``."""
        U = U or self.ambient()
        X = _key(X)
        key = (U, X)
        hit = self._good.get(key)
        if hit is not None:
            return hit
        verdict = GoodnessVerdict(True)
        for k in range(1, len(X) + 1):
            for sub in combinations(X, k):
                if len(sub) < len(X):
                    sub_v = self.is_good_simplex(sub, U)
                    if not sub_v:
                        verdict = sub_v
                        break
                    continue
                status, _, non_pants = self.unique_non_pants(sub, U)
                if status != "UNIQUE":
                    verdict = GoodnessVerdict(False, sub, tuple(non_pants))
                    break
            if not verdict:
                break
        self._good[key] = verdict
        return verdict

    def is_good(self, *curves, U: Region = None) -> bool:
        return bool(self.is_good_simplex(curves, U))


@dataclass
class AuditReport:
    """Outcome of an exhaustive check over cut surfaces ``Sigma - X``."""

    name: str
    cutting_sets: int = 0
    checked: int = 0
    violations: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"check": self.name, "cutting_sets": self.cutting_sets, "checked": self.checked,
                "violations": len(self.violations), "examples": self.violations[:20]}


def cutting_sets(cl: Classifier, curves, disjoint_pairs) -> list:
    """Every vertex, and every good edge, of the given curve list."""
    out = [(c,) for c in curves]
    for a, b in disjoint_pairs:
        if cl.is_good(a, b):
            out.append(_key([a, b]))
    return out


def _members(cl: Classifier, X, curves) -> dict:
    """Curves of the list grouped by the component of ``Sigma - X`` containing them."""
    cs, _ = cl.cut(X)
    groups = {k: [] for k in range(len(cs.components))}
    for c in curves:
        if c in X:
            continue
        for k in groups:
            if cl.inside(Region(X, k), c):
                groups[k].append(c)
                break
    return groups


def audit_cut_surfaces(cl: Classifier, curves, disjoint_pairs, checks=("vertices", "edges", "c0")):
    """Exhaustive checks on every ``Upsilon = Sigma - X``, X a vertex or a good edge.

    ``vertices``: good vertices inside a component are essentially
    non-separating there.  ``edges``: vertices and edges of the essentially
    non-separating graph of a component are good in the ambient surface.
    ``c0``: the three-case edge definition agrees with the non-pants count.
    """
    curves = [tuple(c) for c in curves]
    pairs = {frozenset((tuple(a), tuple(b))) for a, b in disjoint_pairs}
    reports = {name: AuditReport(name) for name in checks}
    for X in cutting_sets(cl, curves, [tuple(p) for p in pairs]):
        for r in reports.values():
            r.cutting_sets += 1
        for k, members in _members(cl, X, curves).items():
            U = Region(X, k)
            ens = {c: cl.is_essentially_nonseparating(c, U) for c in members}
            for c in members:
                good = cl.is_good(c)
                if "vertices" in reports:
                    reports["vertices"].checked += 1
                    if good and not ens[c]:
                        reports["vertices"].violations.append({"X": X, "component": k, "curve": c})
                if "edges" in reports and ens[c]:
                    reports["edges"].checked += 1
                    if not good:
                        reports["edges"].violations.append({"X": X, "component": k, "vertex": c})
            for i, a in enumerate(members):
                for b in members[i + 1:]:
                    if frozenset((a, b)) not in pairs or not (ens[a] and ens[b]):
                        continue
                    c0 = cl.c0_edge(a, b, U)
                    if "c0" in reports:
                        reports["c0"].checked += 1
                        if c0 != cl.c0_edge_cases(a, b, U):
                            reports["c0"].violations.append({"X": X, "component": k, "pair": [a, b], "count_rule": c0})
                    if "edges" in reports and c0:
                        reports["edges"].checked += 1
                        if not cl.is_good(a, b):
                            reports["edges"].violations.append({"X": X, "component": k, "edge": [a, b]})
    return reports


def audit_c0_pairs(cl: Classifier, disjoint_pairs) -> AuditReport:
    """Three-case versus non-pants-count C0 rule on every ambient pair."""
    rep = AuditReport("c0_ambient", cutting_sets=1)
    for a, b in disjoint_pairs:
        a, b = tuple(a), tuple(b)
        if not (cl.is_essentially_nonseparating(a) and cl.is_essentially_nonseparating(b)):
            continue
        rep.checked += 1
        c0 = cl.c0_edge(a, b)
        if c0 != cl.c0_edge_cases(a, b):
            rep.violations.append({"pair": [a, b], "count_rule": c0})
    return rep


__all__ = [
    "Classifier",
    "ClassifyError",
    "GoodnessVerdict",
    "Region",
    "AuditReport",
    "cutting_sets",
    "audit_cut_surfaces",
    "audit_c0_pairs",
]
