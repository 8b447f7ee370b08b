import json
import random
from pathlib import Path

import pytest

from curvecomplex.classify import Classifier, Region
from curvecomplex.curvegraph import GraphError, InvariantViolation, build_graph, random_loops
from curvecomplex.disk import DiskConstraints, LabeledDisk, annulus_profile, verify_disk
from curvecomplex.intersection import intersection_number
from curvecomplex.surface import triangulation_for
from curvecomplex.surgery import (PushBudgets, Status, SurgeryOutcome, _Push, _WorkDisk, clear_layer, cone_replace,
                                  context, diamond_path, find_good_edge_partner, find_good_triangle_apex,
                                  find_tetra_apex, fix_bad_triangle, push_loop, replace_bad_triangle, sample_loops,
                                  transcript)

from conftest import universe

DATA = Path(__file__).parent / "data" / "lemma_instances.json"


@pytest.fixture(scope="module")
def genus_two():
    # Sigma_{2,2} at W=2: layers {0: 1, 1: 106, 2: 145} around the first curve
    u = universe(2, 2, 2)
    g = build_graph(u, "disjoint")
    o = u.curves[0]
    return u, g, o, context(g, o)


class Fresh:
    """Re-checks built from scratch: new classifier, full intersection numbers, own BFS."""

    def __init__(self, u, g, o):
        self.tri = u.tri
        self.cl = Classifier(u.tri)
        self.layers = g.bfs(g.index_of(o))
        self.index = {c: i for i, c in enumerate(u.curves)}

    def layer(self, c):
        return int(self.layers[self.index[c]])

    def disjoint(self, a, b):
        return a != b and intersection_number(self.tri, a, b, shortcut=False) == 0

    def good(self, *cs):
        return self.cl.is_good(*cs)


@pytest.fixture(scope="module")
def fresh(genus_two):
    u, g, o, _ = genus_two
    return Fresh(u, g, o)


def _layer(ctx, k):
    return [ctx.curve(i) for i in range(len(ctx.universe)) if ctx.dist[i] == k]


def _triangles(ctx, limit=40):
    """Triangles with x in S_1 and y, z in S_1 or S_2, split by goodness (all edges good)."""
    good, bad = [], []
    for x in _layer(ctx, 1)[:limit]:
        nb = [ctx.curve(i) for i in ctx.common_neighbors([x], layers=[1, 2])]
        for i, y in enumerate(nb):
            for z in nb[i + 1:]:
                if not ctx.adjacent(y, z):
                    continue
                if ctx.good(x, y, z):
                    good.append((x, y, z))
                elif ctx.good(x, y) and ctx.good(x, z) and ctx.good(y, z):
                    bad.append((x, y, z))
    return good, bad


def _good_diamonds(ctx, want=10):
    out = []
    for x in _layer(ctx, 1):
        for y in _layer(ctx, 1):
            if y <= x or not ctx.adjacent(x, y) or not ctx.good(x, y):
                continue
            ap = [ctx.curve(i) for i in ctx.common_neighbors([x, y], [2]) if ctx.good(ctx.curve(i), x, y)]
            for b in ap[1:]:
                if diamond_path(ap[0], b, x, y, ctx.origin, 1, ctx):
                    out.append((ap[0], b, x, y))
                    if len(out) >= want:
                        return out
    return out


# -- outcome record --------------------------------------------------------------
def test_success_needs_a_passing_record():
    with pytest.raises(InvariantViolation):
        SurgeryOutcome("op", Status.SUCCESS, verification={"a": True, "b": False})
    with pytest.raises(InvariantViolation):
        SurgeryOutcome("op", Status.SUCCESS)
    ok = SurgeryOutcome("op", "SUCCESS", witness=(1, 0), verification={"a": True})
    assert ok and ok.status is Status.SUCCESS
    assert not SurgeryOutcome("op", Status.UNIVERSE_EXHAUSTED)
    assert json.loads(json.dumps(transcript([ok])))[0]["status"] == "SUCCESS"


def test_context_rejects_other_rules_and_origins(genus_two):
    u, g, o, ctx = genus_two
    with pytest.raises(GraphError):
        context(build_graph(u, "good"), o)
    with pytest.raises(GraphError):
        context(ctx, u.curves[1])
    assert context(g, o) is ctx


# -- curve-level lemmas ------------------------------------------------------------
def _instance(row):
    tri = triangulation_for(*row["surface"])
    assert tri.fingerprint == row["triangulation"]
    X = [tuple(x) for x in row["X"]]
    return tri, Region(tuple(sorted(X)), row["component"])


@pytest.mark.parametrize("k", range(4))
def test_edge_partner_instances(k):
    row = json.loads(DATA.read_text())["edge_partner"][k]
    tri, V = _instance(row)
    a = tuple(row["a"])
    out = find_good_edge_partner(a, V, Classifier(tri))
    assert out.status is Status.SUCCESS
    c = out.witness
    cl = Classifier(tri)
    assert cl.inside(V, c) and c != a
    assert intersection_number(tri, a, c, shortcut=False) == 0
    assert cl.is_good(a, c)


@pytest.mark.parametrize("k", [0, 6, 12])
def test_triangle_apex_instances(k):
    row = json.loads(DATA.read_text())["triangle_apex"][k]
    tri, V = _instance(row)
    a, b = tuple(row["a"]), tuple(row["b"])
    out = find_good_triangle_apex(a, b, V, Classifier(tri))
    assert out.status is Status.SUCCESS
    c = out.witness
    cl = Classifier(tri)
    assert cl.inside(V, c) and c not in (a, b)
    assert all(intersection_number(tri, c, d, shortcut=False) == 0 for d in (a, b))
    assert cl.is_good(a, b, c)


def test_lemma_preconditions(genus_two):
    u, g, o, ctx = genus_two
    cl = Classifier(u.tri)
    # the complement of one curve of Sigma_{2,2} has complexity 4 but only one boundary circle
    # when the curve separates; a non-separating curve gives two boundaries
    for x in u.curves[:20]:
        V = Region((x,), 0)
        comp = cl.region_component(V)
        out = find_good_edge_partner(u.curves[-1], V, cl)
        if comp.boundaries != 2:
            assert out.status is Status.PRECONDITION_UNMET
        tri_out = find_good_triangle_apex(u.curves[-1], u.curves[-2], V, cl)
        if comp.xi < 6:
            assert tri_out.status is Status.PRECONDITION_UNMET
            assert any("complexity" in m or "boundaries" in m for m in tri_out.diagnostics["unmet"])


# -- layer moves on Sigma_{2,2} -------------------------------------------------------
def test_layer_move_preconditions(genus_two):
    u, g, o, ctx = genus_two
    good, bad = _triangles(ctx, 10)
    x, y, z = good[0]
    assert find_tetra_apex(x, y, z, o, 2, g).status is Status.PRECONDITION_UNMET
    assert fix_bad_triangle(x, y, z, o, 1, g).status is Status.PRECONDITION_UNMET   # already good
    s2 = _layer(ctx, 2)
    far = next(c for c in s2 if not ctx.adjacent(c, x))
    assert find_tetra_apex(x, y, far, o, 1, g).status is Status.PRECONDITION_UNMET
    out = diamond_path(x, y, x, y, o, 1, g)
    assert out.status is Status.PRECONDITION_UNMET and out.diagnostics["unmet"]


def test_tetra_apex_successes_reverify(genus_two, fresh):
    u, g, o, ctx = genus_two
    good, _ = _triangles(ctx)
    wins = 0
    for x, y, z in good[:25]:
        out = find_tetra_apex(x, y, z, o, 1, g)
        if not out:
            assert out.status is Status.UNIVERSE_EXHAUSTED and "reason" in out.diagnostics
            continue
        wins += 1
        w = out.witness
        assert fresh.layer(w) == 2
        assert all(fresh.disjoint(w, c) for c in (x, y, z))
        assert fresh.good(w, x, y) and fresh.good(w, x, z) and fresh.good(w, y, z)
    assert wins > 0


def test_fix_and_replace_successes_reverify(genus_two, fresh):
    u, g, o, ctx = genus_two
    _, bad = _triangles(ctx)
    fixes = replaces = 0
    for x, y, z in bad[:20]:
        out = fix_bad_triangle(x, y, z, o, 1, g)
        if out:
            fixes += 1
            a = out.witness
            assert fresh.layer(a) in (1, 2)
            assert all(fresh.disjoint(a, c) for c in (x, y, z))
            assert fresh.good(a, x, y) and fresh.good(a, x, z) and fresh.good(a, y, z)
        rb = replace_bad_triangle(y, x, z, o, 1, g)
        if rb:
            replaces += 1
            wit = rb.witness
            for t in wit["triangles"]:
                assert fresh.good(*t)
                assert all(fresh.disjoint(p, q) for i, p in enumerate(t) for q in t[i + 1:])
            if "d" in wit:
                assert rb.branch == "c-inner" and fresh.layer(wit["c"]) == 1 and fresh.layer(wit["d"]) == 2
            else:
                assert rb.branch == "c-outer" and fresh.layer(wit["c"]) == 2
    assert fixes > 0 and replaces > 0


def test_diamond_paths_reverify(genus_two, fresh):
    u, g, o, ctx = genus_two
    found = _good_diamonds(ctx, 8)
    assert found
    for a, b, x, y in found:
        out = diamond_path(a, b, x, y, o, 1, g)
        path = out.witness
        assert path[0] == a and path[-1] == b and len(set(path)) == len(path)
        for p, q in zip(path, path[1:]):
            assert fresh.layer(p) == 2 and fresh.disjoint(p, q)
            assert fresh.good(p, q, x) and fresh.good(p, q, y)


def test_cone_replace_at_origin_reverifies(genus_two, fresh):
    u, g, o, ctx = genus_two
    s1 = [i for i in range(len(u)) if ctx.dist[i] == 1]
    wins = 0
    for L in random_loops(g, s1, 30, random.Random(2)):
        loop = [u.curves[i] for i in L]
        if not all(ctx.good(p, q, o) for p, q in zip(loop, loop[1:] + loop[:1])):
            continue
        out = cone_replace(o, loop, o, 0, g)
        if out:
            wins += 1
            disk = out.witness
            assert disk.boundary_labels() == loop
            assert verify_disk(disk, DiskConstraints(u.tri, loop=loop)) == []
            assert all(fresh.layer(c) == 1 for c in disk.labels)
    assert wins > 0


# -- the outward push ---------------------------------------------------------------
@pytest.mark.parametrize("r", [1, 2])
def test_push_loop_successes_reverify(genus_two, fresh, r):
    u, g, o, ctx = genus_two
    loops = sample_loops(ctx, r, 8, random.Random(1))
    statuses = []
    for L in loops:
        out = push_loop(L, o, g)
        statuses.append(out.status)
        if not out:
            assert out.status is Status.UNIVERSE_EXHAUSTED and out.diagnostics["phase"]
            continue
        disk = out.witness["disk"]
        assert disk.boundary_labels() == L
        assert verify_disk(disk, DiskConstraints(u.tri, loop=L, classifier=Classifier(u.tri))) == []
        for a, b in disk.edges():
            assert fresh.good(disk.labels[a], disk.labels[b])
        prof = annulus_profile(disk, fresh.layer)
        for k in range(0, r - 2):
            assert prof.sigma(k) == 0
    assert Status.SUCCESS in statuses


def test_push_loop_rejects_mixed_layers(genus_two):
    u, g, o, ctx = genus_two
    good, bad = _triangles(ctx, 10)
    loop = next(t for t in good + bad if len({ctx.layer(c) for c in t}) > 1)
    out = push_loop(list(loop), o, g)
    assert out.status is Status.PRECONDITION_UNMET


def _origin_cone(ctx):
    o = ctx.origin
    s1 = [i for i in range(len(ctx.universe)) if ctx.dist[i] == 1]
    for L in random_loops(ctx.graph, s1, 30, random.Random(2)):
        loop = [ctx.curve(i) for i in L]
        if all(ctx.good(p, q, o) for p, q in zip(loop, loop[1:] + loop[:1])):
            labels = [o] + loop
            n = len(loop)
            faces = [(0, 1 + j, 1 + (j + 1) % n) for j in range(n)]
            return LabeledDisk(labels, faces, list(range(1, n + 1))), loop
    raise AssertionError("no good cone on the origin")


def test_clear_layer_pushes_the_origin_off(genus_two, fresh):
    u, g, o, ctx = genus_two
    disk, loop = _origin_cone(ctx)
    out = clear_layer(disk, 0, o, g)
    assert out.status is Status.SUCCESS
    new = out.witness
    assert new.boundary_labels() == loop and o not in new.labels
    assert verify_disk(new, DiskConstraints(u.tri, loop=loop)) == []
    assert annulus_profile(new, fresh.layer).sigma(0) == 0


def test_clear_layer_preconditions(genus_two):
    u, g, o, ctx = genus_two
    disk, loop = _origin_cone(ctx)
    out = clear_layer(disk, 1, o, g)     # the boundary lies in S_1 and the cone point below it
    assert out.status is Status.PRECONDITION_UNMET
    assert len(out.diagnostics["unmet"]) == 2


def test_push_layer_face_phase_stops_cleanly(genus_two):
    # a good triangle entirely in S_1 of this universe has no tetrahedron apex in S_2
    u, g, o, ctx = genus_two
    s1 = _layer(ctx, 1)
    x, y, z = next((p, q, t) for p in s1 for q in s1 for t in s1
                   if p < q < t and ctx.adjacent(p, q) and ctx.adjacent(p, t) and ctx.adjacent(q, t)
                   and ctx.good(p, q, t))
    work = _WorkDisk([x, y, z], [(x, y, z)])
    run = _Push(ctx, [x, y, z], None, PushBudgets())
    assert run.push_layer(work, 1) is False
    ev = run.events[0]
    assert ev["event"] == "face" and ev["outcome"]["op"] == "find_tetra_apex"
    assert ev["outcome"]["status"] == "UNIVERSE_EXHAUSTED"
    assert work.faces == {frozenset((x, y, z))}


def test_push_layer_edge_phase_uses_a_diamond(genus_two, fresh):
    u, g, o, ctx = genus_two
    a, b, x, y = _good_diamonds(ctx, 1)[0]
    work = _WorkDisk([a, x, b, y], [(a, x, y), (b, x, y)])
    run = _Push(ctx, [a, x, b, y], None, PushBudgets())
    run.push_layer(work, 1)
    assert [e["event"] for e in run.events][:1] == ["edge"]
    assert frozenset((x, y)) not in work.edges()
    for f in work.faces:
        assert sum(fresh.layer(c) == 1 for c in f) == 1
        assert fresh.good(*f)
    # the boundary vertices x, y stay in S_1, so the vertex phase stops there
    assert run.events[-1]["event"] == "vertex-on-boundary"


def test_work_disk_refuses_non_manifold_rewrites():
    w = _WorkDisk([1, 2, 3], [(1, 2, 3)])
    assert not w.replace([(1, 2, 4)], [])
    assert w.replace([(1, 2, 3)], [(4, 1, 2), (4, 2, 3), (4, 1, 3)])
    assert not w.replace([], [(5, 1, 2), (6, 1, 2)])    # edge 1-2 would border three faces
    assert len(w.faces) == 3 and sorted(w.link_cycle(4)) == [1, 2, 3]
