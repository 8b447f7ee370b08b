"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

The lines are collected in ``VERDICTS`` and printed in the terminal summary
(see conftest.py); running this file as a script prints them directly.
"""

import json
import random
import subprocess
import sys
import time
from pathlib import Path

import pytest

from curvecomplex import cli
from curvecomplex.classify import Classifier, Region, audit_c0_pairs, audit_cut_surfaces
from curvecomplex.curvegraph import build_graph, distance_estimate, fill_loop, log2_bound, random_loops
from curvecomplex.disk import DiskConstraints, annulus_profile, verify_disk
from curvecomplex.intersection import cut_along, intersection_number
from curvecomplex.surface import triangulation_for
from curvecomplex.surgery import (Status, context, find_good_edge_partner, find_good_triangle_apex,
                                  fix_bad_triangle, push_loop, replace_bad_triangle, sample_loops)
from curvecomplex.curves import pants_curve

from conftest import universe
from oracles import component_euler, pillowcase_slope_curve, primitive_slopes, torus_slope_curve

DATA = Path(__file__).parent / "data" / "lemma_instances.json"
VERDICTS = []
ORDERINGS = ["a_inner", "b_inner", "a_first", "b_first", "random:1", "random:7"]


def verdict(k, name, ok, detail):
    line = f"CRITERION {k:>2} {'PASS' if ok else 'FAIL'}: {name} ({detail})"
    VERDICTS.append(line)
    print(line)
    assert ok, line


def _disjoint_pairs(u):
    A = u.disjointness()
    return [(u.curves[i], u.curves[j]) for i in range(len(u)) for j in range(i + 1, len(u)) if A[i, j]]


# 1 -----------------------------------------------------------------------------
def test_criterion_01_slope_oracle():
    t0 = time.perf_counter()
    slopes = primitive_slopes(5)
    checked = mismatches = 0
    for g, n, factor in ((1, 1, 1), (0, 4, 2)):
        tri = triangulation_for(g, n)
        build = torus_slope_curve if g == 1 else (lambda p, q: pillowcase_slope_curve(tri, p, q))
        curves = {s: build(*s) for s in slopes}
        for s in slopes:
            for t in slopes:
                expect = factor * abs(s[0] * t[1] - s[1] * t[0])
                checked += 1
                mismatches += intersection_number(tri, curves[s], curves[t], shortcut=False) != expect
    secs = time.perf_counter() - t0
    verdict(1, "intersection matches slope formulas on the torus and pillowcase",
            mismatches == 0 and secs < 60, f"{checked} pairs, {mismatches} mismatches, {secs:.1f}s")


# 2 -----------------------------------------------------------------------------
def test_criterion_02_intersection_properties():
    t0 = time.perf_counter()
    u = universe(0, 5, 3)
    tri = u.tri
    bad = []
    for a in u.curves:
        if intersection_number(tri, a, a) != 0 or intersection_number(tri, a, a, shortcut=False) != 0:
            bad.append(("self", a))
    pairs = 0
    for i, a in enumerate(u.curves):
        for b in u.curves[i + 1:]:
            pairs += 1
            ab = intersection_number(tri, a, b, shortcut=False)
            if intersection_number(tri, b, a, shortcut=False) != ab:
                bad.append(("symmetry", a, b))
            order = ORDERINGS[pairs % len(ORDERINGS)]
            if intersection_number(tri, a, b, ordering=order, shortcut=False) != ab:
                bad.append(("ordering", order, a, b))
    secs = time.perf_counter() - t0
    verdict(2, "symmetry, i(a,a)=0 and ordering independence on the five-punctured sphere at W=3",
            not bad and secs < 300, f"{len(u)} curves, {pairs} pairs, {len(bad)} failures, {secs:.1f}s")


# 3 -----------------------------------------------------------------------------
def _multicurves(u, size):
    A = u.disjointness()
    n = len(u)
    out = [[i] for i in range(n)]
    if size >= 2:
        out += [[i, j] for i in range(n) for j in range(i + 1, n) if A[i, j]]
    if size >= 3:
        out += [[i, j, k] for i in range(n) for j in range(i + 1, n) if A[i, j]
                for k in range(j + 1, n) if A[i, k] and A[j, k]]
    return [[u.curves[i] for i in X] for X in out]


def test_criterion_03_cut_additivity():
    checked = 0
    bad = []
    for g, n in ((0, 6), (1, 3)):
        u = universe(g, n, 2)
        xi = 3 * g - 3 + n
        chi = 2 - 2 * g - n
        for X in _multicurves(u, 3):
            comps = cut_along(u.tri, X).components
            # complexity recomputed from the raw component data, not the component's own property
            total = sum(3 * c.h - 3 + c.m + 2 * c.p + c.u for c in comps)
            checked += 1
            if total + len(X) != xi or sum(component_euler(c) for c in comps) != chi:
                bad.append(X)
    verdict(3, "cut additivity for every multicurve of size at most 3 (Sigma_{0,6}, Sigma_{1,3}, W=2)",
            not bad, f"{checked} multicurves, {len(bad)} violations")


# 4 -----------------------------------------------------------------------------
def test_criterion_04_good_vertices_and_edges_audit():
    t0 = time.perf_counter()
    counts = {}
    for g, n in ((1, 3), (0, 6)):
        u = universe(g, n, 2)
        reps = audit_cut_surfaces(Classifier(u.tri), u.curves, _disjoint_pairs(u), ("vertices", "edges"))
        for name, rep in reps.items():
            counts[f"Sigma_{{{g},{n}}} {name}"] = (rep.cutting_sets, rep.checked, len(rep.violations))
    secs = time.perf_counter() - t0
    total = sum(v[2] for v in counts.values())
    detail = "; ".join(f"{k}: {v[1]} checked, {v[2]} violations" for k, v in counts.items())
    verdict(4, "good vertices lie in C0 and C0 edges are good, exhaustive over vertices and good edges",
            total == 0 and secs < 1800, f"{detail}; {secs:.0f}s")


# 5 -----------------------------------------------------------------------------
def test_criterion_05_c0_definition_equivalence(tmp_path):
    rows = []
    bad = 0
    for g, n in ((1, 3), (0, 6)):
        u = universe(g, n, 2)
        cl = Classifier(u.tri)
        pairs = _disjoint_pairs(u)
        reps = audit_cut_surfaces(cl, u.curves, pairs, ("c0",))
        reps["c0_ambient"] = audit_c0_pairs(cl, pairs)
        for name, rep in reps.items():
            bad += len(rep.violations)
            rows.append(f"Sigma_{{{g},{n}}} {name}: {rep.checked} pairs, {len(rep.violations)} mismatches")
        # the command-line audit must exit 0 (a mismatch there is exit code 4)
        code = cli.main(["classify", "--surface", f"{g},{n}", "--check", "c0", "--out", str(tmp_path / "c0.json")])
        rows.append(f"cli exit {code}")
        bad += code != 0
    verdict(5, "three-case C0 rule agrees with the one-non-pants-component formulation", bad == 0, "; ".join(rows))


# 6 -----------------------------------------------------------------------------
def test_criterion_06_distance_bound():
    t0 = time.perf_counter()
    u = universe(0, 6, 3)
    g = build_graph(u, "disjoint")
    M = u.intersection_matrix()
    n = len(u)
    exact = {}
    bad = []
    for i in range(n):
        for j in range(i + 1, n):
            est = distance_estimate(u.curves[i], u.curves[j], g)
            if not est.exact:
                continue
            d, inter = est.lower, int(M[i, j])
            exact[d] = exact.get(d, 0) + 1
            if inter > 0 and d > log2_bound(inter):
                bad.append((i, j, d, inter))
            if inter == 0 and d != 1:
                bad.append((i, j, d, inter))
    secs = time.perf_counter() - t0
    verdict(6, "d <= 2 log2 i + 2 for every exactly certified pair in Sigma_{0,6} at W=3",
            not bad, f"exact pairs by distance {dict(sorted(exact.items()))}, {len(bad)} violations, {secs:.0f}s")


# 7 -----------------------------------------------------------------------------
def test_criterion_07_constructive_lemmas():
    data = json.loads(DATA.read_text())
    passed = {}
    for op in ("edge_partner", "triangle_apex"):
        ok = 0
        for row in data[op]:
            tri = triangulation_for(*row["surface"])
            V = Region(tuple(sorted(tuple(x) for x in row["X"])), row["component"])
            a = tuple(row["a"])
            fresh = Classifier(tri)
            if op == "edge_partner":
                out = find_good_edge_partner(a, V, Classifier(tri))
                simplex = [a]
            else:
                b = tuple(row["b"])
                out = find_good_triangle_apex(a, b, V, Classifier(tri))
                simplex = [a, b]
            if out.status is not Status.SUCCESS or tri.fingerprint != row["triangulation"]:
                continue
            c = out.witness
            good = (c not in simplex and fresh.inside(V, c)
                    and all(intersection_number(tri, c, s, shortcut=False) == 0 for s in simplex)
                    and fresh.is_good(*simplex, c))
            ok += good
        passed[op] = (ok, len(data[op]))
    full = all(ok == tot and tot >= 10 for ok, tot in passed.values())
    verdict(7, "good edge partner and good triangle apex verify on the fixed instance list",
            full, ", ".join(f"{k}: {v[0]}/{v[1]}" for k, v in passed.items()))


# 8 -----------------------------------------------------------------------------
def _reverify_push(u, tri, loop, out, layer_of, r):
    disk = out.witness["disk"]
    cl = Classifier(tri)
    if disk.boundary_labels() != loop:
        return False
    if verify_disk(disk, DiskConstraints(tri, loop=loop, classifier=cl)):
        return False
    if not all(cl.is_good(disk.labels[a], disk.labels[b]) for a, b in disk.edges()):
        return False
    prof = annulus_profile(disk, layer_of)
    return all(prof.sigma(k) == 0 for k in range(0, r - 2))


def _reverify_fix(tri, x, y, z, a, layer_of, allowed):
    cl = Classifier(tri)
    return (layer_of(a) in allowed
            and all(intersection_number(tri, a, c, shortcut=False) == 0 and a != c for c in (x, y, z))
            and cl.is_good(a, x, y) and cl.is_good(a, x, z) and cl.is_good(a, y, z))


def _random_triangle(ctx, rng, r):
    layer = [i for i in range(len(ctx.universe)) if ctx.dist[i] == r]
    for _ in range(200):
        x = rng.choice(layer)
        nb = [j for j in ctx.graph.neighbors(x) if ctx.dist[j] in (r, r + 1)]
        if len(nb) < 2:
            continue
        y, z = rng.sample(nb, 2)
        if ctx.graph.has_edge(y, z):
            return ctx.curve(x), ctx.curve(y), ctx.curve(z)
    return None


def test_criterion_08_surgery_soundness():
    calls = 0
    status = {}
    unsound = []
    for (g, n), seed in (((0, 6), 11), ((1, 3), 12)):
        u = universe(g, n, 2)
        graph = build_graph(u, "disjoint")
        o = pants_curve(u.tri, 1, 2) if g == 0 else u.curves[0]
        ctx = context(graph, o)
        fresh_dist = graph._bfs(graph.index_of(o))          # recomputed, not the memoized row
        layer_of = lambda c, d=fresh_dist, uu=u: int(d[uu.index[c]])
        rng = random.Random(seed)
        for r in (1, 2, 3):
            for L in sample_loops(ctx, r, 12, rng):
                out = push_loop(L, o, ctx)
                calls += 1
                status[("push_loop", out.status.value)] = status.get(("push_loop", out.status.value), 0) + 1
                if out and not _reverify_push(u, u.tri, L, out, layer_of, r):
                    unsound.append(("push_loop", L))
        for _ in range(40):
            r = rng.choice((0, 1, 2))
            T = _random_triangle(ctx, rng, r)
            if T is None:
                continue
            x, y, z = T
            out = fix_bad_triangle(x, y, z, o, r, ctx)
            calls += 1
            status[("fix_bad_triangle", out.status.value)] = status.get(("fix_bad_triangle", out.status.value), 0) + 1
            allowed = {1} if x == o else {r, r + 1}
            if out and not _reverify_fix(u.tri, x, y, z, out.witness, layer_of, allowed):
                unsound.append(("fix_bad_triangle", T))
            rb = replace_bad_triangle(y, x, z, o, r, ctx)
            calls += 1
            status[("replace_bad_triangle", rb.status.value)] = status.get(("replace_bad_triangle", rb.status.value), 0) + 1
            if rb:
                cl = Classifier(u.tri)
                tris = rb.witness["triangles"]
                if not all(cl.is_good(*t) for t in tris):
                    unsound.append(("replace_bad_triangle", T))
    counts = ", ".join(f"{op} {st}: {k}" for (op, st), k in sorted(status.items()))
    verdict(8, "every seeded surgery SUCCESS passes independent re-verification",
            calls >= 100 and not unsound, f"{calls} calls; {counts}; {len(unsound)} unsound")


# 9 -----------------------------------------------------------------------------
def test_criterion_09_census_reproducible(tmp_path):
    argv = ["census", "--surface", "0,6", "--max-weight", "3", "--origin", "pants:1,2",
            "--radii", "0,1,2,3", "--seed", "0"]
    reports = []
    for k in range(2):
        out = tmp_path / f"census{k}.json"
        assert cli.main(argv + ["--out", str(out)]) == 0
        reports.append(json.loads(out.read_text()))
    out = tmp_path / "census_sub.json"
    proc = subprocess.run([sys.executable, "-m", "curvecomplex.cli", *argv, "--out", str(out)],
                          capture_output=True, text=True)
    reports.append(json.loads(out.read_text()) if proc.returncode == 0 else None)
    same = all(r is not None and r["result_sha256"] == reports[0]["result_sha256"]
               and json.dumps(r["result"], sort_keys=True) == json.dumps(reports[0]["result"], sort_keys=True)
               for r in reports)
    res = reports[0]["result"]
    s1 = next(row for row in res["spheres"] if row["r"] == 1)
    unions = [row["r"] for row in res["unions"]]
    verdict(9, "sphere census on Sigma_{0,6}, W=3, origin pants{1,2} is bit-identical across runs",
            same and unions == [0, 1, 2, 3],
            f"sha256 {reports[0]['result_sha256'][:16]}, S_1 has {s1['vertices']} vertices in "
            f"{s1['components']} component(s), union rows for r in {unions}")


# 10 ----------------------------------------------------------------------------
def test_criterion_10_bgit_lipschitz(tmp_path):
    out = tmp_path / "bgit.json"
    code = cli.main(["bgit", "--surface", "1,2", "--subsurface-from", "first-nonseparating",
                     "--samples", "20", "--seed", "1", "--lipschitz", "--out", str(out)])
    rep = json.loads(out.read_text()) if code == 0 else {}
    lip = rep.get("result", {}).get("lipschitz", {})
    u = universe(1, 2, 2)
    disjoint_pairs = len(_disjoint_pairs(u))
    provenance = all(rep.get(k) is not None for k in ("tool_version", "universe", "config", "seed", "wall_clock"))
    ok = code == 0 and provenance and lip.get("checked", 0) > 0 and lip.get("violations") == []
    verdict(10, "projected disjoint pairs have d_V <= 4 on Sigma_{1,2} minus a non-separating curve",
            ok, f"{disjoint_pairs} disjoint pairs, {lip.get('checked')} with both projections nonempty, "
                f"max d_V {lip.get('max_upper')}, {len(lip.get('violations', []))} violations")


# 11 ----------------------------------------------------------------------------
def test_criterion_11_fill_loop_soundness():
    u = universe(0, 6, 2)
    g = build_graph(u, "disjoint")
    bad = []
    tri_count = sq_count = rnd = 0
    for a, b in g.edges():
        for c in g.neighbors(b):
            if c > b and g.has_edge(a, c):
                loop = [u.curves[a], u.curves[b], u.curves[c]]
                fr = fill_loop(g, loop)
                tri_count += 1
                if not fr or len(fr.disk.faces) != 1 or verify_disk(fr.disk, DiskConstraints(u.tri, loop=loop)):
                    bad.append(("triangle", a, b, c))
    for a in range(len(g)):
        for b in g.neighbors(a):
            for c in g.neighbors(b):
                if c == a or g.has_edge(a, c):
                    continue
                for d in g.neighbors(c):
                    if d in (a, b) or g.has_edge(b, d) or not g.has_edge(d, a) or a > min(b, c, d) or b > d:
                        continue
                    common = set(g.neighbors(a)) & set(g.neighbors(b)) & set(g.neighbors(c)) & set(g.neighbors(d))
                    if not common or sq_count >= 300:
                        continue
                    w = min(common)
                    loop = [u.curves[v] for v in (a, b, c, d)]
                    fr = fill_loop(g, loop, allowed=lambda v, w=w: v == w)
                    sq_count += 1
                    if not fr or len(fr.disk.faces) != 4 or verify_disk(fr.disk, DiskConstraints(u.tri, loop=loop)):
                        bad.append(("square", a, b, c, d))
    for L in random_loops(g, range(len(u)), 60, random.Random(8)):
        loop = [u.curves[i] for i in L]
        fr = fill_loop(g, loop, area_budget=6)
        if fr:
            rnd += 1
            if verify_disk(fr.disk, DiskConstraints(u.tri, loop=loop)):
                bad.append(("random", L))
    verdict(11, "fill_loop disks verify; triangles fill with 1 face, chordless squares with 4",
            not bad and tri_count and sq_count,
            f"{tri_count} triangles, {sq_count} chordless squares, {rnd} random fills, {len(bad)} failures")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
