from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from curvecomplex.classify import ClassifyError, Classifier, Region, audit_c0_pairs, audit_cut_surfaces
from curvecomplex.intersection import cut_along

from conftest import universe


# Oracles built on raw cuts of the whole surface, bypassing the classifier.
def oracle_good(tri, X):
    for k in range(1, len(X) + 1):
        for sub in combinations(X, k):
            non_pants = [c for c in cut_along(tri, list(sub)).components if c.xi != 0]
            if len(non_pants) != 1:
                return False
    return True


def oracle_pants_curve(tri, c):
    return any(k.h == 0 and k.m == 2 and k.boundaries == 1 for k in cut_along(tri, [c]).components)


def oracle_nonseparating(tri, Y):
    return len(cut_along(tri, list(Y)).components) == 1


def _simplex(data, u, A, size):
    X = [data.draw(st.integers(0, len(u) - 1))]
    for _ in range(size - 1):
        cands = [j for j in range(len(u)) if all(A[j, k] for k in X)]
        if not cands:
            break
        X.append(data.draw(st.sampled_from(cands)))
    return [u.curves[k] for k in X]


@pytest.mark.parametrize("g,n", [(0, 5), (1, 2), (0, 6), (1, 3), (2, 2)])
def test_vertex_predicates_match_raw_cuts(g, n):
    u = universe(g, n, 2)
    cl = Classifier(u.tri)
    for c in u.curves[:80]:
        assert cl.is_pants_curve(c) == oracle_pants_curve(u.tri, c)
        assert cl.is_eventually_nonseparating([c]) == oracle_nonseparating(u.tri, [c])
        assert cl.is_good(c) == oracle_good(u.tri, [c])


def test_every_curve_on_five_punctured_sphere_is_a_good_pants_curve():
    u = universe(0, 5, 2)
    cl = Classifier(u.tri)
    assert all(cl.is_pants_curve(c) and cl.is_good(c) for c in u.curves)


@pytest.mark.parametrize("g,n", [(0, 6), (1, 3), (2, 2)])
@settings(max_examples=40, deadline=None)
@given(data=st.data())
def test_goodness_matches_oracle_and_is_closed_under_faces(g, n, data):
    u = universe(g, n, 2)
    cl = Classifier(u.tri)
    X = _simplex(data, u, u.disjointness(), data.draw(st.integers(1, 3)))
    good = cl.is_good(*X)
    assert good == oracle_good(u.tri, X)
    assert good == cl.is_good(*reversed(X))
    if good:
        for k in range(1, len(X)):
            for sub in combinations(X, k):
                assert cl.is_good(*sub)
    else:
        v = cl.is_good_simplex(X)
        assert v.witness and set(v.witness) <= set(map(tuple, X))


@pytest.mark.parametrize("g,n", [(0, 6), (1, 3)])
@settings(max_examples=30, deadline=None)
@given(data=st.data())
def test_c0_rules_agree_with_raw_count(g, n, data):
    u = universe(g, n, 2)
    cl = Classifier(u.tri)
    X = _simplex(data, u, u.disjointness(), 2)
    if len(X) < 2:
        return
    a, b = X
    if a == b or not (cl.is_essentially_nonseparating(a) and cl.is_essentially_nonseparating(b)):
        return
    raw = sum(1 for c in cut_along(u.tri, [a, b]).components if c.xi != 0) <= 1
    assert cl.c0_edge(a, b) == raw == cl.c0_edge_cases(a, b)


def test_c0_edge_requires_essentially_nonseparating_vertices():
    u = universe(1, 3, 2)
    cl = Classifier(u.tri)
    bad = next(c for c in u.curves if not cl.is_essentially_nonseparating(c))
    with pytest.raises(ClassifyError):
        cl.c0_edge(bad, bad)


@pytest.mark.parametrize("g,n", [(0, 6), (1, 3)])
@settings(max_examples=25, deadline=None)
@given(data=st.data())
def test_inside_means_disjoint_and_in_component(g, n, data):
    u = universe(g, n, 2)
    cl = Classifier(u.tri)
    A = u.disjointness()
    (x,) = _simplex(data, u, A, 1)
    comps = cut_along(u.tri, [x]).components
    for k in range(len(comps)):
        V = cl.region([x], k)
        inside = [c for c in u.curves if cl.inside(V, c)]
        for c in inside:
            assert c != x and A[u.index[c], u.index[x]]
        if comps[k].is_pants:
            assert inside == []
    # every curve disjoint from x lies in exactly one component
    for j in range(len(u)):
        if A[u.index[x], j]:
            hits = [k for k in range(len(comps)) if cl.inside(cl.region([x], k), u.curves[j])]
            assert len(hits) == 1


def test_region_relative_pants_curve():
    u = universe(0, 6, 2)
    cl = Classifier(u.tri)
    for x in u.curves[:20]:
        for k, comp in enumerate(cut_along(u.tri, [x]).components):
            V = Region((x,), k)
            for c in u.curves:
                if cl.inside(V, c) and cl.is_pants_curve(c, V):
                    # a pants curve of V bounds two punctures there, hence also in the surface
                    assert cl.is_pants_curve(c)


def test_five_punctured_sphere_audit_is_clean():
    u = universe(0, 5, 2)
    cl = Classifier(u.tri)
    A = u.disjointness()
    pairs = [(u.curves[i], u.curves[j]) for i in range(len(u)) for j in range(i + 1, len(u)) if A[i, j]]
    reports = audit_cut_surfaces(cl, u.curves, pairs)
    reports["c0_ambient"] = audit_c0_pairs(cl, pairs)
    for rep in reports.values():
        assert rep.violations == []
    assert reports["vertices"].checked > 0
