"""Independent constructions used as test oracles.

Slope curves are built directly from homology data of the standard charts,
never through the package's tracing or surgery code.
"""

from math import gcd


def torus_edge_classes():
    # one-punctured torus chart: square sides a, b and the diagonal a + b
    return [(1, 0), (0, 1), (1, 1)]


def torus_slope_curve(p, q):
    """Normal coordinates of the (p, q) curve on the once-punctured torus."""
    return tuple(abs(p * v - q * u) for u, v in torus_edge_classes())


def pillowcase_edge_slopes(tri):
    """Slope of each edge of the tetrahedral chart, read as a pillowcase.

    Square corners in cyclic order are vertices 0, 1, 2, 3; sides have slopes
    0 and infinity.  The diagonal 0-2 runs across the front square and 1-3
    across the back one; both have slope 1 (every slope has two disjoint arcs).
    """
    slope = {
        frozenset((0, 1)): (1, 0), frozenset((2, 3)): (1, 0),
        frozenset((1, 2)): (0, 1), frozenset((3, 0)): (0, 1),
        frozenset((0, 2)): (1, 1), frozenset((1, 3)): (1, 1),
    }
    return [slope[frozenset(tri.edge_endpoints(e))] for e in range(tri.num_edges)]


def pillowcase_slope_curve(tri, p, q):
    """The curve of slope q/p (direction (p, q)) on the four-punctured sphere."""
    return tuple(abs(p * v - q * u) for u, v in pillowcase_edge_slopes(tri))


def primitive_slopes(bound):
    """Primitive directions (p, q) up to sign with |p|, |q| <= bound."""
    out = []
    for p in range(0, bound + 1):
        for q in range(-bound, bound + 1):
            if (p, q) == (0, 0) or gcd(p, abs(q)) != 1:
                continue
            if p == 0 and q < 0:
                continue
            out.append((p, q))
    return out


def dense_h1_rank_mod2(vertices, edges):
    """First Betti number mod 2 of the flag complex, by dense numpy elimination."""
    import numpy as np

    vs = sorted(set(vertices))
    es = sorted({(min(a, b), max(a, b)) for a, b in edges})
    nb = {v: set() for v in vs}
    for a, b in es:
        nb[a].add(b)
        nb[b].add(a)
    tris = [(a, b, c) for a, b in es for c in nb[a] & nb[b] if c > b]
    vi = {v: k for k, v in enumerate(vs)}
    ei = {e: k for k, e in enumerate(es)}
    d1 = np.zeros((len(vs), len(es)), dtype=np.uint8)
    for k, (a, b) in enumerate(es):
        d1[vi[a], k] = d1[vi[b], k] = 1
    d2 = np.zeros((len(es), len(tris)), dtype=np.uint8)
    for k, (a, b, c) in enumerate(tris):
        for e in ((a, b), (a, c), (b, c)):
            d2[ei[e], k] = 1
    return len(es) - _rank2(d1) - _rank2(d2)


def _rank2(M):
    import numpy as np

    M = M.copy() % 2
    rank = 0
    rows, cols = M.shape
    for c in range(cols):
        piv = np.flatnonzero(M[rank:, c])
        if not len(piv):
            continue
        p = rank + piv[0]
        M[[rank, p]] = M[[p, rank]]
        hit = np.flatnonzero(M[:, c])
        hit = hit[hit != rank]
        M[hit] ^= M[rank]
        rank += 1
        if rank == rows:
            break
    return rank


def euler_characteristic(g, n):
    return 2 - 2 * g - n


def component_euler(comp):
    """Euler characteristic of a cut component from its (h, m, p, u) data."""
    return 2 - 2 * comp.h - comp.m - 2 * comp.p - comp.u
