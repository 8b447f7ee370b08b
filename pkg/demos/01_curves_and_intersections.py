"""
Curves as normal coordinates
============================

A curve on a punctured surface is stored as one weight per edge of an
ideal triangulation.  This script enumerates a small universe and checks
intersection numbers against the torus slope formula.
"""

from curvecomplex.intersection import intersection_number, minimal_overlay
from curvecomplex.surface import make_surface, triangulation_for
from curvecomplex.universe import get_universe

# the five-punctured sphere: complexity 2, nine edges
print(make_surface(0, 5))
u, hit = get_universe(0, 5, 2)
print(len(u), "curves with every weight at most 2 (cache hit:", hit, ")")
print("first curve:", u.curves[0])

# on the once-punctured torus the curve of slope p/q has weights (|p|, |q|, |p+q|) up to sign
tri = triangulation_for(1, 1)
a, b = (1, 0, 1), (0, 1, 1)
print("i(1/0, 0/1) =", intersection_number(tri, a, b))

# the overlay after bigon reduction realizes the intersection number
ov = minimal_overlay(u.tri, u.curves[0], u.curves[-1])
print("crossings:", ov.crossings, "bigon free:", ov.is_bigon_free())

# disjointness as a boolean matrix over the whole universe
A = u.disjointness()
print("disjoint pairs:", int(A.sum()) // 2)
