"""
Spheres around a pants curve
============================

The curve graph of a finite universe, breadth-first layers around an
origin, and the census of each layer and of consecutive pairs of layers.
"""

import json

from curvecomplex.curvegraph import build_graph, distance_estimate, sphere_census
from curvecomplex.curves import pants_curve
from curvecomplex.intersection import intersection_number
from curvecomplex.universe import get_universe

u, _ = get_universe(0, 6, 2)
g = build_graph(u, "disjoint")
o = pants_curve(u.tri, 1, 2)
census = sphere_census(g, o, [0, 1, 2, 3])
for row in census["spheres"]:
    print(json.dumps(row))

# distance bounds: filling pairs are at distance at least 3
x, y = u.curves[5], u.curves[-5]
est = distance_estimate(x, y, g)
print("i =", intersection_number(u.tri, x, y), "distance in", (est.lower, est.upper), "exact:", est.exact)

# DOT export of the first sphere
dist = g.bfs(g.index_of(o))
dot = g.to_dot([i for i in range(len(u)) if dist[i] == 1])
print(dot.splitlines()[0], "...", dot.count(" -- "), "edges")
