"""
Subsurface projection and the outward push
==========================================

Project curves into the complement of a non-separating curve, then fill a
loop in the outer layer of a genus two universe and check the disk.
"""

import random

from curvecomplex.curvegraph import build_graph
from curvecomplex.disk import annulus_profile
from curvecomplex.intersection import cut_along
from curvecomplex.projection import Subsurface
from curvecomplex.surgery import context, push_loop, sample_loops
from curvecomplex.universe import get_universe

u, _ = get_universe(1, 2, 2)
x = next(c for c in u.curves if len(cut_along(u.tri, [c]).components) == 1)
V = Subsurface(u.tri, [x], 0)
for c in u.curves[:6]:
    p = V.project(c)
    print(c, "->", len(p.curves), "curves from", p.arcs, "arcs")

u, _ = get_universe(2, 2, 2)
g = build_graph(u, "disjoint")
o = u.curves[0]
ctx = context(g, o)
for loop in sample_loops(ctx, 2, 4, random.Random(1)):
    out = push_loop(loop, o, ctx)
    print(len(loop), "curves:", out.status.value, out.branch)
    if out:
        disk = out.witness["disk"]
        print("  faces", len(disk.faces), "profile", annulus_profile(disk, ctx.layer).to_dict())
