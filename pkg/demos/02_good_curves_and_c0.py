"""
Good simplices and the C0 edge rule
===================================

Cutting along a multicurve leaves components; a simplex is good when every
face leaves exactly one component that is not a pair of pants.  The audit
at the end reproduces the 162 counterexamples found on the thrice punctured
torus.
"""

from curvecomplex.classify import Classifier, audit_c0_pairs, audit_cut_surfaces
from curvecomplex.intersection import cut_along
from curvecomplex.universe import get_universe

u, _ = get_universe(1, 3, 2)
cl = Classifier(u.tri)

x = u.curves[0]
for comp in cut_along(u.tri, [x]).components:
    print("component", comp.signature(), "complexity", comp.xi)
print("good:", cl.is_good(x), "pants curve:", cl.is_pants_curve(x))

A = u.disjointness()
pairs = [(u.curves[i], u.curves[j]) for i in range(len(u)) for j in range(i + 1, len(u)) if A[i, j]]
reports = audit_cut_surfaces(cl, u.curves, pairs)
reports["c0_ambient"] = audit_c0_pairs(cl, pairs)
for name, rep in reports.items():
    print(f"{name:12s} checked {rep.checked:5d}  violations {len(rep.violations)}")
