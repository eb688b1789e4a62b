"""Singular points of the D6 monodromy surfaces and the reducible data that
lands on them.

Run: python demos/monodromy_surfaces.py
"""

from painleve3.exactalg import RatFun
from painleve3.monodromy import reducible_locus, singular_points, surface

cases = [("alpha = beta = 3", 3, 3), ("alpha = beta = 1", 1, 1), ("alpha = beta = -1", -1, -1),
         ("alpha = 1/beta = 3", 3, RatFun.coerce("1/3")), ("generic (2, 5)", 2, 5)]
for label, a, b in cases:
    S = surface("D6", a, b)
    pts = [tuple(str(c) for c in p) for p in singular_points(S).points]
    comps = reducible_locus(a, b)
    print(f"{label}: singular points {pts or 'none'}; {len(comps)} reducible component(s)")
    for c in comps:
        print(f"    {c.to_json()['coordinate']} verified: {c.verify()}")
