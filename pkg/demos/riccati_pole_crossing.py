"""A Riccati solution of PIII(D6), its Frobenius series and a numerical
continuation through one of its poles.

For (eps1, eps2) = (1, 1) and d = 1/4 the Bessel-type equation is
y'' + (2/t) y' + 4y = 0 with the regular solution y = sin(2t)/(2t), so
q = y'/(2y) = cot(2t) - 1/(2t), which has a pole at t = pi/2.

Run: python demos/riccati_pole_crossing.py
"""

from fractions import Fraction

import numpy as np

from painleve3.laxops import D6, a_from_derivative
from painleve3.numflow import PathSpec, integrate, residual
from painleve3.special import riccati_isomonodromy, riccati_solution

fam = riccati_isomonodromy(1, 1)
print(f"q' = {fam.rhs}")
print(f"parameters (theta0, thetainf) = ({fam.theta0}, {fam.thetainf})")
print(f"Bessel form: y'' + (({fam.bessel_c})/t) y' + ({fam.bessel_lambda}) y = 0")

sol = riccati_solution(1, 1, Fraction(1, 4), N=30)
closed = lambda t: 1 / np.tan(2 * t) - 1 / (2 * t)
t0 = 1.0
q0 = complex(sol.q(t0))
a0 = a_from_derivative(D6, q0, complex(sol.family.rhs.evaluate({"q": q0, "t": t0})), t0)
tr = integrate(D6, (sol.family.theta0, sol.family.thetainf), (0.0, q0, a0),
               PathSpec.line(1.0, 2.0, 101))

for ev in tr.events:
    print(f"event: {ev['kind']}")
A = tr.arrays()
print(f"max |q - closed form| along the path: {np.abs(A['q'] - closed(A['t'])).max():.2e}")
print(f"max residual: {residual(tr).max:.2e}")
