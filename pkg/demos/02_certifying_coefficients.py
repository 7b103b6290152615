"""Certifying SSP coefficients by bisection on absolute monotonicity.

A method is absolutely monotonic at radius r when the transformed
coefficients K(I + rA)^-1 and the leftover weight all stay nonnegative.
The largest such r is the SSP coefficient: the step-size multiple, relative
to forward Euler, up to which convex-functional bounds survive.  The result
carries a bracket and a feasibility certificate at the certified radius.
"""

import numpy as np

from essprk import ButcherTableau, abs_monotonic, ssp_coefficient, ssprk_33, ssprk_43

t33 = ssprk_33()
result = ssp_coefficient(t33)
print("classic three-stage, third-order method:")
print(f"  coefficient        {result.coefficient:.12f}")
print(f"  per stage          {result.effective_coefficient:.12f}")
print(f"  bisection bracket  [{result.bracket[0]:.12f}, {result.bracket[1]:.12f}]")
cert = result.certificate
print(f"  certificate        feasible={cert.feasible} at r={cert.radius:.6f}")
print(f"  tightest entry     {cert.worst_entry:.3e} at {cert.worst_index}")

print()
print("probing feasibility directly at a few radii:")
for r in (0.5, 1.0, 1.0000001, 2.0):
    report = abs_monotonic(t33, r)
    print(f"  r = {r:<10} feasible = {report.feasible}"
          + ("" if report.feasible else f"  (worst entry {report.worst_entry:.2e})"))

print()
print("the four-stage third-order method doubles the coefficient:")
r43 = ssp_coefficient(ssprk_43())
print(f"  C = {r43.coefficient:.9f}, per stage {r43.effective_coefficient:.6f}")

print()
print("a negative weight is fatal: no positive radius can be feasible")
negative = ButcherTableau(
    A=np.array([[0.0, 0.0], [0.5, 0.0]]),
    b=np.array([1.5, -0.5]),
)
res = ssp_coefficient(negative)
print(f"  C = {res.coefficient}, bracket = {res.bracket}")
report = abs_monotonic(negative, 0.01)
print(f"  at r = 0.01: worst entry {report.worst_entry} at {report.worst_index}")

print()
print("the classical four-stage fourth-order method also has C = 0:")
A = np.zeros((4, 4))
A[1, 0] = 0.5
A[2, 1] = 0.5
A[3, 2] = 1.0
rk4 = ButcherTableau(A=A, b=np.array([1 / 6, 1 / 3, 1 / 3, 1 / 6]))
print(f"  C = {ssp_coefficient(rk4).coefficient:.3e}")
print("fourth classical order with positive weights and a positive")
print("coefficient cannot share one explicit method; effective order is")
print("the way around that barrier (see demo 03)")
