"""Tour of the built-in method catalog.

Every entry carries a main method, its certified SSP coefficient, and for
the smaller methods a start/stop pair that raises the composite run to the
advertised effective order.  Two families come in closed form with a free
parameter; one sparse family scales the coefficient quadratically with the
stage count.
"""

import numpy as np

from essprk import (
    catalog,
    classical_order,
    effective_order,
    essprk_332,
    essprk_432,
    family_n2p1,
    shu_osher_to_butcher,
    ssp_coefficient,
)

print("=== catalog entries ===")
header = f"{'label':16} {'s':>3} {'q':>2} {'p':>2} {'C':>8} {'C/s':>7}  companions"
print(header)
print("-" * len(header))
for entry in catalog():
    s = entry.main.b.size
    companions = (
        f"start {entry.start.b.size} stages, stop {entry.stop.b.size}"
        if entry.start is not None
        else "-"
    )
    print(
        f"{entry.label:16} {s:>3} {entry.q:>2} {entry.p:>2} "
        f"{entry.ssp_coefficient:>8.4f} {entry.ssp_coefficient / s:>7.4f}  {companions}"
    )

print()
print("=== the three-stage closed-form family ===")
print("one free parameter; the coefficient stays at 1 across the range")
for gamma in (0.25, 0.4, 0.5, 0.75, 1.0):
    t = essprk_332(gamma)
    C = ssp_coefficient(t).coefficient
    print(
        f"  gamma={gamma:4.2f}: b = {np.round(t.b, 6)}, C = {C:.6f}, "
        f"classical {int(classical_order(t))}, effective {int(effective_order(t))}"
    )

print()
print("at gamma = 1/4 the family collapses to the classical three-stage method:")
t = essprk_332(0.25)
print(f"  b = {np.round(t.b, 6)} (classical order {int(classical_order(t))})")

print()
print("=== the four-stage closed-form family, coefficient 2 ===")
for gamma in (1 / 6, 1 / 3, 0.5):
    t = essprk_432(gamma)
    print(
        f"  gamma={gamma:5.3f}: C = {ssp_coefficient(t).coefficient:.6f}, "
        f"effective order {int(effective_order(t))}"
    )

print()
print("=== sparse family: s = n^2 + 1 stages, coefficient n^2 - n ===")
for n in (3, 4, 5):
    form = family_n2p1(n)
    t = shu_osher_to_butcher(form)
    C = ssp_coefficient(t).coefficient
    s = t.b.size
    nonzero = int(np.count_nonzero(form.alpha))
    print(
        f"  n={n}: s={s:3d}, C = {C:8.4f} (C/s = {C / s:.4f}), "
        f"{nonzero} nonzero couplings out of {form.alpha.size}"
    )
print()
print("the per-stage coefficient approaches 1 as n grows, at the price of")
print("many stages; the coupling matrix stays almost diagonal, so storage")
print("stays linear in the stage count")
