"""Effective order: a second-order method that converges at fourth order.

The main method of ESSPRK(4,4,2) has classical order two.  Bracketing a run
with its starting and stopping companions cancels the low-order error terms:
the composition takes one starting step, many main steps, and one stopping
step, and the final state converges at order four.  The demo measures both
orders on a nonlinear oscillator, then shows the weight bookkeeping that
makes it work, and closes with the witness for why order five is out of
reach for positive-weight methods.
"""

import numpy as np

from essprk import (
    EffectiveOrderSpec,
    IVP,
    classical_order,
    composite_from_entry,
    conjugacy_residuals,
    effective_order,
    elementary_weights,
    lookup,
    order5_barrier_witness,
    recover_starting_weights,
    resolve_free_weights,
    run_composite,
    run_single,
    ssprk_33,
)

entry = lookup("ESSPRK(4,4,2)")
main = entry.main
print(f"{entry.label}: classical order {int(classical_order(main))}, "
      f"effective order {int(effective_order(main))}")

# pendulum with an analytic energy check is overkill; a plain nonlinear
# oscillator with a fine reference run does the job
def rhs(u):
    return np.array([u[1], -np.sin(u[0])])

ivp = IVP(rhs=rhs, u0=np.array([1.2, 0.0]), t0=0.0, tf=8.0)
reference = run_single(ssprk_33(), ivp, 50000).final

print()
print("max-norm error at t=8 against a fine reference:")
print(f"{'n':>6} {'main alone':>14} {'composite':>14}")
previous = None
for n in (40, 80, 160, 320, 640):
    alone = run_single(main, ivp, n).final
    scheme = composite_from_entry(entry)
    composed = run_composite(scheme, ivp, n).final
    err_alone = np.max(np.abs(alone - reference))
    err_comp = np.max(np.abs(composed - reference))
    line = f"{n:>6} {err_alone:>14.3e} {err_comp:>14.3e}"
    if previous is not None:
        line += (f"   ratios {previous[0] / err_alone:5.1f} "
                 f"/ {previous[1] / err_comp:5.1f}")
    print(line)
    previous = (err_alone, err_comp)
print("doubling n divides the main-only error by ~4 (order 2) and the")
print("composite error by ~16 (order 4)")

print()
print("=== the bookkeeping behind it ===")
w = elementary_weights(main)
spec = EffectiveOrderSpec(entry.q, entry.p)
starting = recover_starting_weights(w, spec)
print("starting perturbation weights recovered from the main method")
print("(NaN marks slots the starting method is free to choose):")
print(" ", np.round(starting.values, 8))

resolved = resolve_free_weights(w, starting, elementary_weights(entry.start))
print("after resolving the free slots against the catalog starting method:")
print(" ", np.round(resolved.values, 8))

residuals = conjugacy_residuals(w, resolved, entry.q)
print(f"substituting back into the order-four relations: "
      f"max |residual| = {np.max(np.abs(residuals)):.2e}")

print()
print("=== why stop at four ===")
witness = order5_barrier_witness(main)
print(f"stage defect v = {np.round(witness.stage_defect, 6)}")
print(f"weighted mean {witness.weighted_mean:+.6f}, "
      f"weighted square {witness.weighted_square:+.6f}")
print(f"Jensen gap (mean^2 - mean of squares) = {witness.jensen_gap:+.6f}")
print(witness.note)
print("a positive-weight method needs the gap to vanish with constant v to")
print("reach effective order five; strict convexity forbids it unless the")
print("defect is constant, which collides with the other conditions")
