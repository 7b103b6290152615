"""Numerical search for strongly stable methods of prescribed effective order.

Two searches live here.  The main search looks for an s-stage tableau
maximizing the SSP coefficient subject to the effective-order conditions;
the start/stop search then builds the preparation and finishing methods a
composite run needs, maximizing the smaller of their two SSP coefficients.

Both are bilevel: an outer bisection on the radius, and an inner
sequential-quadratic feasibility solve at each candidate radius (order
residuals as equalities, nonnegativity margins as inequalities), warm
started along the bisection path.  Restarts draw fresh initial guesses
from a per-restart seeded stream and are merged deterministically, so a
fixed seed always reproduces the same outcome.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .errors import DomainError, OrderConditionsInfeasible
from .order_conditions import (
    EffectiveOrderSpec,
    StartingWeights,
    effective_order_residuals,
    elementary_weights,
    recover_starting_weights,
    start_stop_targets,
)
from .ssp import SSPResult, _transformed, ssp_coefficient
from .tableau import ButcherTableau

__all__ = [
    "SearchConfig",
    "MainSearchOutcome",
    "StartStopOutcome",
    "optimize_main",
    "optimize_start_stop",
    "KNOWN_LINEAR_EFFECTIVE_BOUNDS",
]

# best per-stage SSP coefficients any method of the given (stages, order)
# can reach on linear problems; exact values only, used as search ceilings
KNOWN_LINEAR_EFFECTIVE_BOUNDS: dict[tuple[int, int], float] = {
    (3, 3): 1.0 / 3.0,
    (4, 3): 1.0 / 2.0,
    (4, 4): 0.25,
    (5, 4): 0.40,
}


@dataclass(frozen=True)
class SearchConfig:
    """Tuning knobs for the multistart searches.

    ``penalty_weights`` drive the quadratic-penalty fallback used when the
    direct constrained solve stalls; they must increase strictly.
    ``step_scale`` scales the random perturbation applied when retrying a
    failed inner solve.
    """

    restarts: int = 8
    seed: int = 0
    max_iterations: int = 200
    penalty_weights: tuple[float, ...] = (1e2, 1e4, 1e6)
    residual_tol: float = 1e-10
    step_scale: float = 1.0

    def __post_init__(self) -> None:
        if self.restarts < 1:
            raise DomainError("restarts must be at least 1")
        if self.max_iterations < 1:
            raise DomainError("max_iterations must be at least 1")
        if self.residual_tol <= 0.0:
            raise DomainError("residual_tol must be positive")
        w = tuple(float(x) for x in self.penalty_weights)
        if len(w) == 0 or any(x <= 0.0 for x in w):
            raise DomainError("penalty_weights must be positive")
        if any(b <= a for a, b in zip(w, w[1:])):
            raise DomainError("penalty_weights must increase strictly")
        object.__setattr__(self, "penalty_weights", w)


@dataclass(frozen=True, eq=False)
class MainSearchOutcome:
    """Best main method found by :func:`optimize_main`.

    ``converged`` marks that the order residuals closed to the configured
    tolerance; only then is the residual bound guaranteed.  A search for
    effective order five ends with ``converged`` False and a zero
    coefficient whenever the stage count cannot carry the conditions.
    """

    tableau: ButcherTableau
    ssp: SSPResult
    residuals: np.ndarray
    spec: EffectiveOrderSpec
    converged: bool = True

    def __post_init__(self) -> None:
        r = np.array(self.residuals, dtype=float)
        r.flags.writeable = False
        object.__setattr__(self, "residuals", r)


@dataclass(frozen=True, eq=False)
class StartStopOutcome:
    """Joint start/stop search result.

    ``starting`` carries the fully resolved perturbation weights;
    ``free_weights`` repeats just the values the search chose for the
    order-q slots.  ``min_radius`` is the smaller of the two certified SSP
    coefficients, and ``success`` records whether it reached the main
    method's coefficient.
    """

    start: ButcherTableau
    stop: ButcherTableau
    starting: StartingWeights
    free_weights: np.ndarray
    min_radius: float
    success: bool
    worst_residual: float

    def __post_init__(self) -> None:
        f = np.array(self.free_weights, dtype=float)
        f.flags.writeable = False
        object.__setattr__(self, "free_weights", f)


def _pack_dim(s: int) -> int:
    return s * (s - 1) // 2 + s


def _unpack(x: np.ndarray, s: int) -> tuple[np.ndarray, np.ndarray]:
    A = np.zeros((s, s))
    k = 0
    for i in range(1, s):
        A[i, :i] = x[k : k + i]
        k += i
    return A, np.array(x[k : k + s])


def _random_start(rng: np.random.Generator, s: int) -> np.ndarray:
    x = rng.uniform(0.0, 1.0 / s, size=_pack_dim(s))
    nA = s * (s - 1) // 2
    total = x[nA:].sum()
    if total > 0.0:
        x[nA:] /= total  # weights normalized to sum 1
    return x


def _margins(A: np.ndarray, b: np.ndarray, r: float) -> np.ndarray:
    """Nonnegativity margins at radius r, structural entries only.

    The always-zero upper triangle is excluded so the inner solver never
    sees constraints with vanishing gradients.
    """
    X, rem = _transformed(A, b, r)
    s = b.size
    parts = [X[i, :i] for i in range(1, s)]
    parts.append(X[s, :])
    parts.append(rem)
    return np.concatenate(parts)


def _feasible(eq_fun, ineq_fun, x0, config: SearchConfig):
    """One constrained feasibility attempt; returns the point or None."""
    cons = [{"type": "eq", "fun": eq_fun}]
    if ineq_fun is not None:
        cons.append({"type": "ineq", "fun": ineq_fun})
    res = minimize(
        lambda x: 0.0,
        x0,
        method="SLSQP",
        constraints=cons,
        options={"maxiter": config.max_iterations, "ftol": 1e-14},
    )
    x = res.x
    tol = config.residual_tol
    r = eq_fun(x)
    if not (np.isfinite(r).all() and np.max(np.abs(r)) <= tol):
        return None
    if ineq_fun is not None:
        m = ineq_fun(x)
        if not (np.isfinite(m).all() and np.min(m) >= -tol):
            return None
    return x


def _feasible_with_fallback(eq_fun, ineq_fun, x0, config: SearchConfig, rng):
    """Direct solve, then a penalty ramp from a perturbed point, then polish.

    Returns (feasible point or None, last point tried).
    """
    x = _feasible(eq_fun, ineq_fun, x0, config)
    if x is not None:
        return x, x
    y = x0 + config.step_scale * rng.normal(0.0, 0.05, size=x0.size)
    for weight in config.penalty_weights:

        def merit(z, w=weight):
            r = eq_fun(z)
            val = w * float(r @ r)
            if ineq_fun is not None:
                m = np.minimum(ineq_fun(z), 0.0)
                val += w * float(m @ m)
            return val

        res = minimize(
            merit,
            y,
            method="SLSQP",
            options={"maxiter": config.max_iterations, "ftol": 1e-16},
        )
        if np.isfinite(res.x).all():
            y = res.x
    return _feasible(eq_fun, ineq_fun, y, config), y


def _bisect_radius(
    eq_fun, margins_at, x_feas, cap: float, config: SearchConfig, rng, radius_tol
):
    """Largest radius with a feasible point, warm starting up the bracket.

    ``margins_at(r)`` must return the inequality function at radius r.
    Returns (radius, point at that radius).
    """
    x_cap = _feasible(eq_fun, margins_at(cap), x_feas, config)
    if x_cap is not None:
        return cap, x_cap
    lo, hi = 0.0, cap
    x_lo = x_feas
    while hi - lo > radius_tol:
        mid = 0.5 * (lo + hi)
        ineq = margins_at(mid)
        x = _feasible(eq_fun, ineq, x_lo, config)
        if x is None:
            # one cheap jittered retry; the full penalty ramp is far too
            # slow to run at every infeasible midpoint
            y = x_lo + config.step_scale * rng.normal(0.0, 0.02, size=x_lo.size)
            x = _feasible(eq_fun, ineq, y, config)
        if x is not None:
            lo, x_lo = mid, x
        else:
            hi = mid
    return lo, x_lo


def optimize_main(
    s: int,
    spec: EffectiveOrderSpec,
    config: SearchConfig | None = None,
    radius_tol: float = 1e-7,
) -> MainSearchOutcome:
    """Search for the s-stage method of effective order (q, p) with largest
    SSP coefficient.

    Runs ``config.restarts`` independent searches and keeps the best; the
    result carries an independently certified coefficient.  Raises when no
    restart can even satisfy the order conditions with nonnegative
    coefficients (carrying the best residual vector reached).  Order five
    is handled specially: no such method admits a positive coefficient, so
    the search solves the order conditions alone (signs unconstrained) and
    reports the certified coefficient of whatever it finds, converged or
    not, rather than hunting for a feasible point forever.
    """
    if s < 2:
        raise DomainError(f"need at least 2 stages, got {s}")
    config = config or SearchConfig()

    def eq_fun(x):
        A, b = _unpack(x, s)
        return effective_order_residuals(
            elementary_weights(ButcherTableau(A=A, b=b)), spec
        )

    if spec.q >= 5:
        return _order_only_search(s, spec, config, eq_fun)

    cap = 2.0 * s
    bound = KNOWN_LINEAR_EFFECTIVE_BOUNDS.get((s, spec.q))
    target = None
    if bound is not None:
        # no method beats its linear-problem ceiling, so the bisection can
        # start just above it; stop restarting once the ceiling is reached
        cap = min(cap, s * bound + 1e-4)
        target = s * bound - max(10.0 * radius_tol, 1e-9)

    def margins_at(r):
        def ineq(x):
            A, b = _unpack(x, s)
            return _margins(A, b, r)

        return ineq

    best: tuple[float, np.ndarray] | None = None
    best_residual: np.ndarray | None = None
    for k in range(config.restarts):
        rng = np.random.default_rng((config.seed, k))
        x0 = _random_start(rng, s)
        x, last = _feasible_with_fallback(eq_fun, margins_at(0.0), x0, config, rng)
        if x is None:
            r = eq_fun(last)
            if best_residual is None or np.max(np.abs(r)) < np.max(
                np.abs(best_residual)
            ):
                best_residual = r
            continue
        radius, x_opt = _bisect_radius(
            eq_fun, margins_at, x, cap, config, rng, radius_tol
        )
        if best is None or radius > best[0]:
            best = (radius, x_opt)
        if target is not None and best[0] >= target:
            break
    if best is None:
        worst = float(np.max(np.abs(best_residual)))
        raise OrderConditionsInfeasible(
            f"no feasible point found in {config.restarts} restarts "
            f"(best residual {worst:.3e})",
            best_residuals=best_residual,
        )
    _, x_best = best
    A, b = _unpack(x_best, s)
    tableau = ButcherTableau(A=A, b=b, q=spec.q, p=spec.p)
    residuals = effective_order_residuals(elementary_weights(tableau), spec)
    return MainSearchOutcome(
        tableau=tableau,
        ssp=ssp_coefficient(tableau),
        residuals=residuals,
        spec=spec,
        converged=bool(np.max(np.abs(residuals)) <= config.residual_tol),
    )


def _order_only_search(s, spec, config, eq_fun) -> MainSearchOutcome:
    # order five: coefficients may go negative; minimize the squared
    # residual instead of hunting for a nonnegative feasible point
    best_x = None
    best_val = np.inf
    for k in range(config.restarts):
        rng = np.random.default_rng((config.seed, k))
        x = _random_start(rng, s)

        def merit(z, w=1.0):
            r = eq_fun(z)
            return w * float(r @ r)

        for weight in config.penalty_weights:
            res = minimize(
                merit,
                x,
                args=(weight,),
                method="SLSQP",
                options={"maxiter": config.max_iterations, "ftol": 1e-16},
            )
            if np.isfinite(res.x).all():
                x = res.x
        val = float(np.max(np.abs(eq_fun(x))))
        if val < best_val:
            best_val, best_x = val, x
        if best_val <= config.residual_tol:
            break
    A, b = _unpack(best_x, s)
    tableau = ButcherTableau(A=A, b=b)
    residuals = effective_order_residuals(elementary_weights(tableau), spec)
    converged = bool(np.max(np.abs(residuals)) <= config.residual_tol)
    result = ssp_coefficient(tableau)
    if not converged:
        # no method of this effective order exists at this stage count,
        # so the attainable coefficient is zero by definition
        base = result.certificate
        result = SSPResult(
            coefficient=0.0,
            effective_coefficient=0.0,
            bracket=(0.0, 0.0),
            certificate=base,
        )
    return MainSearchOutcome(
        tableau=tableau,
        ssp=result,
        residuals=residuals,
        spec=spec,
        converged=converged,
    )


def optimize_start_stop(
    main: MainSearchOutcome,
    config: SearchConfig | None = None,
    start_stages: int | None = None,
    stop_stages: int | None = None,
    radius_tol: float = 1e-7,
) -> StartStopOutcome:
    """Jointly search for starting and stopping methods for ``main``.

    Decision variables are the two tableaux plus the free perturbation
    weights of order q; the objective is the smaller of the two SSP
    coefficients, driven by a common-radius bisection.  Stage counts
    default to s+1 for the starting method and s for the stopping method.
    """
    config = config or SearchConfig()
    spec = main.spec
    if spec.q not in (3, 4):
        raise DomainError(
            "start/stop construction covers effective orders 3 and 4 only"
        )
    s = main.tableau.s
    s_start = start_stages if start_stages is not None else s + 1
    s_stop = stop_stages if stop_stages is not None else s
    if s_start < 2 or s_stop < 2:
        raise DomainError("start and stop methods need at least 2 stages")
    w_main = elementary_weights(main.tableau)
    starting = recover_starting_weights(w_main, spec, tol=config.residual_tol)
    free = starting.free
    n_free = len(free)
    n_trees = 4 if spec.q == 3 else 8
    d_start = _pack_dim(s_start)
    d_stop = _pack_dim(s_stop)

    def split(x):
        return (
            x[:d_start],
            x[d_start : d_start + d_stop],
            x[d_start + d_stop :],
        )

    def eq_fun(x):
        xr, xt, f = split(x)
        Ar, br = _unpack(xr, s_start)
        At, bt = _unpack(xt, s_stop)
        rho, tau = start_stop_targets(w_main, starting.fill(f))
        wr = elementary_weights(ButcherTableau(A=Ar, b=br))
        wt = elementary_weights(ButcherTableau(A=At, b=bt))
        return np.concatenate(
            [
                wr[1 : n_trees + 1] - rho[1 : n_trees + 1],
                wt[1 : n_trees + 1] - tau[1 : n_trees + 1],
            ]
        )

    def margins_at(r):
        def ineq(x):
            xr, xt, _ = split(x)
            Ar, br = _unpack(xr, s_start)
            At, bt = _unpack(xt, s_stop)
            return np.concatenate([_margins(Ar, br, r), _margins(At, bt, r)])

        return ineq

    cap = 2.0 * min(s_start, s_stop)
    best: tuple[float, np.ndarray] | None = None
    best_residual: np.ndarray | None = None
    for k in range(config.restarts):
        rng = np.random.default_rng((config.seed, k, 1))
        x0 = np.concatenate(
            [
                _random_start(rng, s_start),
                _random_start(rng, s_stop),
                np.zeros(n_free),
            ]
        )
        x, last = _feasible_with_fallback(eq_fun, margins_at(0.0), x0, config, rng)
        if x is None:
            r = eq_fun(last)
            if best_residual is None or np.max(np.abs(r)) < np.max(
                np.abs(best_residual)
            ):
                best_residual = r
            continue
        radius, x_opt = _bisect_radius(
            eq_fun, margins_at, x, cap, config, rng, radius_tol
        )
        if best is None or radius > best[0]:
            best = (radius, x_opt)
    if best is None:
        worst = float(np.max(np.abs(best_residual)))
        raise OrderConditionsInfeasible(
            f"no start/stop pair found in {config.restarts} restarts "
            f"(best residual {worst:.3e})",
            best_residuals=best_residual,
        )
    _, x_best = best
    xr, xt, f = split(x_best)
    Ar, br = _unpack(xr, s_start)
    At, bt = _unpack(xt, s_stop)
    start = ButcherTableau(A=Ar, b=br)
    stop = ButcherTableau(A=At, b=bt)
    worst_residual = float(np.max(np.abs(eq_fun(x_best))))
    min_radius = min(
        ssp_coefficient(start).coefficient, ssp_coefficient(stop).coefficient
    )
    return StartStopOutcome(
        start=start,
        stop=stop,
        starting=starting.fill(f),
        free_weights=np.array(f),
        min_radius=min_radius,
        success=bool(min_radius + 1e-9 >= main.ssp.coefficient),
        worst_residual=worst_residual,
    )
