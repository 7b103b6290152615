"""Benchmark problems: Burgers total-variation runs and van der Pol accuracy.

The advection test discretizes the inviscid Burgers equation with a
first-order upwind flux on a periodic grid; forward Euler is provably
total-variation diminishing there up to a known step size, which makes the
largest oscillation-free step ratio of a composite scheme a measurable
quantity.  The van der Pol oscillator supplies the smooth convergence
study, with a step-halving reference solution certified to 1e-11.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import least_squares

from .errors import DomainError, EssprkError, NonFiniteState
from .integrator import IVP, CompositeScheme, composite_steps, run_composite, run_single
from .order_conditions import (
    EffectiveOrderSpec,
    classical_order,
    elementary_weights,
    recover_starting_weights,
    resolve_free_weights,
    start_stop_targets,
)
from .tableau import ButcherTableau

__all__ = [
    "BurgersGrid",
    "TVDReport",
    "burgers_rhs",
    "dt_fe",
    "total_variation",
    "run_tvd",
    "run_tvd_single",
    "max_tvd_sigma",
    "vdp_convergence",
    "vdp_single_convergence",
    "reference_solution",
    "convergence_slope",
    "perturbation_pair_tableaux",
    "VDP_STEP_COUNTS",
]

TV_TOL = 1e-10
REFERENCE_ACCURACY = 1e-11
VDP_MU = 2.0
VDP_FINAL_TIME = 50.0
VDP_STEP_COUNTS = tuple(100 * 2**k for k in range(2, 8))

_PROFILES = ("continuous", "square_wave")


@dataclass(frozen=True, eq=False)
class BurgersGrid:
    """Uniform periodic grid on [0, 2) with one of the two initial profiles."""

    m: int = 200
    initial_profile: str = "continuous"

    def __post_init__(self) -> None:
        if self.m < 2:
            raise DomainError(f"need at least 2 cells, got {self.m}")
        if self.initial_profile not in _PROFILES:
            raise DomainError(
                f"initial_profile must be one of {_PROFILES}, "
                f"got {self.initial_profile!r}"
            )

    @property
    def dx(self) -> float:
        return 2.0 / self.m

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.m) * self.dx

    def initial_state(self) -> np.ndarray:
        if self.initial_profile == "continuous":
            return 0.5 - 0.25 * np.sin(np.pi * self.x)
        x = self.x
        return np.where((x >= 0.5) & (x <= 1.5), 1.0, 0.0)


def burgers_rhs(grid: BurgersGrid):
    """Upwind semi-discretization of u_t + (u^2/2)_x = 0, periodic."""
    inv_dx = 1.0 / grid.dx

    def rhs(u: np.ndarray) -> np.ndarray:
        # overflow is allowed to produce inf here; the stepper turns
        # non-finite states into a diagnosed failure
        with np.errstate(over="ignore", invalid="ignore"):
            flux = 0.5 * u * u
            return -(flux - np.roll(flux, 1)) * inv_dx

    return rhs


def dt_fe(grid: BurgersGrid) -> float:
    """Largest provably TVD forward Euler step: dx over the sup of the data."""
    top = float(np.max(np.abs(grid.initial_state())))
    if top == 0.0:
        raise DomainError("initial data is identically zero")
    return grid.dx / top


def total_variation(u: np.ndarray) -> float:
    """Periodic discrete total variation, sum of |u_{i+1} - u_i|."""
    u = np.asarray(u, dtype=float)
    if u.ndim != 1 or u.size < 2:
        raise DomainError("need a vector of length at least 2")
    return float(np.sum(np.abs(np.diff(u))) + abs(u[0] - u[-1]))


@dataclass(frozen=True, eq=False)
class TVDReport:
    """Per-step total variation of one composite run at step ratio sigma."""

    sigma: float
    tv_series: np.ndarray
    monotone: bool
    max_increase: float
    final_time: float

    def __post_init__(self) -> None:
        tv = np.asarray(self.tv_series, dtype=float)
        tv.flags.writeable = False
        object.__setattr__(self, "tv_series", tv)


def run_tvd(
    scheme: CompositeScheme,
    grid: BurgersGrid,
    sigma: float,
    tf: float,
    tv_tol: float = TV_TOL,
) -> TVDReport:
    """Composite run at dt = sigma * dt_fe with total variation after every step.

    The step count is ceil(tf / dt), so the run finishes at or just past tf
    with the step size held exactly at sigma times the forward Euler limit;
    the exact final time is reported.
    """
    if not sigma > 0.0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    if not tf > 0.0:
        raise DomainError(f"final time must be positive, got {tf}")
    dt = sigma * dt_fe(grid)
    n = math.ceil(tf / dt)
    ivp = IVP(rhs=burgers_rhs(grid), u0=grid.initial_state(), t0=0.0, tf=n * dt)
    tv = np.empty(n + 1)
    for k, _, u in composite_steps(scheme, ivp, n):
        tv[k] = total_variation(u)
    increases = np.diff(tv)
    max_increase = float(np.max(increases))
    return TVDReport(
        sigma=sigma,
        tv_series=tv,
        monotone=bool(max_increase <= tv_tol),
        max_increase=max_increase,
        final_time=n * dt,
    )


def run_tvd_single(
    tableau: ButcherTableau,
    grid: BurgersGrid,
    sigma: float,
    tf: float,
    tv_tol: float = TV_TOL,
) -> TVDReport:
    """Same accounting as run_tvd but stepping one method with no bracket."""
    if not sigma > 0.0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    if not tf > 0.0:
        raise DomainError(f"final time must be positive, got {tf}")
    dt = sigma * dt_fe(grid)
    n = math.ceil(tf / dt)
    ivp = IVP(rhs=burgers_rhs(grid), u0=grid.initial_state(), t0=0.0, tf=n * dt)
    traj = run_single(tableau, ivp, n, observe_at="all")
    tv = np.array([total_variation(u) for u in traj.states])
    max_increase = float(np.max(np.diff(tv)))
    return TVDReport(
        sigma=sigma,
        tv_series=tv,
        monotone=bool(max_increase <= tv_tol),
        max_increase=max_increase,
        final_time=n * dt,
    )


def max_tvd_sigma(
    scheme: CompositeScheme,
    grid: BurgersGrid,
    tf: float,
    tol: float = 0.01,
) -> float:
    """Largest observed step ratio keeping total variation monotone.

    Bisection over sigma starting from the bracket [C/2, 2C] around the
    certified coefficient; returns the upper bracket outright in the
    (never observed) case that 2C still shows no increase.
    """
    C = scheme.coefficient

    def monotone_at(sigma: float) -> bool:
        # a blown-up run is a monotonicity failure, not an error
        try:
            return run_tvd(scheme, grid, sigma, tf).monotone
        except NonFiniteState:
            return False

    lo, hi = 0.5 * C, 2.0 * C
    if not monotone_at(lo):
        raise EssprkError(
            "spatial discretization not TVD at half the SSP coefficient"
        )
    if monotone_at(hi):
        return hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if monotone_at(mid):
            lo = mid
        else:
            hi = mid
    return lo


# ---- van der Pol convergence ----


def _vdp_rhs(u: np.ndarray) -> np.ndarray:
    return np.array([u[1], VDP_MU * (1.0 - u[0] * u[0]) * u[1] - u[0]])


def vdp_ivp() -> IVP:
    return IVP(rhs=_vdp_rhs, u0=np.array([2.0, 1.0]), t0=0.0, tf=VDP_FINAL_TIME)


def _classical_rk4() -> ButcherTableau:
    A = np.zeros((4, 4))
    A[1, 0] = 0.5
    A[2, 1] = 0.5
    A[3, 2] = 1.0
    return ButcherTableau(A=A, b=np.array([1 / 6, 1 / 3, 1 / 3, 1 / 6]))


def reference_solution(
    ivp: IVP,
    accuracy: float = REFERENCE_ACCURACY,
    initial_steps: int = 2048,
    max_doublings: int = 16,
) -> np.ndarray:
    """Final state by fourth-order stepping with certified step halving.

    Doubles the step count until two consecutive resolutions agree to
    ``accuracy`` in the max norm, then returns the finer result (its own
    error is an order of magnitude below the agreement threshold).
    """
    rk4 = _classical_rk4()
    n = initial_steps
    coarse = run_single(rk4, ivp, n).final
    for _ in range(max_doublings):
        n *= 2
        fine = run_single(rk4, ivp, n).final
        if float(np.max(np.abs(fine - coarse))) <= accuracy:
            return fine
        coarse = fine
    raise EssprkError(
        f"reference solution did not converge to {accuracy:g} "
        f"within {n} steps"
    )


@lru_cache(maxsize=1)
def _vdp_reference() -> np.ndarray:
    return reference_solution(vdp_ivp())


def convergence_slope(
    step_sizes, errors, floor: float = 10.0 * REFERENCE_ACCURACY
) -> float:
    """Least-squares slope of log error against log step size.

    Points with error at or below ``floor`` sit in the reference solution's
    noise and are excluded from the fit.
    """
    h = np.asarray(step_sizes, dtype=float)
    e = np.asarray(errors, dtype=float)
    keep = e > floor
    if np.count_nonzero(keep) < 2:
        raise DomainError("fewer than two points above the error floor")
    return float(np.polyfit(np.log(h[keep]), np.log(e[keep]), 1)[0])


def vdp_convergence(scheme: CompositeScheme):
    """(step counts, max-norm errors at t=50, fitted slope) for a composite."""
    ivp = vdp_ivp()
    ref = _vdp_reference()
    ns = np.array(VDP_STEP_COUNTS)
    errors = np.empty(ns.size)
    for i, n in enumerate(ns):
        final = run_composite(scheme, ivp, int(n)).final
        errors[i] = float(np.max(np.abs(final - ref)))
    slope = convergence_slope(VDP_FINAL_TIME / ns, errors)
    return ns, errors, slope


def vdp_single_convergence(tableau: ButcherTableau):
    """Same study but stepping one tableau alone (no start/stop bracket)."""
    ivp = vdp_ivp()
    ref = _vdp_reference()
    ns = np.array(VDP_STEP_COUNTS)
    errors = np.empty(ns.size)
    for i, n in enumerate(ns):
        final = run_single(tableau, ivp, int(n)).final
        errors[i] = float(np.max(np.abs(final - ref)))
    slope = convergence_slope(VDP_FINAL_TIME / ns, errors)
    return ns, errors, slope


# ---- direct perturbation methods (negative weights, for the TVD contrast) ----


def _weights_through_order(tableau_vec, s, count):
    A = np.zeros((s, s))
    k = 0
    for i in range(1, s):
        A[i, :i] = tableau_vec[k : k + i]
        k += i
    b = tableau_vec[k:]
    w = elementary_weights(ButcherTableau(A=A, b=b))
    return w[1 : count + 1], A, b


def perturbation_pair_tableaux(
    scheme: CompositeScheme, stages: int | None = None
) -> tuple[ButcherTableau, ButcherTableau]:
    """Methods realizing the raw perturbation and its inverse directly.

    The perturbation fixes target weights with zero weight on the one-node
    tree, so any method hitting them has weights summing to zero, hence
    some negative ones: the pair demonstrates why composites use the
    combined start/stop methods instead.  Deterministic solve, no seeds.
    """
    p = int(classical_order(scheme.main))
    spec = EffectiveOrderSpec(scheme.q, p)
    w = elementary_weights(scheme.main)
    starting = recover_starting_weights(w, spec)
    resolved = resolve_free_weights(
        w, starting, elementary_weights(scheme.start)
    )
    identity = np.zeros(18)
    identity[0] = 1.0
    forward, backward = start_stop_targets(identity, resolved)
    count = 4 if scheme.q == 3 else 8
    if stages is None:
        stages = 3 if scheme.q == 3 else 4
    dim = stages * (stages - 1) // 2 + stages
    if dim < count:
        raise DomainError(
            f"{stages} stages give only {dim} coefficients for {count} conditions"
        )
    rng = np.random.default_rng(1234)
    out = []
    for target in (forward, backward):
        goal = target[1 : count + 1]
        best = None
        for _ in range(40):
            sol = least_squares(
                lambda v: _weights_through_order(v, stages, count)[0] - goal,
                x0=rng.uniform(-0.8, 0.8, size=dim),
                xtol=1e-15,
                ftol=1e-15,
                gtol=1e-15,
            )
            residual = float(np.max(np.abs(sol.fun)))
            if best is None or residual < best[0]:
                best = (residual, sol.x)
            if residual <= 1e-11:
                break
        if best[0] > 1e-9:
            raise EssprkError(
                f"perturbation method solve stalled at residual {best[0]:.2e}"
            )
        _, A, b = _weights_through_order(best[1], stages, count)
        out.append(ButcherTableau(A=A, b=b))
    return out[0], out[1]
