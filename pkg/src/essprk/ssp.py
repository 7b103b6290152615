"""Strong-stability certificates for explicit Runge-Kutta tableaux.

A method applied with step size r times the forward-Euler limit keeps every
convex-monotone bound of the problem exactly when its stacked coefficients
stay nonnegative after the transformation K -> K(I + rA)^(-1), together
with the leftover column 1 - r K(I + rA)^(-1) 1.  The largest such r is the
SSP coefficient; dividing by the stage count gives the per-stage (effective)
coefficient used to compare methods of different sizes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .tableau import ButcherTableau

__all__ = [
    "MonotonicityReport",
    "SSPResult",
    "abs_monotonic",
    "ssp_coefficient",
    "DEFAULT_BISECTION_TOL",
    "DEFAULT_ENTRY_TOL",
]

DEFAULT_BISECTION_TOL = 1e-10
DEFAULT_ENTRY_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class MonotonicityReport:
    """Feasibility of the nonnegativity test at one radius.

    ``coefficients`` is the transformed (s+1) x s array, ``remainder`` the
    leftover column; both must be nonnegative (to tolerance) for
    feasibility.  ``worst_entry`` is the most negative value found and
    ``worst_index`` locates it: ("coefficients", row, col) or
    ("remainder", row).
    """

    feasible: bool
    radius: float
    worst_entry: float
    worst_index: tuple
    coefficients: np.ndarray
    remainder: np.ndarray

    def __post_init__(self) -> None:
        for name in ("coefficients", "remainder"):
            a = np.array(getattr(self, name), dtype=float)
            a.flags.writeable = False
            object.__setattr__(self, name, a)


@dataclass(frozen=True, eq=False)
class SSPResult:
    """SSP coefficient with its bisection bracket and feasibility certificate."""

    coefficient: float
    effective_coefficient: float
    bracket: tuple[float, float]
    certificate: MonotonicityReport

    def __post_init__(self) -> None:
        lo, hi = self.bracket
        if not (lo <= self.coefficient <= hi):
            raise ValueError(
                f"coefficient {self.coefficient} outside bracket [{lo}, {hi}]"
            )
        if self.coefficient < 0.0:
            raise ValueError("SSP coefficient cannot be negative")


def _transformed(A: np.ndarray, b: np.ndarray, r: float):
    """Raw transform: X with X(I + rA) = [A; b], and the leftover column."""
    s = b.size
    K = np.vstack([A, b])
    M = np.eye(s) + r * A
    # X solves X M = K; transposed it is a single triangular solve.
    # check_finite off so NaN input reaches the infeasibility reporting
    # instead of raising inside scipy.
    X = solve_triangular(
        M, K.T, lower=True, trans="T", unit_diagonal=True, check_finite=False
    ).T
    rem = 1.0 - r * X.sum(axis=1)
    return X, rem


def abs_monotonic(
    tableau: ButcherTableau, r: float, tol: float = DEFAULT_ENTRY_TOL
) -> MonotonicityReport:
    """Test nonnegativity of the transformed coefficients at radius ``r``.

    For explicit methods I + rA is unit lower triangular, so the transform
    is a forward substitution and never singular; non-finite input still
    yields an infeasible report rather than an exception.
    """
    if r < 0.0:
        raise ValueError(f"radius must be nonnegative, got {r}")
    X, rem = _transformed(tableau.A, tableau.b, r)
    if not (np.isfinite(X).all() and np.isfinite(rem).all()):
        return MonotonicityReport(
            feasible=False,
            radius=r,
            worst_entry=-np.inf,
            worst_index=("coefficients", -1, -1),
            coefficients=X,
            remainder=rem,
        )
    ij = np.unravel_index(np.argmin(X), X.shape)
    k = int(np.argmin(rem))
    if X[ij] <= rem[k]:
        worst = float(X[ij])
        index: tuple = ("coefficients", int(ij[0]), int(ij[1]))
    else:
        worst = float(rem[k])
        index = ("remainder", k)
    return MonotonicityReport(
        feasible=bool(worst >= -tol),
        radius=r,
        worst_entry=worst,
        worst_index=index,
        coefficients=X,
        remainder=rem,
    )


def ssp_coefficient(
    tableau: ButcherTableau,
    tol: float = DEFAULT_BISECTION_TOL,
    entry_tol: float = DEFAULT_ENTRY_TOL,
) -> SSPResult:
    """SSP coefficient by bisection over [0, 2s].

    Returns 0 when the test already fails at radius 0 (some negative
    coefficient or weight).  The certificate is the feasibility report at
    the returned radius.
    """
    s = tableau.s
    base = abs_monotonic(tableau, 0.0, entry_tol)
    if not base.feasible:
        return SSPResult(
            coefficient=0.0,
            effective_coefficient=0.0,
            bracket=(0.0, 0.0),
            certificate=base,
        )
    r_max = 2.0 * s
    top = abs_monotonic(tableau, r_max, entry_tol)
    if top.feasible:
        return SSPResult(
            coefficient=r_max,
            effective_coefficient=r_max / s,
            bracket=(r_max, r_max),
            certificate=top,
        )
    lo, hi = 0.0, r_max
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if abs_monotonic(tableau, mid, entry_tol).feasible:
            lo = mid
        else:
            hi = mid
    return SSPResult(
        coefficient=lo,
        effective_coefficient=lo / s,
        bracket=(lo, hi),
        certificate=abs_monotonic(tableau, lo, entry_tol),
    )
