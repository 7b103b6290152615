"""Catalog of concrete strong-stability-preserving methods.

Three sources feed the catalog: closed-form families (the three- and
four-stage effective-order-three families, the classical third-order
baselines they contain, and the sparse n^2+1-stage effective-order-four
family), frozen coefficient files for methods with published or searched
15-digit tableaux, and the start/stop companions needed to run composites.
Nothing in an entry is trusted: every catalog load re-verifies orders,
coefficients, and start/stop targets from scratch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np

from .errors import DomainError
from .order_conditions import (
    EffectiveOrderSpec,
    classical_order,
    effective_order,
    elementary_weights,
    resolve_free_weights,
    recover_starting_weights,
    start_stop_targets,
)
from .ssp import ssp_coefficient
from .tableau import ButcherTableau, ShuOsherForm, parse_tableau, shu_osher_to_butcher

__all__ = [
    "CatalogEntry",
    "essprk_332",
    "essprk_432",
    "ssprk_33",
    "ssprk_43",
    "family_n2p1",
    "catalog",
    "lookup",
    "DEFAULT_GAMMA_332",
    "DEFAULT_GAMMA_432",
]

# default free parameters for the catalog's family entries; interior values
# keep the classical order at two so the effective-order machinery is
# actually exercised (the endpoints collapse to classical third order)
DEFAULT_GAMMA_332 = 0.5
DEFAULT_GAMMA_432 = 1.0 / 3.0

_LOAD_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class CatalogEntry:
    """One catalog method with optional start/stop companions.

    ``ssp_coefficient`` is the two-decimal reference value; the load-time
    check recomputes the true coefficient and requires agreement.  ``start``
    and ``stop`` are None for methods meant to run standalone.
    """

    label: str
    main: ButcherTableau
    start: ButcherTableau | None
    stop: ButcherTableau | None
    q: int
    p: int
    ssp_coefficient: float


def essprk_332(gamma: float) -> ButcherTableau:
    """Three-stage effective-order-three family with SSP coefficient 1.

    gamma in [1/4, 1] is free; gamma = 1/4 gives the classical three-stage
    third-order method, interior values have classical order two.
    """
    if not 0.25 <= gamma <= 1.0:
        raise DomainError(f"gamma must lie in [1/4, 1], got {gamma}")
    A = np.zeros((3, 3))
    A[1, 0] = 1.0
    A[2, 0] = gamma
    A[2, 1] = gamma
    b = np.array([(5.0 * gamma - 1.0) / (6.0 * gamma), 1.0 / 6.0, 1.0 / (6.0 * gamma)])
    return ButcherTableau(A=A, b=b, label=f"ESSPRK(3,3,2;gamma={gamma:g})", q=3, p=2)


def essprk_432(gamma: float) -> ButcherTableau:
    """Four-stage effective-order-three family with SSP coefficient 2.

    gamma in [1/6, 1/2] is free; gamma = 1/6 gives the classical four-stage
    third-order method.
    """
    if not 1.0 / 6.0 <= gamma <= 0.5:
        raise DomainError(f"gamma must lie in [1/6, 1/2], got {gamma}")
    A = np.zeros((4, 4))
    A[1, 0] = 0.5
    A[2, 0] = 0.5
    A[2, 1] = 0.5
    A[3, :3] = gamma
    b = np.array(
        [
            (8.0 * gamma - 1.0) / (12.0 * gamma),
            1.0 / 6.0,
            1.0 / 6.0,
            1.0 / (12.0 * gamma),
        ]
    )
    return ButcherTableau(A=A, b=b, label=f"ESSPRK(4,3,2;gamma={gamma:g})", q=3, p=2)


def ssprk_33() -> ButcherTableau:
    """Classical three-stage third-order SSP method (coefficient 1)."""
    A = np.zeros((3, 3))
    A[1, 0] = 1.0
    A[2, 0] = 0.25
    A[2, 1] = 0.25
    b = np.array([1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0])
    return ButcherTableau(A=A, b=b, label="SSPRK(3,3)", q=3, p=3)


def ssprk_43() -> ButcherTableau:
    """Classical four-stage third-order SSP method (coefficient 2)."""
    A = np.zeros((4, 4))
    A[1, 0] = 0.5
    A[2, 0] = 0.5
    A[2, 1] = 0.5
    A[3, :3] = 1.0 / 6.0
    b = np.array([1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0, 0.5])
    return ButcherTableau(A=A, b=b, label="SSPRK(4,3)", q=3, p=3)


def family_n2p1(n: int, branch: str = "plus") -> ShuOsherForm:
    """Sparse (n^2+1)-stage effective-order-four family, coefficient n^2-n.

    Returns the modified Shu-Osher form; stage i feeds stage i+1 along a
    chain, with one extra coupling whose strength is a root of a quadratic
    (``branch`` picks the sign).  Classical order is two.
    """
    if n < 3:
        raise DomainError(f"family is defined only for n >= 3, got n = {n}")
    if branch not in ("plus", "minus"):
        raise DomainError(f"branch must be 'plus' or 'minus', got {branch!r}")
    sign = 1.0 if branch == "plus" else -1.0
    s = n * n + 1
    v = np.zeros(s + 1)
    v[0] = 1.0
    v[s] = 2.0 / ((n * n + 1) * ((n - 1) ** 2 + 1))
    alpha = np.zeros((s + 1, s))
    pivot = (n * n - 1 + sign * math.sqrt(n**3 - 3 * n**2 + n + 1)) / (
        4 * n * n - 6 * n + 2
    )
    # stage and weight indices below follow 1-based numbering shifted down
    pivot_row = n * n - 2 * n + 3
    alpha[pivot_row, (n - 2) ** 2 - 1] = pivot
    alpha[s, s - 1] = (n * (n - 1) ** 2) / ((2 * n - 1) * (n * n + 1) * (1.0 - pivot))
    alpha[s, n * n - 2 * n + 1] = 1.0 - v[s] - alpha[s, s - 1]
    for i in range(1, n * n + 1):
        alpha[i, i - 1] = 1.0 - pivot if i == pivot_row else 1.0
    beta = alpha / (n * n - n)
    return ShuOsherForm(v=v, alpha=alpha, beta=beta)


def _load_tableau(name: str) -> ButcherTableau:
    text = resources.files("essprk.data").joinpath(name).read_text()
    return parse_tableau(text)


def _verify_entry(entry: CatalogEntry) -> None:
    main = entry.main
    eo = effective_order(main)
    if eo < entry.q:
        raise DomainError(
            f"{entry.label}: effective order {int(eo)} below labeled {entry.q}"
        )
    co = classical_order(main)
    if co != entry.p:
        raise DomainError(
            f"{entry.label}: classical order {int(co)} != labeled {entry.p}"
        )
    measured = ssp_coefficient(main).coefficient
    if abs(measured - entry.ssp_coefficient) > 0.005:
        raise DomainError(
            f"{entry.label}: coefficient {measured:.6f} does not match "
            f"{entry.ssp_coefficient} to 2 decimals"
        )
    if (entry.start is None) != (entry.stop is None):
        raise DomainError(f"{entry.label}: start/stop must come as a pair")
    if entry.start is not None:
        s = main.s
        if entry.start.s > s + 1 or entry.stop.s > s:
            raise DomainError(f"{entry.label}: start/stop exceed stage caps")
        spec = EffectiveOrderSpec(entry.q, entry.p)
        w = elementary_weights(main)
        starting = recover_starting_weights(w, spec, tol=_LOAD_TOL)
        w_start = elementary_weights(entry.start)
        w_stop = elementary_weights(entry.stop)
        resolved = resolve_free_weights(w, starting, w_start)
        rho, tau = start_stop_targets(w, resolved)
        n_trees = 4 if entry.q == 3 else 8
        worst = max(
            float(np.max(np.abs(w_start[1 : n_trees + 1] - rho[1 : n_trees + 1]))),
            float(np.max(np.abs(w_stop[1 : n_trees + 1] - tau[1 : n_trees + 1]))),
        )
        if worst > _LOAD_TOL:
            raise DomainError(
                f"{entry.label}: start/stop target residual {worst:.3e}"
            )


def _entry_with_files(
    label: str, stem: str, q: int, p: int, coefficient: float
) -> CatalogEntry:
    return CatalogEntry(
        label=label,
        main=_load_tableau(f"{stem}.json"),
        start=_load_tableau(f"{stem}_start.json"),
        stop=_load_tableau(f"{stem}_stop.json"),
        q=q,
        p=p,
        ssp_coefficient=coefficient,
    )


def _family_entry(n: int) -> CatalogEntry:
    s = n * n + 1
    main = shu_osher_to_butcher(
        family_n2p1(n), label=f"ESSPRK({s},4,2)", q=4, p=2
    )
    return CatalogEntry(
        label=f"ESSPRK({s},4,2)",
        main=main,
        start=None,
        stop=None,
        q=4,
        p=2,
        ssp_coefficient=float(n * n - n),
    )


@lru_cache(maxsize=1)
def catalog() -> tuple[CatalogEntry, ...]:
    """All shipped methods, verified at load.

    Entries with start/stop companions can be run as composites at their
    effective order; the rest are standalone baselines or family members.
    """
    entries = [
        CatalogEntry(
            label="ESSPRK(3,3,2)",
            main=essprk_332(DEFAULT_GAMMA_332),
            start=_load_tableau("essprk_3_3_2_start.json"),
            stop=_load_tableau("essprk_3_3_2_stop.json"),
            q=3,
            p=2,
            ssp_coefficient=1.0,
        ),
        CatalogEntry(
            label="ESSPRK(4,3,2)",
            main=essprk_432(DEFAULT_GAMMA_432),
            start=_load_tableau("essprk_4_3_2_start.json"),
            stop=_load_tableau("essprk_4_3_2_stop.json"),
            q=3,
            p=2,
            ssp_coefficient=2.0,
        ),
        _entry_with_files("ESSPRK(4,4,2)", "essprk_4_4_2", 4, 2, 0.88),
        _entry_with_files("ESSPRK(4,4,3)", "essprk_4_4_3", 4, 3, 0.78),
        _entry_with_files("ESSPRK(5,4,2)", "essprk_5_4_2", 4, 2, 1.97),
        _family_entry(3),
        _family_entry(4),
        CatalogEntry(
            label="SSPRK(3,3)",
            main=ssprk_33(),
            start=None,
            stop=None,
            q=3,
            p=3,
            ssp_coefficient=1.0,
        ),
        CatalogEntry(
            label="SSPRK(4,3)",
            main=ssprk_43(),
            start=None,
            stop=None,
            q=3,
            p=3,
            ssp_coefficient=2.0,
        ),
    ]
    for entry in entries:
        _verify_entry(entry)
    return tuple(entries)


def lookup(label: str) -> CatalogEntry:
    """Fetch a catalog entry by its label."""
    for entry in catalog():
        if entry.label == label:
            return entry
    labels = ", ".join(e.label for e in catalog())
    raise DomainError(f"unknown method {label!r}; available: {labels}")
