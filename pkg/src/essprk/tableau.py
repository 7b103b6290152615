"""Representations of explicit Runge-Kutta methods.

Two equivalent forms are supported: the Butcher tableau (A, b, c) and the
modified Shu-Osher form (v, alpha, beta), which writes each stage as a
combination of previous stages and is the natural home of sparse SSP
families.  Abscissae are always recomputed as row sums of A, never stored
independently.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

from .errors import TableauParseError

ROW_SUM_TOL = 1e-13


def _frozen(a, shape=None):
    out = np.array(a, dtype=float)
    if shape is not None and out.shape != shape:
        raise ValueError(f"expected shape {shape}, got {out.shape}")
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class ButcherTableau:
    """Coefficients of an explicit s-stage Runge-Kutta method.

    A is s x s strictly lower triangular, b the length-s weight vector.
    c is derived from the row sums of A on construction.  label, q and p
    are optional metadata carried through file round-trips; they are never
    trusted by the verification routines.
    """

    A: np.ndarray
    b: np.ndarray
    label: str | None = None
    q: int | None = None
    p: int | None = None
    c: np.ndarray = field(init=False)

    def __post_init__(self):
        b = _frozen(self.b)
        if b.ndim != 1 or b.size < 1:
            raise ValueError("b must be a nonempty vector")
        s = b.size
        A = _frozen(self.A, (s, s))
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", _frozen(A.sum(axis=1)))

    @property
    def s(self) -> int:
        return self.b.size


@dataclass(frozen=True, eq=False)
class ShuOsherForm:
    """Modified Shu-Osher form with s stages.

    Stage i is v_i * u + sum_{j<i} (alpha_ij Y_j + dt * beta_ij F(Y_j));
    the final row (index s) produces the step update.  alpha and beta are
    (s+1) x s, v has length s+1.
    """

    v: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        v = _frozen(self.v)
        if v.ndim != 1 or v.size < 2:
            raise ValueError("v must have length s+1 with s >= 1")
        s = v.size - 1
        alpha = _frozen(self.alpha, (s + 1, s))
        beta = _frozen(self.beta, (s + 1, s))
        for name, m in (("alpha", alpha), ("beta", beta)):
            for i in range(s + 1):
                if np.any(m[i, i:] != 0.0):
                    raise ValueError(
                        f"{name} row {i} references stage >= {i} (not explicit)")
        bad = np.abs(v + alpha.sum(axis=1) - 1.0) > ROW_SUM_TOL
        if np.any(bad):
            i = int(np.nonzero(bad)[0][0])
            raise ValueError(
                f"row {i}: v + sum(alpha) = {v[i] + alpha[i].sum()!r}, expected 1")
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)

    @property
    def s(self) -> int:
        return self.v.size - 1


def validate(tableau: ButcherTableau, tol: float = ROW_SUM_TOL,
             include_warnings: bool = False) -> list[str]:
    """Check the ButcherTableau invariants.

    Returns an empty list iff the tableau is a well-formed explicit method
    within tol.  With include_warnings=True, reducibility diagnostics
    (zero weights, unreachable stages) are appended; these are prefixed
    "warning:" and do not indicate invalidity.
    """
    A, b, c, s = tableau.A, tableau.b, tableau.c, tableau.s
    problems = []
    for i in range(s):
        for j in range(i, s):
            if A[i, j] != 0.0:
                problems.append(
                    f"A[{i},{j}] = {A[i, j]!r} breaks strict lower triangularity")
    row_sums = A.sum(axis=1)
    for i in range(s):
        if abs(c[i] - row_sums[i]) > tol:
            problems.append(f"c[{i}] differs from row sum by "
                            f"{c[i] - row_sums[i]:.3e}")
    if not np.all(np.isfinite(A)) or not np.all(np.isfinite(b)):
        problems.append("non-finite coefficient")
    if include_warnings:
        for j in range(s):
            if b[j] == 0.0:
                if np.all(A[:, j] == 0.0):
                    problems.append(f"warning: stage {j} is unreachable "
                                    "(zero weight and never used)")
                else:
                    problems.append(f"warning: zero weight b[{j}]")
    return problems


def stacked_coefficients(tableau: ButcherTableau) -> np.ndarray:
    """The (s+1) x s matrix stacking A on top of the weight row b."""
    out = np.vstack([tableau.A, tableau.b])
    out.flags.writeable = False
    return out


def shu_osher_to_butcher(form: ShuOsherForm, label: str | None = None,
                         q: int | None = None, p: int | None = None) -> ButcherTableau:
    """Convert a modified Shu-Osher form to the equivalent Butcher tableau.

    Unrolling the stage recursion gives A = (I - alpha_top)^-1 beta_top and
    b = beta_last + alpha_last A, where "top" is the first s rows and
    "last" the update row.
    """
    s = form.s
    al, be = form.alpha, form.beta
    M = np.eye(s) - al[:s]
    # alpha_top is strictly lower triangular, so M is unit lower triangular
    # and cannot be singular; keep a guard for malformed input anyway.
    try:
        A = solve_triangular(M, be[:s], lower=True, unit_diagonal=True)
    except Exception as exc:  # pragma: no cover - defensive
        raise ValueError("non-explicit Shu-Osher form") from exc
    b = be[s] + al[s] @ A
    return ButcherTableau(A=A, b=b, label=label, q=q, p=p)


def _as_float_matrix(obj, name, rows, cols):
    try:
        arr = np.array(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise TableauParseError(f"field '{name}' is not numeric") from exc
    if arr.shape != (rows, cols):
        raise TableauParseError(
            f"field '{name}' has shape {arr.shape}, expected ({rows}, {cols})")
    return arr


def parse_tableau(text: bytes | str) -> ButcherTableau:
    """Read a tableau JSON document.

    Expected shape: {"label": str, "s": int, "A": [[...]], "b": [...],
    "q": int|null, "p": int|null}.  Rejects non-explicit A.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TableauParseError(f"malformed JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise TableauParseError("top level must be an object")
    try:
        s = doc["s"]
    except KeyError:
        raise TableauParseError("field 's' missing") from None
    if not isinstance(s, int) or s < 1:
        raise TableauParseError("field 's' must be a positive integer")
    if "A" not in doc:
        raise TableauParseError("field 'A' missing")
    if "b" not in doc:
        raise TableauParseError("field 'b' missing")
    A = _as_float_matrix(doc["A"], "A", s, s)
    b = np.array(doc["b"], dtype=float)
    if b.shape != (s,):
        raise TableauParseError(
            f"field 'b' has shape {b.shape}, expected ({s},)")
    if np.any(np.triu(A) != 0.0):
        i, j = [int(k[0]) for k in np.nonzero(np.triu(A))]
        raise TableauParseError(
            f"field 'A' is not explicit: A[{i},{j}] != 0 on or above the diagonal")
    label = doc.get("label")
    if label is not None and not isinstance(label, str):
        raise TableauParseError("field 'label' must be a string or null")
    q, p = doc.get("q"), doc.get("p")
    for nm, val in (("q", q), ("p", p)):
        if val is not None and not isinstance(val, int):
            raise TableauParseError(f"field '{nm}' must be an integer or null")
    return ButcherTableau(A=A, b=b, label=label, q=q, p=p)


def _rows_json(m) -> str:
    return "[" + ",\n      ".join(json.dumps(list(r)) for r in m) + "]"


def emit_tableau(tableau: ButcherTableau) -> bytes:
    """Serialize to the tableau JSON document, one A row per line.

    Floats use shortest round-trip repr, so parse(emit(t)) reproduces t
    bit for bit and emit(parse(x)) is the identity on files produced here.
    """
    label = json.dumps(tableau.label if tableau.label is not None else "")
    text = (
        "{\n"
        f' "label": {label},\n'
        f' "s": {tableau.s},\n'
        f' "A": {_rows_json(tableau.A)},\n'
        f' "b": {json.dumps(list(tableau.b))},\n'
        f' "q": {json.dumps(tableau.q)},\n'
        f' "p": {json.dumps(tableau.p)}\n'
        "}\n"
    )
    return text.encode("utf-8")


def parse_shu_osher(text: bytes | str) -> ShuOsherForm:
    """Read a Shu-Osher JSON document {"s", "v", "alpha", "beta"}."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TableauParseError(f"malformed JSON: {exc}") from exc
    try:
        s = doc["s"]
    except (KeyError, TypeError):
        raise TableauParseError("field 's' missing") from None
    if not isinstance(s, int) or s < 1:
        raise TableauParseError("field 's' must be a positive integer")
    v = np.array(doc.get("v"), dtype=float)
    if v.shape != (s + 1,):
        raise TableauParseError(
            f"field 'v' has shape {v.shape}, expected ({s + 1},)")
    alpha = _as_float_matrix(doc.get("alpha"), "alpha", s + 1, s)
    beta = _as_float_matrix(doc.get("beta"), "beta", s + 1, s)
    return ShuOsherForm(v=v, alpha=alpha, beta=beta)


def emit_shu_osher(form: ShuOsherForm) -> bytes:
    text = (
        "{\n"
        f' "s": {form.s},\n'
        f' "v": {json.dumps(list(form.v))},\n'
        f' "alpha": {_rows_json(form.alpha)},\n'
        f' "beta": {_rows_json(form.beta)}\n'
        "}\n"
    )
    return text.encode("utf-8")
