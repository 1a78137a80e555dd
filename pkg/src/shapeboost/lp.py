"""Thin deterministic LP layer returning primal solutions and dual multipliers.

Problems are stated as: minimize c @ x subject to A_ub @ x <= b_ub,
A_eq @ x == b_eq and per-variable bounds.  Solves are delegated to
scipy's HiGHS backend, which is deterministic for identical inputs; the
duals it reports are converted to the convention used here: dual_ineq >= 0
for <= rows, and the strong-duality identity

    c @ x == -b_ub @ dual_ineq + b_eq @ dual_eq + lo @ dual_lower + hi @ dual_upper

holds at every optimal solve (dual_upper <= 0; infinite bounds
contribute nothing).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from .exceptions import InternalError, InvalidInputError

FEASIBILITY_TOL = 1e-8
DUALITY_TOL = 1e-6


@dataclass
class LinearProgram:
    c: np.ndarray
    A_ub: object = None   # ndarray or scipy sparse, may be None
    b_ub: np.ndarray = None
    A_eq: object = None
    b_eq: np.ndarray = None
    bounds: list = None   # list of (lo, hi); None means (0, +inf) per variable

    def n_vars(self) -> int:
        return len(np.asarray(self.c).ravel())


@dataclass
class LpSolution:
    x: np.ndarray
    dual_ineq: np.ndarray
    dual_eq: np.ndarray
    dual_lower: np.ndarray
    dual_upper: np.ndarray
    objective: float
    status: str  # "optimal" | "infeasible" | "unbounded"

    def dual_objective(self, lp: LinearProgram) -> float:
        total = 0.0
        if lp.b_ub is not None and len(lp.b_ub):
            total -= float(np.asarray(lp.b_ub) @ self.dual_ineq)
        if lp.b_eq is not None and len(lp.b_eq):
            total += float(np.asarray(lp.b_eq) @ self.dual_eq)
        lo, hi = _bound_arrays(lp)
        mask_lo = np.isfinite(lo)
        mask_hi = np.isfinite(hi)
        total += float(lo[mask_lo] @ self.dual_lower[mask_lo])
        total += float(hi[mask_hi] @ self.dual_upper[mask_hi])
        return total


def _bound_arrays(lp: LinearProgram):
    n = lp.n_vars()
    if lp.bounds is None:
        return np.zeros(n), np.full(n, np.inf)
    lo = np.array([b[0] if b[0] is not None else -np.inf for b in lp.bounds])
    hi = np.array([b[1] if b[1] is not None else np.inf for b in lp.bounds])
    return lo, hi


def _check_dims(lp: LinearProgram) -> None:
    n = lp.n_vars()
    for A, b, name in ((lp.A_ub, lp.b_ub, "inequality"),
                       (lp.A_eq, lp.b_eq, "equality")):
        if (A is None) != (b is None):
            raise InvalidInputError(f"{name} block needs both matrix and rhs")
        if A is not None:
            rows, cols = A.shape
            if cols != n or rows != len(np.asarray(b).ravel()):
                raise InvalidInputError(
                    f"{name} block dimensions {A.shape} inconsistent with "
                    f"{n} variables / {len(np.asarray(b).ravel())} rhs entries")
    if lp.bounds is not None and len(lp.bounds) != n:
        raise InvalidInputError("one (lo, hi) bound pair required per variable")


_STATUS = {0: "optimal", 2: "infeasible", 3: "unbounded"}


def solve_lp(lp: LinearProgram) -> LpSolution:
    """Solve a linear program; never raises on infeasible/unbounded input."""
    _check_dims(lp)
    n = lp.n_vars()
    bounds = lp.bounds if lp.bounds is not None else [(0, None)] * n
    res = linprog(np.asarray(lp.c, dtype=float).ravel(),
                  A_ub=lp.A_ub, b_ub=lp.b_ub,
                  A_eq=lp.A_eq, b_eq=lp.b_eq,
                  bounds=bounds, method="highs")
    status = _STATUS.get(res.status)
    if status is None:
        raise InternalError(f"LP solver failed: {res.message}")
    if status != "optimal":
        empty = np.zeros(0)
        return LpSolution(x=np.full(n, np.nan), dual_ineq=empty, dual_eq=empty,
                          dual_lower=np.zeros(n), dual_upper=np.zeros(n),
                          objective=np.nan, status=status)
    # HiGHS marginals are d(objective)/d(rhs); for <= rows they are <= 0.
    dual_ineq = (-res.ineqlin.marginals if lp.A_ub is not None
                 else np.zeros(0))
    dual_eq = (np.asarray(res.eqlin.marginals) if lp.A_eq is not None
               else np.zeros(0))
    return LpSolution(
        x=res.x,
        dual_ineq=np.maximum(dual_ineq, 0.0),
        dual_eq=dual_eq,
        dual_lower=np.asarray(res.lower.marginals),
        dual_upper=np.asarray(res.upper.marginals),
        objective=float(res.fun),
        status="optimal",
    )


def feasibility_residual(lp: LinearProgram, x: np.ndarray) -> float:
    """Max violation of constraints and bounds at x."""
    residual = 0.0
    if lp.A_ub is not None:
        residual = max(residual, float(np.max(lp.A_ub @ x - lp.b_ub, initial=0.0)))
    if lp.A_eq is not None:
        residual = max(residual, float(np.max(np.abs(lp.A_eq @ x - lp.b_eq), initial=0.0)))
    lo, hi = _bound_arrays(lp)
    residual = max(residual, float(np.max(lo - x, initial=0.0)))
    residual = max(residual, float(np.max(x - hi, initial=0.0)))
    return residual


def dump_lp(lp: LinearProgram, path) -> None:
    """Write a human-readable dump of the LP for offline inspection.

    Format: one ``min`` line with the objective vector, then one line per
    <= and == row as ``coeffs <= rhs`` / ``coeffs == rhs``, then one
    ``bound j lo hi`` line per variable.
    """
    lo, hi = _bound_arrays(lp)
    with open(path, "w") as fh:
        fh.write("min " + " ".join(repr(v) for v in np.asarray(lp.c).ravel()) + "\n")
        for A, b, op in ((lp.A_ub, lp.b_ub, "<="), (lp.A_eq, lp.b_eq, "==")):
            if A is None:
                continue
            dense = A.toarray() if sp.issparse(A) else np.asarray(A)
            for row, rhs in zip(dense, np.asarray(b).ravel()):
                fh.write(" ".join(repr(v) for v in row) + f" {op} {rhs!r}\n")
        for j in range(lp.n_vars()):
            fh.write(f"bound {j} {lo[j]!r} {hi[j]!r}\n")
