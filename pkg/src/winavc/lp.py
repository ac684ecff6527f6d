"""Dense two-phase simplex for the small LPs used throughout the package.

Problems are stated as

    minimize    c . x
    subject to  a_ub @ x <= b_ub
                a_eq @ x == b_eq
                x >= 0

which covers every use here (probability vectors and conditional maps are
naturally non-negative).  Bland's pivoting rule is used in both phases, so
the solver cannot cycle; problem sizes are tiny (tens of variables), making
the O(rows * cols) dense tableau perfectly adequate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_TOL = 1e-9

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


class SimplexError(RuntimeError):
    """Pivoting failed to terminate within the iteration budget."""


@dataclass(frozen=True)
class LpResult:
    status: str
    x: np.ndarray | None
    value: float | None

    @property
    def is_optimal(self) -> bool:
        return self.status == OPTIMAL


def solve_lp(
    c,
    a_ub=None,
    b_ub=None,
    a_eq=None,
    b_eq=None,
    *,
    tol: float = DEFAULT_TOL,
    max_iter: int = 10_000,
) -> LpResult:
    """Solve min c.x subject to a_ub x <= b_ub, a_eq x == b_eq, x >= 0."""
    c = np.asarray(c, dtype=float)
    n = c.size

    rows = []
    rhs = []
    slack_rows = []
    if a_ub is not None:
        a_ub = np.atleast_2d(np.asarray(a_ub, dtype=float))
        b_ub = np.atleast_1d(np.asarray(b_ub, dtype=float))
        if a_ub.shape != (b_ub.size, n):
            raise ValueError(f"a_ub shape {a_ub.shape} incompatible with c size {n}")
        for i in range(b_ub.size):
            rows.append(a_ub[i])
            rhs.append(b_ub[i])
            slack_rows.append(len(rows) - 1)
    if a_eq is not None:
        a_eq = np.atleast_2d(np.asarray(a_eq, dtype=float))
        b_eq = np.atleast_1d(np.asarray(b_eq, dtype=float))
        if a_eq.shape != (b_eq.size, n):
            raise ValueError(f"a_eq shape {a_eq.shape} incompatible with c size {n}")
        for i in range(b_eq.size):
            rows.append(a_eq[i])
            rhs.append(b_eq[i])

    m = len(rows)
    if m == 0:
        # Unconstrained over the non-negative orthant.
        if np.any(c < -tol):
            return LpResult(UNBOUNDED, None, None)
        return LpResult(OPTIMAL, np.zeros(n), 0.0)

    a = np.vstack(rows)
    b = np.asarray(rhs, dtype=float)

    n_slack = len(slack_rows)
    full = np.zeros((m, n + n_slack))
    full[:, :n] = a
    for j, r in enumerate(slack_rows):
        full[r, n + j] = 1.0

    # Normalize to b >= 0 before introducing artificials.
    neg = b < 0
    full[neg] *= -1.0
    b = np.where(neg, -b, b)

    tableau = np.zeros((m, n + n_slack + m + 1))
    tableau[:, : n + n_slack] = full
    tableau[:, -1] = b
    basis = np.empty(m, dtype=int)
    for i in range(m):
        tableau[i, n + n_slack + i] = 1.0
        basis[i] = n + n_slack + i

    # Phase 1: minimize the sum of artificial variables.
    art_cost = np.zeros(n + n_slack + m)
    art_cost[n + n_slack :] = 1.0
    status = _run_simplex(tableau, basis, art_cost, tol, max_iter)
    if status == UNBOUNDED:  # pragma: no cover - phase 1 objective is bounded below
        raise SimplexError("phase-1 objective reported unbounded")
    phase1_value = float(art_cost[basis] @ tableau[:, -1])
    if phase1_value > max(tol, tol * max(1.0, np.abs(b).max())):
        return LpResult(INFEASIBLE, None, None)

    # Drive any artificial variables remaining in the basis out of it.
    n_real = n + n_slack
    for i in range(m):
        if basis[i] >= n_real:
            pivot_col = -1
            for j in range(n_real):
                if abs(tableau[i, j]) > tol:
                    pivot_col = j
                    break
            if pivot_col >= 0:
                _pivot(tableau, basis, i, pivot_col)
            # Otherwise the row is redundant; the artificial stays at zero.

    # Phase 2 on the real variables only (artificial columns neutralized).
    tableau[:, n_real:-1] = 0.0
    cost = np.zeros(n + n_slack + m)
    cost[:n] = c
    status = _run_simplex(tableau, basis, cost, tol, max_iter, ncols=n_real)
    if status == UNBOUNDED:
        return LpResult(UNBOUNDED, None, None)

    x = np.zeros(n + n_slack + m)
    x[basis] = tableau[:, -1]
    x = x[:n]
    return LpResult(OPTIMAL, x, float(c @ x))


def _run_simplex(tableau, basis, cost, tol, max_iter, ncols=None) -> str:
    m = tableau.shape[0]
    if ncols is None:
        ncols = tableau.shape[1] - 1
    for _ in range(max_iter):
        cb = cost[basis]
        # Reduced costs: c_j - cb . B^-1 A_j (tableau already holds B^-1 A).
        reduced = cost[:ncols] - cb @ tableau[:, :ncols]
        entering = -1
        for j in range(ncols):  # Bland: smallest eligible index
            if reduced[j] < -tol:
                entering = j
                break
        if entering < 0:
            return OPTIMAL
        col = tableau[:, entering]
        leaving = -1
        best = np.inf
        for i in range(m):
            if col[i] > tol:
                ratio = tableau[i, -1] / col[i]
                if ratio < best - tol or (
                    abs(ratio - best) <= tol
                    and (leaving < 0 or basis[i] < basis[leaving])
                ):
                    best = ratio
                    leaving = i
        if leaving < 0:
            return UNBOUNDED
        _pivot(tableau, basis, leaving, entering)
    raise SimplexError(f"simplex did not terminate within {max_iter} pivots")


def _pivot(tableau, basis, row, col) -> None:
    tableau[row] /= tableau[row, col]
    for i in range(tableau.shape[0]):
        if i != row and tableau[i, col] != 0.0:
            tableau[i] -= tableau[i, col] * tableau[row]
    basis[row] = col


def feasible_point(a_ub=None, b_ub=None, a_eq=None, b_eq=None, *, tol=DEFAULT_TOL):
    """Return any point of the polyhedron, or None if it is empty."""
    if a_ub is not None:
        n = np.atleast_2d(np.asarray(a_ub)).shape[1]
    elif a_eq is not None:
        n = np.atleast_2d(np.asarray(a_eq)).shape[1]
    else:
        raise ValueError("need at least one constraint block")
    res = solve_lp(np.zeros(n), a_ub, b_ub, a_eq, b_eq, tol=tol)
    return res.x if res.is_optimal else None
