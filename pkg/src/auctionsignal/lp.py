"""Self-contained dense linear programming.

Standard form: maximize c.x subject to rows (a, rel, b) with rel in
{"<=", "=", ">="} and all variables implicitly non-negative.  The solver is
a two-phase tableau simplex with Dantzig pricing; after a stall of
2 * (rows + cols) degenerate pivots it falls back to Bland's rule, which
guarantees termination.  Rows are equilibrated to unit max coefficient
before solving, which keeps the 1e-9 pivot tolerance meaningful across the
value scales the solver modules produce.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import NumericFailureError, ValidationError

LE, EQ, GE = "<=", "=", ">="
_RELATIONS = (LE, EQ, GE)

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-7

_DEBUG = False


def set_debug(enabled: bool) -> None:
    """Toggle tableau tracing (text format, not stable)."""
    global _DEBUG
    _DEBUG = bool(enabled)


@dataclass(frozen=True)
class LpProblem:
    """Maximize objective . x over the non-negative orthant cut by constraints."""

    num_vars: int
    objective: np.ndarray
    constraints: tuple[tuple[np.ndarray, str, float], ...]

    def __post_init__(self):
        if self.num_vars < 1:
            raise ValidationError("LP needs at least one variable")
        obj = np.asarray(self.objective, dtype=float)
        if obj.shape != (self.num_vars,) or not np.isfinite(obj).all():
            raise ValidationError("objective must be a finite vector of length num_vars")
        rows = []
        for a, rel, b in self.constraints:
            vec = np.asarray(a, dtype=float)
            if vec.shape != (self.num_vars,) or not np.isfinite(vec).all():
                raise ValidationError("constraint vector has wrong length or is non-finite")
            if rel not in _RELATIONS:
                raise ValidationError(f"unknown relation {rel!r}")
            if not np.isfinite(b):
                raise ValidationError("constraint rhs must be finite")
            rows.append((vec, rel, float(b)))
        object.__setattr__(self, "objective", obj)
        object.__setattr__(self, "constraints", tuple(rows))


@dataclass(frozen=True)
class LpSolution:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: np.ndarray | None
    objective_value: float | None


def residuals(problem: LpProblem, x: np.ndarray) -> np.ndarray:
    """Per-constraint violation amounts (0 means satisfied); sign-free."""
    out = np.zeros(len(problem.constraints))
    for idx, (a, rel, b) in enumerate(problem.constraints):
        val = float(a @ x)
        if rel == LE:
            out[idx] = max(0.0, val - b)
        elif rel == GE:
            out[idx] = max(0.0, b - val)
        else:
            out[idx] = abs(val - b)
    return out


def _canonical_rows(problem: LpProblem):
    """Flip rows so every rhs is >= 0 and rhs-0 '>=' rows become slack-only '<='."""
    rows = []
    for a, rel, b in problem.constraints:
        a = a.copy()
        if b < 0 or (b == 0 and rel == GE):
            a, b = -a, -b
            rel = {LE: GE, GE: LE, EQ: EQ}[rel]
        scale = np.abs(a).max()
        if scale > 0:
            a, b = a / scale, b / scale
        rows.append((a, rel, b))
    return rows


class _Tableau:
    """Mutable simplex tableau; the cost row is stored as z_j - c_j."""

    def __init__(self, T: np.ndarray, basis: list[int]):
        self.T = T
        self.basis = basis
        self.rows = T.shape[0] - 1
        self.cols = T.shape[1] - 1

    def pivot(self, row: int, col: int) -> None:
        T = self.T
        T[row] /= T[row, col]
        factor = T[:, col].copy()
        factor[row] = 0.0
        T -= np.outer(factor, T[row])
        self.basis[row] = col

    def run(self) -> str:
        """Iterate to optimality; returns "optimal" or "unbounded"."""
        stall_limit = 2 * (self.rows + self.cols)
        max_iters = 50 * (self.rows + self.cols) + 1000
        degenerate_streak = 0
        bland = False
        for _ in range(max_iters):
            cost = self.T[-1, :-1]
            if bland:
                entering_mask = cost < -PIVOT_TOL
                if not entering_mask.any():
                    return "optimal"
                col = int(np.argmax(entering_mask))
            else:
                col = int(np.argmin(cost))
                if cost[col] >= -PIVOT_TOL:
                    return "optimal"
            colvals = self.T[:-1, col]
            rhs = self.T[:-1, -1]
            # Admit pivots relative to the column scale: entries that are pure
            # rounding noise next to huge entries would wreck feasibility.
            threshold = PIVOT_TOL * max(1.0, float(np.abs(colvals).max()))
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios = np.where(colvals > threshold, rhs / colvals, np.inf)
            row = int(np.argmin(ratios))
            if not np.isfinite(ratios[row]):
                return "unbounded"
            if bland:
                # Bland needs the lowest basic-variable index among tied ratios.
                tied = np.nonzero(ratios <= ratios[row] + 1e-12)[0]
                row = int(min(tied, key=lambda r: self.basis[r]))
            if ratios[row] <= PIVOT_TOL:
                degenerate_streak += 1
                if degenerate_streak > stall_limit:
                    bland = True
            else:
                degenerate_streak = 0
            self.pivot(row, col)
            if not np.isfinite(self.T).all():
                raise NumericFailureError(
                    f"tableau blew up at pivot ({row}, {col}); condition loss")
            if _DEBUG:
                print(f"[lp] pivot row={row} col={col} obj={self.T[-1, -1]:.12g} "
                      f"bland={bland}")
        raise NumericFailureError(
            f"simplex failed to converge within {max_iters} pivots "
            f"({self.rows} rows, {self.cols} cols)")


def solve(problem: LpProblem) -> LpSolution:
    """Two-phase simplex; deterministic for identical input.

    Raises NumericFailureError when pivoting degenerates numerically; returns
    status "infeasible" / "unbounded" for genuinely bad programs.
    """
    rows = _canonical_rows(problem)
    n = problem.num_vars
    n_rows = len(rows)

    num_slack = sum(1 for _, rel, _ in rows if rel == LE)
    num_surplus = sum(1 for _, rel, _ in rows if rel == GE)
    num_art = sum(1 for _, rel, _ in rows if rel in (GE, EQ))
    slack0, surplus0 = n, n + num_slack
    art0 = n + num_slack + num_surplus
    total = art0 + num_art

    T = np.zeros((n_rows + 1, total + 1))
    basis: list[int] = []
    si = ui = ai = 0
    for r, (a, rel, b) in enumerate(rows):
        T[r, :n] = a
        T[r, -1] = b
        if rel == LE:
            T[r, slack0 + si] = 1.0
            basis.append(slack0 + si)
            si += 1
        else:
            if rel == GE:
                T[r, surplus0 + ui] = -1.0
                ui += 1
            T[r, art0 + ai] = 1.0
            basis.append(art0 + ai)
            ai += 1

    tab = _Tableau(T, basis)

    if num_art:
        # Phase 1: maximize -(sum of artificials).
        cost = np.zeros(total + 1)
        for r, bc in enumerate(basis):
            if bc >= art0:
                cost -= T[r]
        cost[art0:total] += 1.0
        T[-1] = cost
        status = tab.run()
        if status != "optimal":
            raise NumericFailureError("phase-1 simplex reported unbounded")
        if T[-1, -1] < -FEAS_TOL:
            return LpSolution(status="infeasible", x=None, objective_value=None)
        # Drive leftover artificials out of the basis or drop redundant rows.
        keep = np.ones(n_rows, dtype=bool)
        for r in range(n_rows):
            if tab.basis[r] >= art0:
                candidates = np.abs(T[r, :art0])
                threshold = PIVOT_TOL * max(1.0, float(candidates.max()))
                col = int(np.argmax(candidates > threshold))
                if candidates[col] > threshold:
                    tab.pivot(r, col)
                else:
                    keep[r] = False
        col_keep = np.concatenate([np.ones(art0, dtype=bool),
                                   np.zeros(num_art, dtype=bool), [True]])
        T = T[np.concatenate([keep, [True]])][:, col_keep]
        basis = [bc for r, bc in enumerate(tab.basis) if keep[r]]
        tab = _Tableau(T, basis)

    # Phase 2 cost row from the real objective.
    c_ext = np.zeros(tab.cols + 1)
    c_ext[:n] = problem.objective
    cost = -c_ext
    for r, bc in enumerate(tab.basis):
        if c_ext[bc] != 0.0:
            cost += c_ext[bc] * tab.T[r]
    tab.T[-1] = cost
    status = tab.run()
    if status == "unbounded":
        return LpSolution(status="unbounded", x=None, objective_value=None)

    x = np.zeros(tab.cols)
    for r, bc in enumerate(tab.basis):
        x[bc] = tab.T[r, -1]
    x_orig = np.maximum(x[:n], 0.0)
    return LpSolution(status="optimal", x=x_orig,
                      objective_value=float(problem.objective @ x_orig))


def max_margin_point(strict_constraints: Iterable[Sequence[float]], dim: int,
                     cap: float = 1.0) -> tuple[float, np.ndarray]:
    """Largest margin t such that a.x >= t holds for each row, x on the simplex.

    The interior of the cone {x >= 0 : a.x >= 0 for all rows} is non-empty iff
    the returned t* is positive (homogeneity lets us normalize to sum(x) = 1).
    With no constraints t* is capped at `cap`.  t is modelled as a free
    variable so infeasible-side systems report a negative margin.
    """
    rows = [np.asarray(a, dtype=float) for a in strict_constraints]
    if dim < 1:
        raise ValidationError("dimension must be at least 1")
    # Variables: x (dim), then t = t_pos - t_neg.
    num_vars = dim + 2
    objective = np.zeros(num_vars)
    objective[dim], objective[dim + 1] = 1.0, -1.0
    constraints: list[tuple[np.ndarray, str, float]] = []
    for a in rows:
        if a.shape != (dim,):
            raise ValidationError(f"constraint has length {a.shape}, expected ({dim},)")
        vec = np.zeros(num_vars)
        vec[:dim] = a
        vec[dim], vec[dim + 1] = -1.0, 1.0
        constraints.append((vec, GE, 0.0))
    norm = np.zeros(num_vars)
    norm[:dim] = 1.0
    constraints.append((norm, EQ, 1.0))
    tcap = np.zeros(num_vars)
    tcap[dim], tcap[dim + 1] = 1.0, -1.0
    constraints.append((tcap, LE, float(cap)))

    solution = solve(LpProblem(num_vars=num_vars, objective=objective,
                               constraints=tuple(constraints)))
    if solution.status != "optimal":
        raise NumericFailureError(f"margin LP ended with status {solution.status}")
    t_star = solution.x[dim] - solution.x[dim + 1]
    return float(t_star), solution.x[:dim].copy()
