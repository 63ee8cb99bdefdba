"""Bayesian-setting solvers.

Two independent routes to the optimum:

* fixed-outcome-count route: one candidate signal per label tuple, i.e. per
  assignment of an ordered bidder pair to every outcome, (n(n-1))^k signals
  in total.  The printed top/second constraints aggregate over outcomes and
  can overestimate achievable revenue, so per-outcome ordering constraints
  (labeled top >= labeled second >= everyone else) are added by default; with
  them the objective equals the realized revenue of the extracted scheme.

* fixed-good-count route: enumerate only label tuples whose feasibility cone
  has a non-empty interior on the emission simplex.  The cones are cells of a
  hyperplane arrangement, so their number is polynomial for fixed m, and the
  enumeration extends surviving partial labels one outcome at a time.

A separate routine compresses any scheme to at most m signals: while more
signals than goods exist their columns are linearly dependent, and sliding
along the dependence direction (revenue is per-signal homogeneous, hence
linear along it) reaches an endpoint with a zero column without losing
revenue.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from math import comb

import numpy as np

from . import lp
from .errors import GuardExceededError, NumericFailureError
from .model import (BayesInstance, Instance, SchemeReport, SignalingScheme,
                    make_report, merge_equal_label_signals,
                    require_valid_scheme, signal_contributions)
from .solver_known import _clean_scheme, ordered_pairs

DEFAULT_MAX_LABELS = 1000
DEFAULT_MAX_REGION_CHECKS = 100_000
INTERIOR_MARGIN = 1e-9

LabelTuple = tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class Region:
    """Feasibility cone of a label tuple, normalized to the emission simplex."""

    label: LabelTuple
    constraints: tuple[np.ndarray, ...]
    interior_witness: np.ndarray | None


@dataclass(frozen=True)
class Lp2Layout:
    labels: tuple[LabelTuple, ...]
    m: int

    def phi_var(self, label_idx: int, j: int) -> int:
        return label_idx * (self.m + 1) + j

    def payoff_var(self, label_idx: int) -> int:
        return label_idx * (self.m + 1) + self.m

    @property
    def num_vars(self) -> int:
        return len(self.labels) * (self.m + 1)

    def extract_phi(self, x: np.ndarray) -> np.ndarray:
        return np.array([x[self.phi_var(i, 0):self.phi_var(i, 0) + self.m]
                         for i in range(len(self.labels))])


def build_lp2(inst: BayesInstance, ordering: bool,
              labels: tuple[LabelTuple, ...]) -> tuple[lp.LpProblem, Lp2Layout]:
    """Label-signal revenue program over the given label tuples.

    Each label gets m emission variables and a payoff variable equal to the
    q-weighted value of its per-outcome second bidders and bounded by that of
    its top bidders.  With ordering=True the per-outcome dominance
    inequalities are added as well, making the program sound.
    """
    if not labels:
        raise GuardExceededError("label set must be non-empty")
    psi = inst.psi_stack
    q = inst.q
    layout = Lp2Layout(labels=tuple(labels), m=inst.m)
    num_vars = layout.num_vars
    objective = np.zeros(num_vars)
    constraints: list[tuple[np.ndarray, str, float]] = []

    for lidx, label in enumerate(layout.labels):
        objective[layout.payoff_var(lidx)] = 1.0
        base = layout.phi_var(lidx, 0)
        top_value = np.zeros(inst.m)
        second_value = np.zeros(inst.m)
        for ell, (i1, i2) in enumerate(label):
            top_value += q[ell] * psi[ell, i1]
            second_value += q[ell] * psi[ell, i2]
        top = np.zeros(num_vars)
        top[base:base + inst.m] = -top_value
        top[layout.payoff_var(lidx)] = 1.0
        constraints.append((top, lp.LE, 0.0))
        second = np.zeros(num_vars)
        second[base:base + inst.m] = -second_value
        second[layout.payoff_var(lidx)] = 1.0
        constraints.append((second, lp.EQ, 0.0))
        if ordering:
            for ell, (i1, i2) in enumerate(label):
                row = np.zeros(num_vars)
                row[base:base + inst.m] = psi[ell, i1] - psi[ell, i2]
                constraints.append((row, lp.GE, 0.0))
                for i in range(inst.n):
                    if i in (i1, i2):
                        continue
                    row = np.zeros(num_vars)
                    row[base:base + inst.m] = psi[ell, i2] - psi[ell, i]
                    constraints.append((row, lp.GE, 0.0))

    for j in range(inst.m):
        row = np.zeros(num_vars)
        for lidx in range(len(layout.labels)):
            row[layout.phi_var(lidx, j)] = 1.0
        constraints.append((row, lp.EQ, 1.0))

    return lp.LpProblem(num_vars=num_vars, objective=objective,
                        constraints=tuple(constraints)), layout


def _value_scaled(inst: BayesInstance) -> tuple[BayesInstance, float]:
    """Rescale valuations to unit max; homogeneity lets the objective scale back."""
    scale = float(inst.psi_stack.max())
    if scale <= 0.0 or scale == 1.0:
        return inst, 1.0
    return BayesInstance(n=inst.n, m=inst.m, k=inst.k, p=inst.p, q=inst.q,
                         Vs=inst.Vs / scale), scale


def _solve_label_program(inst: BayesInstance, labels: tuple[LabelTuple, ...],
                         ordering: bool) -> tuple[SignalingScheme, SchemeReport]:
    work, scale = _value_scaled(inst)
    problem, layout = build_lp2(work, ordering=ordering, labels=labels)
    solution = lp.solve(problem)
    if solution.status != "optimal":
        raise AssertionError(f"label program must be solvable, got {solution.status}")
    scheme = _clean_scheme(layout.extract_phi(solution.x))
    merged = merge_equal_label_signals(inst, scheme)
    report = make_report(inst, merged, lp_objective=solution.objective_value * scale,
                         signal_count_after_merge=merged.s)
    return merged, report


def solve_fixed_k(inst: BayesInstance, max_labels: int = DEFAULT_MAX_LABELS,
                  ordering: bool = True, reduce: bool = False
                  ) -> tuple[SignalingScheme, SchemeReport]:
    """Optimum over every label tuple; practical when k is small."""
    pairs = ordered_pairs(inst.n)
    count = len(pairs) ** inst.k
    if count > max_labels:
        raise GuardExceededError(
            f"label count (n(n-1))^k = {count} exceeds the guard {max_labels}; "
            f"raise --max-labels to force it")
    labels = tuple(product(pairs, repeat=inst.k))
    scheme, report = _solve_label_program(inst, labels, ordering)
    if reduce:
        scheme = reduce_to_m_signals(inst, scheme)
        report = make_report(inst, scheme, lp_objective=report.lp_objective,
                             signal_count_after_merge=scheme.s)
    return scheme, report


def whitney_bound(m: int, hyperplanes: int) -> int:
    """Upper bound on full-dimensional cells of `hyperplanes` planes in R^m."""
    return sum(comb(hyperplanes, i) for i in range(min(m, hyperplanes) + 1))


def _ordering_normals(psi_ell: np.ndarray, i1: int, i2: int) -> list[np.ndarray]:
    """Rows d with d.x >= 0 expressing top >= second >= rest for one outcome.

    Zero rows (bidders with identical normalized valuations) carry no
    geometric content and are dropped; the tie is handled at enumeration by
    keeping only the lower-index ordering of the tied pair.
    """
    normals = []
    d = psi_ell[i1] - psi_ell[i2]
    if d.any():
        normals.append(d / np.abs(d).max())
    for i in range(psi_ell.shape[0]):
        if i in (i1, i2):
            continue
        d = psi_ell[i2] - psi_ell[i]
        if d.any():
            normals.append(d / np.abs(d).max())
    return normals


def enumerate_regions(inst: BayesInstance,
                      max_checks: int = DEFAULT_MAX_REGION_CHECKS) -> list[Region]:
    """All label tuples whose constraint cone has interior on the simplex.

    Extends surviving partial labels one outcome at a time: a tuple can only
    have interior if every prefix does.  Each candidate costs one margin LP;
    the count is guarded because it can reach the cell bound of the
    arrangement.
    """
    psi = inst.psi_stack
    pairs = ordered_pairs(inst.n)
    checks = 0
    partials: list[tuple[LabelTuple, list[np.ndarray], np.ndarray | None]] = [
        ((), [], None)]
    for ell in range(inst.k):
        extended: list[tuple[LabelTuple, list[np.ndarray], np.ndarray | None]] = []
        for label, cons, _ in partials:
            for (i1, i2) in pairs:
                tied = np.array_equal(psi[ell, i1], psi[ell, i2])
                if tied and i1 > i2:
                    continue  # enumerate a tied pair in one order only
                checks += 1
                if checks > max_checks:
                    bound = whitney_bound(inst.m, inst.n * inst.n * inst.k)
                    raise GuardExceededError(
                        f"region enumeration exceeded {max_checks} candidate checks "
                        f"(cell bound W({inst.m}, {inst.n * inst.n * inst.k}) = {bound}); "
                        f"raise --max-regions to force it")
                new_cons = cons + _ordering_normals(psi[ell], i1, i2)
                t_star, witness = lp.max_margin_point(new_cons, inst.m)
                if t_star > INTERIOR_MARGIN:
                    extended.append((label + ((i1, i2),), new_cons, witness))
        partials = extended
    return [Region(label=label, constraints=tuple(cons), interior_witness=witness)
            for label, cons, witness in partials]


def solve_fixed_m(inst: BayesInstance,
                  max_checks: int = DEFAULT_MAX_REGION_CHECKS
                  ) -> tuple[SignalingScheme, SchemeReport]:
    """Optimum via one signal per non-empty-interior region; practical for small m."""
    regions = enumerate_regions(inst, max_checks=max_checks)
    labels = tuple(region.label for region in regions)
    return _solve_label_program(inst, labels, ordering=True)


def _null_vector(columns: np.ndarray) -> np.ndarray:
    """A non-trivial x with columns @ x = 0, via elimination with partial pivoting."""
    m, s = columns.shape
    A = columns.copy()
    pivot_cols: list[int] = []
    row = 0
    for col in range(s):
        if row >= m:
            break
        pivot = row + int(np.argmax(np.abs(A[row:, col])))
        if abs(A[pivot, col]) <= 1e-9:
            continue
        A[[row, pivot]] = A[[pivot, row]]
        A[row] /= A[row, col]
        others = np.arange(m) != row
        A[others] -= np.outer(A[others, col], A[row])
        pivot_cols.append(col)
        row += 1
    free = [c for c in range(s) if c not in pivot_cols]
    if not free:
        raise NumericFailureError("no reliable linear dependence among signal columns")
    target = free[0]
    x = np.zeros(s)
    x[target] = 1.0
    for r, col in enumerate(pivot_cols):
        x[col] = -A[r, target]
    return x


def reduce_to_m_signals(inst: Instance, scheme: SignalingScheme) -> SignalingScheme:
    """Compress a valid scheme to at most m signals without losing revenue.

    Schemes already within the budget are returned unchanged.  Otherwise
    equal-label signals are merged first (exactly revenue preserving), then
    linear dependences among the remaining signal columns are eliminated one
    at a time, always sliding toward the endpoint whose revenue is at least
    as large.
    """
    require_valid_scheme(scheme, inst.m)
    if scheme.s <= inst.m:
        return scheme
    phi = scheme.phi.copy()
    phi = phi[phi.max(axis=1) > 0.0]
    merged = merge_equal_label_signals(
        inst, SignalingScheme(s=phi.shape[0], phi=phi))
    phi = merged.phi
    while phi.shape[0] > inst.m:
        current = SignalingScheme(s=phi.shape[0], phi=phi)
        x = _null_vector(phi.T)
        x[np.abs(x) < 1e-12] = 0.0
        residual = np.abs(phi.T @ x).max()
        if residual > 1e-9 * max(1.0, np.abs(x).max()):
            raise NumericFailureError(
                f"dependence residual {residual:.3e} breaches tolerance")
        positive = x > 0.0
        negative = x < 0.0
        if not positive.any() or not negative.any():
            raise NumericFailureError(
                "one-sided dependence found on a zero-free scheme")
        contribs = signal_contributions(inst, current)
        slope = float(contribs @ x)
        # Revenue is linear in eps along the dependence, so the better endpoint
        # of the validity interval never loses revenue.
        if slope >= 0.0:
            eps = 1.0 / float((-x[negative]).max())
        else:
            eps = -1.0 / float(x[positive].max())
        phi = phi * (1.0 + eps * x)[:, None]
        phi = np.maximum(phi, 0.0)
        phi = phi[phi.max(axis=1) > 1e-12]
    return SignalingScheme(s=phi.shape[0], phi=phi)
