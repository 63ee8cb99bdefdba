"""Optimal and constrained signaling for known-valuation instances.

The revenue-maximization program assigns one candidate signal to each ordered
bidder pair (i1, i2): its payoff variable is pinned to i2's normalized value
under the signal and bounded by i1's, and the per-good emission masses couple
all signals through column-stochasticity.  Since two bidders weakly exceed
the payoff variable, the realized second-highest bid can only match or beat
it, so the optimum is exact.

Clustering (deterministic 0/1 schemes) is covered by an exact brute force
over set partitions plus the closed-form upper bound used to certify the
factor-two gap.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from . import lp
from .errors import GuardExceededError, InfeasibleAtBetaError, ValidationError
from .model import (KnownInstance, SchemeReport, SignalingScheme, label_tuples,
                    make_report, merge_equal_label_signals, optimal_welfare_star,
                    require_valid_scheme, signal_contributions, welfare_maximizers)

DEFAULT_PARTITION_GUARD = 10


@dataclass(frozen=True)
class ClusterPartition:
    """Disjoint good-index clusters covering every good (0-based internally)."""

    clusters: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "clusters",
                           tuple(tuple(int(j) for j in c) for c in self.clusters))

    def validate(self, m: int) -> None:
        seen: set[int] = set()
        for cluster in self.clusters:
            if not cluster:
                raise ValidationError("empty cluster")
            for j in cluster:
                if not 0 <= j < m:
                    raise ValidationError(f"good index {j} outside [0, {m})")
                if j in seen:
                    raise ValidationError(f"good {j} appears in two clusters")
                seen.add(j)
        if len(seen) != m:
            missing = sorted(set(range(m)) - seen)
            raise ValidationError(f"partition misses goods {missing}")

    def to_scheme(self, m: int) -> SignalingScheme:
        self.validate(m)
        phi = np.zeros((len(self.clusters), m))
        for sigma, cluster in enumerate(self.clusters):
            phi[sigma, list(cluster)] = 1.0
        return SignalingScheme(s=len(self.clusters), phi=phi)

    def to_json(self) -> dict:
        return {"clusters": [[j + 1 for j in c] for c in self.clusters]}

    @classmethod
    def from_json(cls, data: dict) -> "ClusterPartition":
        if not isinstance(data, dict) or "clusters" not in data:
            raise ValidationError("partition JSON must contain 'clusters'")
        return cls(tuple(tuple(int(j) - 1 for j in c) for c in data["clusters"]))


@dataclass(frozen=True)
class Lp1Layout:
    """Variable indices for the pair-signal program."""

    pairs: tuple[tuple[int, int], ...]
    m: int

    def phi_var(self, pair_idx: int, j: int) -> int:
        return pair_idx * (self.m + 1) + j

    def payoff_var(self, pair_idx: int) -> int:
        return pair_idx * (self.m + 1) + self.m

    @property
    def num_vars(self) -> int:
        return len(self.pairs) * (self.m + 1)

    def extract_phi(self, x: np.ndarray) -> np.ndarray:
        rows = [x[self.phi_var(p, 0):self.phi_var(p, 0) + self.m]
                for p in range(len(self.pairs))]
        return np.array(rows)


def ordered_pairs(n: int) -> tuple[tuple[int, int], ...]:
    return tuple((i1, i2) for i1 in range(n) for i2 in range(n) if i1 != i2)


def build_lp1(inst: KnownInstance, strict: bool = False) -> tuple[lp.LpProblem, Lp1Layout]:
    """Pair-signal revenue program: n(n-1)(m+1) variables, 2n(n-1)+m rows.

    With strict=True, each pair additionally dominates every third bidder,
    mirroring the ordering constraints of the Bayesian program (useful for
    debugging parity; not required for soundness here).
    """
    psi = inst.psi
    layout = Lp1Layout(pairs=ordered_pairs(inst.n), m=inst.m)
    num_vars = layout.num_vars
    objective = np.zeros(num_vars)
    constraints: list[tuple[np.ndarray, str, float]] = []

    for pidx, (i1, i2) in enumerate(layout.pairs):
        objective[layout.payoff_var(pidx)] = 1.0
        base = layout.phi_var(pidx, 0)
        top = np.zeros(num_vars)
        top[base:base + inst.m] = -psi[i1]
        top[layout.payoff_var(pidx)] = 1.0
        constraints.append((top, lp.LE, 0.0))
        second = np.zeros(num_vars)
        second[base:base + inst.m] = -psi[i2]
        second[layout.payoff_var(pidx)] = 1.0
        constraints.append((second, lp.EQ, 0.0))
        if strict:
            for i in range(inst.n):
                if i in (i1, i2):
                    continue
                row = np.zeros(num_vars)
                row[base:base + inst.m] = psi[i2] - psi[i]
                constraints.append((row, lp.GE, 0.0))

    for j in range(inst.m):
        row = np.zeros(num_vars)
        for pidx in range(len(layout.pairs)):
            row[layout.phi_var(pidx, j)] = 1.0
        constraints.append((row, lp.EQ, 1.0))

    return lp.LpProblem(num_vars=num_vars, objective=objective,
                        constraints=tuple(constraints)), layout


def _value_scaled(inst: KnownInstance) -> tuple[KnownInstance, float]:
    """Copy of the instance with normalized valuations rescaled to max 1.

    Revenue is positively homogeneous in the valuations, so the optimizer can
    work at unit scale (well-conditioned tableaus) and scale the objective
    back; emission variables are unaffected.
    """
    scale = float(inst.psi.max())
    if scale <= 0.0 or scale == 1.0:
        return inst, 1.0
    return KnownInstance(n=inst.n, m=inst.m, p=inst.p, V=inst.V / scale), scale


def _clean_scheme(phi: np.ndarray, zero_tol: float = 1e-12) -> SignalingScheme:
    """Drop all-zero signals and repair the tiny column drift that causes.

    Entries below zero_tol are treated as exact zeros (simplex solutions are
    basic, so almost all of them already are); columns are renormalized so
    the result is column-stochastic to machine precision.
    """
    phi = np.where(phi < zero_tol, 0.0, phi)
    keep = phi.max(axis=1) > 0.0
    if keep.any():
        phi = phi[keep]
    else:
        phi = np.ones((1, phi.shape[1]))
    phi = phi / phi.sum(axis=0, keepdims=True)
    return SignalingScheme(s=phi.shape[0], phi=phi)


def solve_optimal(inst: KnownInstance) -> tuple[SignalingScheme, SchemeReport]:
    """Revenue-optimal signaling scheme with at most n(n-1) signals."""
    work, scale = _value_scaled(inst)
    problem, layout = build_lp1(work)
    solution = lp.solve(problem)
    if solution.status != "optimal":
        raise AssertionError(
            f"pair-signal program must be solvable, got {solution.status}")
    scheme = _clean_scheme(layout.extract_phi(solution.x))
    merged = merge_equal_label_signals(inst, scheme)
    report = make_report(inst, merged, lp_objective=solution.objective_value * scale,
                         signal_count_after_merge=merged.s)
    return merged, report


def solve_welfare_constrained(inst: KnownInstance, beta: float
                              ) -> tuple[SignalingScheme, SchemeReport]:
    """Best revenue while the per-signal top values retain beta * W*.

    The floor is placed on the labeled-top mass; the realized welfare can only
    exceed it.  Betas at or below one half never bind (a revenue-optimal
    scheme preserving half the welfare always exists).
    """
    if not 0.0 <= beta <= 1.0:
        raise ValidationError(f"beta must lie in [0, 1], got {beta}")
    work, scale = _value_scaled(inst)
    problem, layout = build_lp1(work)
    floor = np.zeros(layout.num_vars)
    psi = work.psi
    for pidx, (i1, _) in enumerate(layout.pairs):
        base = layout.phi_var(pidx, 0)
        floor[base:base + inst.m] = psi[i1]
    w_star = optimal_welfare_star(work)
    constraints = problem.constraints + ((floor, lp.GE, beta * w_star),)
    solution = lp.solve(lp.LpProblem(num_vars=problem.num_vars,
                                     objective=problem.objective,
                                     constraints=constraints))
    if solution.status == "infeasible":
        raise InfeasibleAtBetaError(
            f"no scheme retains {beta} of the optimal welfare {w_star * scale}")
    if solution.status != "optimal":
        raise AssertionError(f"unexpected LP status {solution.status}")
    scheme = _clean_scheme(layout.extract_phi(solution.x))
    merged = merge_equal_label_signals(inst, scheme)
    report = make_report(inst, merged, lp_objective=solution.objective_value * scale,
                         signal_count_after_merge=merged.s)
    return merged, report


def welfare_repair(inst: KnownInstance, scheme: SignalingScheme) -> SignalingScheme:
    """Split signals until every carried good keeps its top valuer in the labels.

    Whenever a signal carries good j but neither of its two labeled bidders is
    j's welfare maximizer, the good is split off into a singleton signal.  A
    singleton's top bidder is the good's top valuer, so splits never repeat,
    each one shrinks a multi-good support, and the process terminates.  Every
    split can only raise revenue; on a revenue-optimal input it is neutral and
    the result retains at least half the optimal welfare.
    """
    require_valid_scheme(scheme, inst.m)
    mu = welfare_maximizers(inst)
    rows = [row.copy() for row in scheme.phi]
    changed = True
    while changed:
        changed = False
        tuples = label_tuples(inst, SignalingScheme.from_rows(np.array(rows)))
        for sigma, row in enumerate(rows):
            support = np.nonzero(row > 0.0)[0]
            if len(support) < 2:
                continue
            (h1, h2), = tuples[sigma]
            bad = [j for j in support if mu[j] not in (h1, h2)]
            if not bad:
                continue
            j = bad[0]
            singleton = np.zeros(inst.m)
            singleton[j] = row[j]
            row[j] = 0.0
            rows.append(singleton)
            changed = True
            break
    return SignalingScheme.from_rows(np.array(rows))


def clustering_revenue(inst: KnownInstance, partition: ClusterPartition) -> float:
    """Revenue of the deterministic scheme that announces the realized cluster."""
    scheme = partition.to_scheme(inst.m)
    return float(signal_contributions(inst, scheme).sum())


def _set_partitions(m: int):
    """Yield set partitions of range(m) via restricted growth strings."""
    assignment = [0] * m
    max_used = [0] * m
    while True:
        blocks: list[list[int]] = [[] for _ in range(max(assignment) + 1)]
        for j, block in enumerate(assignment):
            blocks[block].append(j)
        yield blocks
        # Advance to the next restricted growth string.
        idx = m - 1
        while idx > 0 and assignment[idx] == max_used[idx - 1] + 1:
            idx -= 1
        if idx == 0:
            return
        assignment[idx] += 1
        max_used[idx] = max(max_used[idx - 1], assignment[idx])
        for later in range(idx + 1, m):
            assignment[later] = 0
            max_used[later] = max_used[idx]


def _bell_number(n: int) -> int:
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for value in row:
            nxt.append(nxt[-1] + value)
        row = nxt
    return row[0]


def clustering_bruteforce(inst: KnownInstance, guard: int = DEFAULT_PARTITION_GUARD
                          ) -> tuple[ClusterPartition, float]:
    """Exact best clustering by enumerating every set partition of the goods."""
    if inst.m > guard:
        raise GuardExceededError(
            f"m={inst.m} exceeds the partition guard {guard} "
            f"(Bell({guard}) = {_bell_number(guard)} partitions)")
    psi = inst.psi
    best_value = -np.inf
    best_blocks: list[list[int]] | None = None
    for blocks in _set_partitions(inst.m):
        value = 0.0
        for block in blocks:
            sums = psi[:, block].sum(axis=1)
            value += float(np.partition(sums, -2)[-2])
        if value > best_value:
            best_value = value
            best_blocks = [list(b) for b in blocks]
    assert best_blocks is not None
    return ClusterPartition(tuple(tuple(b) for b in best_blocks)), best_value


def clustering_bound(inst: KnownInstance) -> float:
    """Drop-one-bidder upper bound: no signaling scheme can collect more."""
    psi = inst.psi
    totals = np.empty(inst.n)
    for drop in range(inst.n):
        rest = np.delete(psi, drop, axis=0)
        totals[drop] = rest.max(axis=0).sum()
    return float(totals.min())
