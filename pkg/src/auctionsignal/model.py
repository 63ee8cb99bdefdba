"""Domain model for probabilistic single-item second-price auctions with signaling.

An instance fixes the bidders, a distribution over goods, and the valuation
matrix (or a distribution over matrices in the Bayesian variant).  A signaling
scheme is an s x m matrix phi whose column j gives the emission probabilities
of the s signals when good j is realized; every column sums to one.

Under truthful bidding, both revenue and welfare are linear per signal in the
normalized valuations psi(i, j) = p(j) * V(i, j): signal sigma collects the
second-highest entry of phi[sigma] @ psi.T and allocates at the highest.
All instances and schemes are immutable after construction and every
operation here is a pure function.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import ValidationError

# Absolute tolerance for probability sums and for bid ties.
PROB_TOL = 1e-9
TIE_TOL = 1e-9


def _as_matrix(value, rows: int, cols: int, name: str) -> np.ndarray:
    arr = np.array(value, dtype=float)
    if arr.shape != (rows, cols):
        raise ValidationError(f"{name} must have shape ({rows}, {cols}), got {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValidationError(f"{name} contains non-finite entries")
    return arr


def _as_prob_vector(value, length: int, name: str) -> np.ndarray:
    """Validate a probability vector, renormalizing drifts within PROB_TOL."""
    vec = np.array(value, dtype=float)
    if vec.shape != (length,):
        raise ValidationError(f"{name} must have length {length}, got shape {vec.shape}")
    if not np.isfinite(vec).all() or (vec < 0).any():
        raise ValidationError(f"{name} entries must be finite and non-negative")
    total = vec.sum()
    if abs(total - 1.0) > PROB_TOL:
        raise ValidationError(f"{name} sums to {total!r}, expected 1 within {PROB_TOL}")
    return vec / total


@dataclass(frozen=True)
class KnownInstance:
    """Auction with n bidders, m goods drawn from p, and a known valuation matrix V."""

    n: int
    m: int
    p: np.ndarray
    V: np.ndarray

    def __post_init__(self):
        if self.n < 2:
            raise ValidationError("at least two bidders are required (second-highest bid)")
        if self.m < 1:
            raise ValidationError("at least one good is required")
        object.__setattr__(self, "p", _as_prob_vector(self.p, self.m, "p"))
        V = _as_matrix(self.V, self.n, self.m, "V")
        if (V < 0).any():
            raise ValidationError("V entries must be non-negative")
        object.__setattr__(self, "V", V)

    @property
    def psi(self) -> np.ndarray:
        """Normalized valuations p(j) * V(i, j), shape (n, m)."""
        return self.p[None, :] * self.V

    def to_bayes(self) -> "BayesInstance":
        """View this instance as a one-outcome Bayesian instance."""
        return BayesInstance(n=self.n, m=self.m, k=1, p=self.p, q=np.ones(1),
                             Vs=self.V[None, :, :])


@dataclass(frozen=True)
class BayesInstance:
    """Auction whose valuation matrix is itself drawn from q over k outcomes."""

    n: int
    m: int
    k: int
    p: np.ndarray
    q: np.ndarray
    Vs: np.ndarray

    def __post_init__(self):
        if self.n < 2:
            raise ValidationError("at least two bidders are required (second-highest bid)")
        if self.m < 1:
            raise ValidationError("at least one good is required")
        if self.k < 1:
            raise ValidationError("at least one valuation outcome is required")
        object.__setattr__(self, "p", _as_prob_vector(self.p, self.m, "p"))
        object.__setattr__(self, "q", _as_prob_vector(self.q, self.k, "q"))
        Vs = np.array(self.Vs, dtype=float)
        if Vs.shape != (self.k, self.n, self.m):
            raise ValidationError(
                f"Vs must have shape ({self.k}, {self.n}, {self.m}), got {Vs.shape}")
        if not np.isfinite(Vs).all() or (Vs < 0).any():
            raise ValidationError("valuation matrices must be finite and non-negative")
        object.__setattr__(self, "Vs", Vs)

    @property
    def psi_stack(self) -> np.ndarray:
        """Per-outcome normalized valuations, shape (k, n, m)."""
        return self.p[None, None, :] * self.Vs

    @property
    def phi_stack(self) -> np.ndarray:
        """Outcome-weighted normalized valuations q(l) * psi_l, shape (k, n, m)."""
        return self.q[:, None, None] * self.psi_stack


Instance = Union[KnownInstance, BayesInstance]


def outcome_stack(inst: Instance) -> tuple[np.ndarray, np.ndarray]:
    """Return (q, psi_stack) treating a known instance as a single outcome."""
    if isinstance(inst, KnownInstance):
        return np.ones(1), inst.psi[None, :, :]
    return inst.q, inst.psi_stack


@dataclass(frozen=True)
class SignalingScheme:
    """An s x m emission matrix; column j is the signal distribution for good j."""

    s: int
    phi: np.ndarray

    def __post_init__(self):
        phi = np.array(self.phi, dtype=float)
        if phi.ndim != 2 or phi.shape[0] != self.s:
            raise ValidationError(f"phi must be a matrix with {self.s} rows, got {phi.shape}")
        object.__setattr__(self, "phi", phi)

    @classmethod
    def from_rows(cls, rows) -> "SignalingScheme":
        arr = np.atleast_2d(np.array(rows, dtype=float))
        return cls(s=arr.shape[0], phi=arr)


def validate_scheme(scheme: SignalingScheme, m: int,
                    tol: float = PROB_TOL) -> list[str]:
    """Check a scheme against good count m.

    Returns a list of human-readable violations; an empty list means valid.
    Violations are data, not exceptions, so callers can report them all.
    """
    violations: list[str] = []
    phi = scheme.phi
    if phi.shape[1] != m:
        return [f"scheme has {phi.shape[1]} good columns, instance has {m}"]
    if not np.isfinite(phi).all():
        violations.append("phi contains non-finite entries")
        return violations
    bad = np.argwhere((phi < -tol) | (phi > 1 + tol))
    for sigma, j in bad:
        violations.append(
            f"entry ({sigma + 1}, {j + 1}) = {phi[sigma, j]!r} outside [0, 1]")
    sums = phi.sum(axis=0)
    for j in np.nonzero(np.abs(sums - 1.0) > tol)[0]:
        violations.append(f"column {j + 1} sums to {sums[j]!r}, expected 1")
    return violations


def require_valid_scheme(scheme: SignalingScheme, m: int) -> None:
    violations = validate_scheme(scheme, m)
    if violations:
        raise ValidationError("invalid scheme: " + "; ".join(violations))


def second_max(values: Sequence[float]) -> float:
    """Second-largest value counting multiplicity ([5, 5] -> 5)."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.size < 2:
        raise ValidationError("second_max needs at least two values")
    return float(np.partition(arr, -2)[-2])


def _second_max_rows(bids: np.ndarray) -> np.ndarray:
    # bids has shape (s, n) with n >= 2; returns the per-row second maximum.
    return np.partition(bids, -2, axis=1)[:, -2]


def signal_contributions(inst: Instance, scheme: SignalingScheme) -> np.ndarray:
    """Per-signal revenue contributions (q-weighted over outcomes), shape (s,)."""
    require_valid_scheme(scheme, inst.m)
    q, psi = outcome_stack(inst)
    total = np.zeros(scheme.s)
    for ql, psil in zip(q, psi):
        total += ql * _second_max_rows(scheme.phi @ psil.T)
    return total


def revenue(inst: Instance, scheme: SignalingScheme) -> float:
    """Expected second-price payment collected under truthful bidding."""
    return float(signal_contributions(inst, scheme).sum())


def welfare(inst: Instance, scheme: SignalingScheme) -> float:
    """Expected value captured by the winning bidder (q-weighted for Bayesian)."""
    require_valid_scheme(scheme, inst.m)
    q, psi = outcome_stack(inst)
    total = 0.0
    for ql, psil in zip(q, psi):
        total += ql * float((scheme.phi @ psil.T).max(axis=1).sum())
    return total


def optimal_welfare_star(inst: KnownInstance) -> float:
    """Best attainable social welfare: allocate each good to its top valuer."""
    return float(inst.psi.max(axis=0).sum())


def welfare_maximizers(inst: KnownInstance) -> np.ndarray:
    """Per-good top bidder under the tie rule (lowest index within TIE_TOL)."""
    psi = inst.psi
    tops = psi.max(axis=0)
    return np.argmax(psi >= tops[None, :] - TIE_TOL, axis=0)


def _top_two(bids: np.ndarray) -> tuple[int, int]:
    """Highest and second-highest bidder, ties broken by lowest index."""
    top = bids.max()
    h1 = int(np.argmax(bids >= top - TIE_TOL))
    rest = np.delete(bids, h1)
    second = rest.max()
    mask = bids >= second - TIE_TOL
    mask[h1] = False
    h2 = int(np.argmax(mask))
    return h1, h2


def label_tuples(inst: Instance, scheme: SignalingScheme) -> list[tuple[tuple[int, int], ...]]:
    """Per-signal tuple of (h1, h2) pairs, one pair per Bayesian outcome.

    A signal whose column is all zero bids zero for everyone, so it gets the
    conventional labels (0, 1) from the tie rule.
    """
    require_valid_scheme(scheme, inst.m)
    _, psi = outcome_stack(inst)
    per_outcome = [[_top_two(b) for b in scheme.phi @ psil.T] for psil in psi]
    return [tuple(per_outcome[ell][sigma] for ell in range(len(psi)))
            for sigma in range(scheme.s)]


def labels(inst: Instance, scheme: SignalingScheme):
    """Top and second-top bidders induced by each signal.

    Known instances yield one (h1, h2) pair per signal; Bayesian instances
    yield a k-tuple of pairs per signal.
    """
    tuples = label_tuples(inst, scheme)
    if isinstance(inst, KnownInstance):
        return [t[0] for t in tuples]
    return tuples


def merge_equal_label_signals(inst: Instance, scheme: SignalingScheme) -> SignalingScheme:
    """Sum together signals that induce identical label tuples.

    Merging two signals whose (per-outcome) top and second bidders coincide
    adds their contributions exactly, so revenue is preserved whenever the
    labels are strict; the output is still column-stochastic.
    """
    keys = label_tuples(inst, scheme)
    groups: dict[tuple, int] = {}
    rows: list[np.ndarray] = []
    for key, row in zip(keys, scheme.phi):
        if key in groups:
            rows[groups[key]] = rows[groups[key]] + row
        else:
            groups[key] = len(rows)
            rows.append(row.copy())
    return SignalingScheme(s=len(rows), phi=np.array(rows))


def trivial_schemes(m: int) -> tuple[SignalingScheme, SignalingScheme]:
    """The two degenerate policies: reveal nothing, reveal everything."""
    if m < 1:
        raise ValidationError("m must be at least 1")
    no_reveal = SignalingScheme(s=1, phi=np.ones((1, m)))
    full_reveal = SignalingScheme(s=m, phi=np.eye(m))
    return no_reveal, full_reveal


@dataclass(frozen=True)
class SignalContribution:
    """Evaluation record for one signal: its revenue share and labels per outcome."""

    signal: int
    contribution: float
    labels: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class SchemeReport:
    revenue: float
    welfare: float
    per_signal: tuple[SignalContribution, ...]
    signal_count_after_merge: int
    lp_objective: float | None = None


def make_report(inst: Instance, scheme: SignalingScheme,
                lp_objective: float | None = None,
                signal_count_after_merge: int | None = None) -> SchemeReport:
    contribs = signal_contributions(inst, scheme)
    tuples = label_tuples(inst, scheme)
    per_signal = tuple(
        SignalContribution(signal=sigma, contribution=float(c), labels=t)
        for sigma, (c, t) in enumerate(zip(contribs, tuples)))
    count = scheme.s if signal_count_after_merge is None else signal_count_after_merge
    return SchemeReport(revenue=float(contribs.sum()), welfare=welfare(inst, scheme),
                        per_signal=per_signal, signal_count_after_merge=count,
                        lp_objective=lp_objective)


# ---------------------------------------------------------------------------
# JSON interchange.  Matrices are row-major: by bidder for instances, by
# signal for schemes.  Indices inside files are 1-based.

def instance_to_json(inst: Instance) -> dict:
    if isinstance(inst, KnownInstance):
        return {"type": "known", "n": inst.n, "m": inst.m,
                "p": inst.p.tolist(), "V": inst.V.tolist()}
    return {"type": "bayes", "n": inst.n, "m": inst.m, "k": inst.k,
            "p": inst.p.tolist(), "q": inst.q.tolist(),
            "Vs": inst.Vs.tolist()}


def instance_from_json(data: dict) -> Instance:
    if not isinstance(data, dict):
        raise ValidationError("instance JSON must be an object")
    kind = data.get("type")
    try:
        if kind == "known":
            return KnownInstance(n=int(data["n"]), m=int(data["m"]),
                                 p=data["p"], V=data["V"])
        if kind == "bayes":
            return BayesInstance(n=int(data["n"]), m=int(data["m"]), k=int(data["k"]),
                                 p=data["p"], q=data["q"], Vs=data["Vs"])
    except KeyError as exc:
        raise ValidationError(f"instance JSON missing field {exc}") from exc
    raise ValidationError(f"unknown instance type {kind!r}")


def scheme_to_json(scheme: SignalingScheme) -> dict:
    return {"s": scheme.s, "phi": scheme.phi.tolist()}


def scheme_from_json(data: dict) -> SignalingScheme:
    if not isinstance(data, dict):
        raise ValidationError("scheme JSON must be an object")
    if "phi" not in data:
        raise ValidationError("scheme JSON missing field 'phi'")
    phi = np.atleast_2d(np.array(data["phi"], dtype=float))
    s = int(data.get("s", phi.shape[0]))
    if s != phi.shape[0]:
        raise ValidationError(f"scheme declares s={s} but phi has {phi.shape[0]} rows")
    return SignalingScheme(s=s, phi=phi)
