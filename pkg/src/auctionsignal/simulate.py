"""Monte Carlo validation of the closed-form revenue and of truthful bidding.

Sampling covers only the (outcome, good, signal) draw; the bids themselves
are the exact posterior expectations, which is what truthful bidders submit.
The deviation check is likewise analytic per signal: it perturbs one bidder's
bid against fixed truthful opponents and reports the best utility gain found,
which second-price logic keeps at zero up to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ValidationError
from .model import Instance, SignalingScheme, outcome_stack, require_valid_scheme


@dataclass(frozen=True)
class SimReport:
    estimate: float
    stderr: float
    samples: int
    seed: int

    def to_json(self) -> dict:
        return {"estimate": self.estimate, "stderr": self.stderr,
                "samples": self.samples, "seed": self.seed}


def _inverse_cdf(cum: np.ndarray, draws: np.ndarray) -> np.ndarray:
    idx = np.searchsorted(cum, draws, side="right")
    return np.minimum(idx, len(cum) - 1)


def _p_vector(inst: Instance) -> np.ndarray:
    return inst.p


def _payment_table(inst: Instance, scheme: SignalingScheme
                   ) -> tuple[np.ndarray, np.ndarray]:
    """Per-(outcome, signal) second-highest posterior bid, and Pr(signal).

    Signals that are never emitted get payment zero; they cannot be drawn.
    """
    q, psi = outcome_stack(inst)
    emit = scheme.phi @ _p_vector(inst)  # Pr(signal)
    payments = np.zeros((len(q), scheme.s))
    for ell, psil in enumerate(psi):
        mass = scheme.phi @ psil.T  # (s, n): Pr(sigma) * posterior bids
        second = np.partition(mass, -2, axis=1)[:, -2]
        with np.errstate(divide="ignore", invalid="ignore"):
            payments[ell] = np.where(emit > 0.0, second / emit, 0.0)
    return payments, emit


def simulate_revenue(inst: Instance, scheme: SignalingScheme,
                     samples: int, seed: int) -> SimReport:
    """Estimate expected revenue by simulating the auction end to end.

    Each sample draws the valuation outcome, the good, and the emitted
    signal, lets every bidder submit its posterior expected value, and
    records the second-highest bid.
    """
    if samples < 1:
        raise ValidationError("need at least one sample")
    require_valid_scheme(scheme, inst.m)
    q, _ = outcome_stack(inst)
    p = _p_vector(inst)
    payments, _ = _payment_table(inst, scheme)

    rng = np.random.default_rng(seed)
    ell = _inverse_cdf(np.cumsum(q), rng.random(samples))
    goods = _inverse_cdf(np.cumsum(p), rng.random(samples))
    u_signal = rng.random(samples)
    col_cum = np.cumsum(scheme.phi, axis=0)  # (s, m)
    sigma = (u_signal[:, None] < col_cum[:, goods].T).argmax(axis=1)

    values = payments[ell, sigma]
    estimate = float(values.mean())
    stderr = float(values.std(ddof=1) / np.sqrt(samples)) if samples > 1 else 0.0
    return SimReport(estimate=estimate, stderr=stderr, samples=samples, seed=seed)


def _second_price_outcome(bids: np.ndarray, bidder: int, bid: float
                          ) -> tuple[bool, float]:
    """Whether `bidder` wins with `bid` against the others, and the price paid."""
    other_idx = np.delete(np.arange(len(bids)), bidder)
    others = bids[other_idx]
    opp_max = float(others.max())
    # Lowest-index highest bidder wins overall.
    opp_lowest = int(other_idx[others == opp_max].min())
    wins = bid > opp_max or (bid == opp_max and bidder < opp_lowest)
    return wins, opp_max


def truthfulness_check(inst: Instance, scheme: SignalingScheme,
                       deviation_grid: Sequence[float], seed: int = 0) -> float:
    """Best utility gain any bidder can get by deviating from its truthful bid.

    The grid entries are multiplicative factors on the truthful bid; on top of
    the grid, one seeded adversarial overbid above the strongest opponent is
    probed per (outcome, signal, bidder).  Opponents always bid truthfully.
    Under the second-price rule the returned gain is non-positive up to
    floating-point noise.
    """
    require_valid_scheme(scheme, inst.m)
    q, psi = outcome_stack(inst)
    p = _p_vector(inst)
    emit = scheme.phi @ p
    rng = np.random.default_rng(seed)
    max_gain = -np.inf
    for ell in range(len(q)):
        posterior_mass = scheme.phi @ psi[ell].T
        for sigma in range(scheme.s):
            if emit[sigma] <= 0.0:
                continue  # never emitted
            bids = posterior_mass[sigma] / emit[sigma]
            for i in range(inst.n):
                value = float(bids[i])
                wins, price = _second_price_outcome(bids, i, value)
                truthful_utility = (value - price) if wins else 0.0
                probes = [factor * value for factor in deviation_grid]
                probes.append(price + 1.0 + float(rng.uniform(0.0, 1.0)))
                for bid in probes:
                    dev_wins, dev_price = _second_price_outcome(bids, i, bid)
                    utility = (value - dev_price) if dev_wins else 0.0
                    max_gain = max(max_gain, utility - truthful_utility)
    return float(max_gain)
