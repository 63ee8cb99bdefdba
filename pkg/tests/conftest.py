"""Shared helpers: independent plain-Python oracles used to cross-check
the vectorized evaluation paths.  These deliberately avoid the library's
numpy pipeline (sorted() instead of partition, explicit loops)."""

from __future__ import annotations

from auctionsignal.model import BayesInstance, KnownInstance


def _outcomes(inst):
    if isinstance(inst, KnownInstance):
        return [(1.0, inst.V)]
    return [(float(q), inst.Vs[ell]) for ell, q in enumerate(inst.q)]


def naive_revenue(inst, scheme) -> float:
    """Second-price revenue by direct summation and sorting."""
    total = 0.0
    for q, V in _outcomes(inst):
        for sigma in range(scheme.s):
            bids = []
            for i in range(inst.n):
                bid = 0.0
                for j in range(inst.m):
                    bid += float(scheme.phi[sigma, j]) * float(inst.p[j]) * float(V[i][j])
                bids.append(bid)
            bids.sort(reverse=True)
            total += q * bids[1]
    return total


def naive_welfare(inst, scheme) -> float:
    total = 0.0
    for q, V in _outcomes(inst):
        for sigma in range(scheme.s):
            bids = []
            for i in range(inst.n):
                bid = 0.0
                for j in range(inst.m):
                    bid += float(scheme.phi[sigma, j]) * float(inst.p[j]) * float(V[i][j])
                bids.append(bid)
            total += q * max(bids)
    return total
