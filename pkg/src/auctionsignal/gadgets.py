"""Instance generators, the MAX-CUT hardness gadget, and brute-force oracles.

The generators reproduce the worked families used throughout the test suite:
the identity market (each bidder wants its own good), the ordered-pair market
that needs one signal per unordered bidder pair, and the gap family on which
randomized signaling collects exactly twice the best clustering revenue.

The MAX-CUT gadget builds a 3-bidder Bayesian instance from a graph with two
terminals x, y.  Outcome-weighted normalized valuations follow the fixed
table pattern: one anchor outcome paying K1 on {x, y}, two K2 outcomes per
non-terminal vertex (paired with x and with y), and a unit outcome per edge.
Any terminal-separating vertex set U induces a two-signal indicator scheme
whose revenue is 2*K1 + (|V|-2)*K2 + |E| + |cut edges of U|, so maximizing
revenue maximizes the cut.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import GuardExceededError, ValidationError
from .model import (BayesInstance, KnownInstance, SignalingScheme,
                    signal_contributions)

DEFAULT_CUT_GUARD = 20


@dataclass(frozen=True)
class GraphSpec:
    """Simple undirected graph with two distinguished terminal vertices."""

    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]
    x: str
    y: str

    def __post_init__(self):
        vertices = tuple(str(v) for v in self.vertices)
        if len(set(vertices)) != len(vertices):
            raise ValidationError("duplicate vertex names")
        edges = tuple((str(u), str(v)) for u, v in self.edges)
        seen = set()
        for u, v in edges:
            if u == v:
                raise ValidationError(f"self-loop at {u!r}")
            if u not in vertices or v not in vertices:
                raise ValidationError(f"edge ({u!r}, {v!r}) uses unknown vertex")
            key = frozenset((u, v))
            if key in seen:
                raise ValidationError(f"duplicate edge ({u!r}, {v!r})")
            seen.add(key)
        if self.x == self.y:
            raise ValidationError("terminals x and y must differ")
        if self.x not in vertices or self.y not in vertices:
            raise ValidationError("terminals must be graph vertices")
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "edges", edges)

    def to_json(self) -> dict:
        return {"vertices": list(self.vertices),
                "edges": [list(e) for e in self.edges],
                "x": self.x, "y": self.y}

    @classmethod
    def from_json(cls, data: dict) -> "GraphSpec":
        try:
            return cls(vertices=tuple(data["vertices"]),
                       edges=tuple(tuple(e) for e in data["edges"]),
                       x=data["x"], y=data["y"])
        except KeyError as exc:
            raise ValidationError(f"graph JSON missing field {exc}") from exc

    def cut_size(self, subset: set[str]) -> int:
        return sum(1 for u, v in self.edges if (u in subset) != (v in subset))


@dataclass(frozen=True)
class CutScheme:
    """Two-signal indicator scheme induced by a terminal-separating vertex set."""

    subsets: tuple[tuple[frozenset[str], float], ...]
    scheme: SignalingScheme


def gen_identity(m: int) -> KnownInstance:
    """m bidders, m equally likely goods, each bidder values only its own good."""
    if m < 2:
        raise ValidationError("identity market needs m >= 2")
    return KnownInstance(n=m, m=m, p=np.full(m, 1.0 / m), V=np.eye(m))


def gen_many_signals(n: int) -> KnownInstance:
    """One good per ordered bidder pair (i, i'): worth 1 to i and 1/2 to i'."""
    if n < 2:
        raise ValidationError("pair market needs n >= 2")
    items = [(i1, i2) for i1 in range(n) for i2 in range(n) if i1 != i2]
    m = len(items)
    V = np.zeros((n, m))
    for j, (i1, i2) in enumerate(items):
        V[i1, j] = 1.0
        V[i2, j] = 0.5
    return KnownInstance(n=n, m=m, p=np.full(m, 1.0 / m), V=V)


def gen_gap(n: int) -> KnownInstance:
    """n + 1 goods and bidders: bidder 0 values good 0 at n, bidder i good i at 1."""
    if n < 2:
        raise ValidationError("gap family needs n >= 2")
    size = n + 1
    V = np.zeros((size, size))
    V[0, 0] = float(n)
    for i in range(1, size):
        V[i, i] = 1.0
    return KnownInstance(n=size, m=size, p=np.full(size, 1.0 / size), V=V)


def gap_optimal_scheme(n: int) -> SignalingScheme:
    """The n-signal optimum for the gap family: good i fully, good 0 at 1/n."""
    phi = np.zeros((n, n + 1))
    for i in range(n):
        phi[i, 0] = 1.0 / n
        phi[i, i + 1] = 1.0
    return SignalingScheme(s=n, phi=phi)


def default_gadget_weights(graph: GraphSpec) -> tuple[int, int]:
    """K1 >> K2 >> 1 defaults scaled to drown the unit edge terms."""
    k2 = 100 * max(len(graph.edges), 1)
    return 100 * len(graph.vertices) * k2, k2


def gen_maxcut(graph: GraphSpec, K1: float, K2: float
               ) -> tuple[BayesInstance, dict]:
    """Bayesian gadget instance for the graph; metadata maps outcomes back."""
    if not K1 > K2 > 1:
        raise ValidationError("weights must satisfy K1 > K2 > 1")
    vertices = list(graph.vertices)
    index = {v: j for j, v in enumerate(vertices)}
    others = [v for v in vertices if v not in (graph.x, graph.y)]
    n_vertices, n_edges = len(vertices), len(graph.edges)
    m = n_vertices
    k = 2 * n_vertices + n_edges - 3
    xj, yj = index[graph.x], index[graph.y]

    outcome_tags: list[tuple] = []
    weighted = np.zeros((k, 3, m))
    weighted[0, 0, xj] = K1
    weighted[0, 1, yj] = K1
    weighted[0, 2, xj] = K1
    weighted[0, 2, yj] = K1
    outcome_tags.append(("anchor",))
    ell = 1
    for terminal, tj in ((graph.x, xj), (graph.y, yj)):
        for u in others:
            weighted[ell, 0, tj] = K2
            weighted[ell, 1, index[u]] = K2
            outcome_tags.append(("vertex", terminal, u))
            ell += 1
    for u, v in graph.edges:
        weighted[ell, 0, index[u]] = 1.0
        weighted[ell, 1, index[v]] = 1.0
        weighted[ell, 2, index[u]] = 1.0
        weighted[ell, 2, index[v]] = 1.0
        outcome_tags.append(("edge", u, v))
        ell += 1

    # Factor the outcome-weighted values into uniform p, q and plain matrices:
    # q(l) * p(j) * V_l(i, j) reproduces the table entries.
    inst = BayesInstance(n=3, m=m, k=k, p=np.full(m, 1.0 / m),
                         q=np.full(k, 1.0 / k), Vs=weighted * (k * m))
    metadata = {
        "items": vertices,
        "outcomes": outcome_tags,
        "K1": K1,
        "K2": K2,
        "n_vertices": n_vertices,
        "n_edges": n_edges,
        "base_revenue": 2 * K1 + (n_vertices - 2) * K2 + n_edges,
    }
    return inst, metadata


def cut_to_scheme(graph: GraphSpec, cut: set[str]) -> CutScheme:
    """Indicator scheme of a vertex set containing exactly one terminal."""
    cut = set(cut)
    unknown = cut - set(graph.vertices)
    if unknown:
        raise ValidationError(f"cut contains unknown vertices {sorted(unknown)}")
    if len(cut & {graph.x, graph.y}) != 1:
        raise ValidationError("cut must contain exactly one of the terminals")
    phi = np.zeros((2, len(graph.vertices)))
    for j, v in enumerate(graph.vertices):
        phi[0 if v in cut else 1, j] = 1.0
    complement = frozenset(graph.vertices) - cut
    return CutScheme(subsets=((frozenset(cut), 1.0), (complement, 1.0)),
                     scheme=SignalingScheme(s=2, phi=phi))


def maxcut_bruteforce(graph: GraphSpec, guard: int = DEFAULT_CUT_GUARD
                      ) -> tuple[int, set[str]]:
    """Exact best terminal-separating cut by subset enumeration."""
    if len(graph.vertices) > guard:
        raise GuardExceededError(
            f"graph has {len(graph.vertices)} vertices, guard is {guard}")
    others = [v for v in graph.vertices if v not in (graph.x, graph.y)]
    best_size, best_cut = -1, {graph.x}
    for r in range(len(others) + 1):
        for extra in combinations(others, r):
            subset = {graph.x, *extra}
            size = graph.cut_size(subset)
            if size > best_size:
                best_size, best_cut = size, subset
    return best_size, best_cut


def random_instance(seed: int, n: int, m: int, k: int | None = None,
                    value_range: tuple[float, float] = (0.0, 1.0),
                    random_probs: bool = False):
    """Seeded random instance; known when k is None, Bayesian otherwise."""
    if n < 2 or m < 1 or (k is not None and k < 1):
        raise ValidationError("dimensions below minimum")
    rng = np.random.default_rng(seed)

    def probs(length: int) -> np.ndarray:
        if not random_probs:
            return np.full(length, 1.0 / length)
        raw = rng.uniform(0.1, 1.0, length)
        return raw / raw.sum()

    lo, hi = value_range
    p = probs(m)
    if k is None:
        return KnownInstance(n=n, m=m, p=p, V=rng.uniform(lo, hi, (n, m)))
    return BayesInstance(n=n, m=m, k=k, p=p, q=probs(k),
                         Vs=rng.uniform(lo, hi, (k, n, m)))


def random_scheme(seed: int, s: int, m: int) -> SignalingScheme:
    """Seeded random column-stochastic scheme."""
    rng = np.random.default_rng(seed)
    raw = rng.uniform(0.05, 1.0, (s, m))
    return SignalingScheme(s=s, phi=raw / raw.sum(axis=0, keepdims=True))


def random_search(inst, s: int, iters: int, seed: int
                  ) -> tuple[SignalingScheme, float]:
    """Hill-climbing lower bound: perturb a random s-signal scheme, keep wins."""
    if s < 1:
        raise ValidationError("signal budget must be at least 1")
    rng = np.random.default_rng(seed)
    raw = rng.uniform(0.05, 1.0, (s, inst.m))
    phi = raw / raw.sum(axis=0, keepdims=True)
    best = SignalingScheme(s=s, phi=phi)
    best_value = float(signal_contributions(inst, best).sum())
    if s < 2:
        return best, best_value
    for _ in range(iters):
        candidate = best.phi.copy()
        j = int(rng.integers(inst.m))
        a, b = rng.choice(s, size=2, replace=False)
        delta = rng.uniform(0.0, candidate[a, j])
        candidate[a, j] -= delta
        candidate[b, j] += delta
        trial = SignalingScheme(s=s, phi=candidate)
        value = float(signal_contributions(inst, trial).sum())
        if value > best_value:
            best, best_value = trial, value
    return best, best_value
