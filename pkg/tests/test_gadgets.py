from itertools import combinations

import numpy as np
import pytest

from auctionsignal.errors import GuardExceededError, ValidationError
from auctionsignal.gadgets import (GraphSpec, cut_to_scheme, default_gadget_weights,
                                   gap_optimal_scheme, gen_gap, gen_identity,
                                   gen_many_signals, gen_maxcut, maxcut_bruteforce,
                                   random_instance, random_scheme, random_search)
from auctionsignal.model import (BayesInstance, KnownInstance, revenue,
                                 optimal_welfare_star, trivial_schemes,
                                 validate_scheme)
from auctionsignal.solver_known import solve_optimal


def triangle():
    return GraphSpec(vertices=("a", "b", "c"),
                     edges=(("a", "b"), ("b", "c"), ("a", "c")), x="a", y="b")


def path3():
    return GraphSpec(vertices=("a", "b", "c"), edges=(("a", "b"), ("b", "c")),
                     x="a", y="c")


def single_edge():
    return GraphSpec(vertices=("x", "y"), edges=(("x", "y"),), x="x", y="y")


def four_cycle():
    return GraphSpec(vertices=("a", "b", "c", "d"),
                     edges=(("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")),
                     x="a", y="b")


def separating_cuts(graph):
    others = [v for v in graph.vertices if v not in (graph.x, graph.y)]
    for r in range(len(others) + 1):
        for extra in combinations(others, r):
            yield {graph.x, *extra}


class TestGenerators:
    def test_identity_values(self):
        inst = gen_identity(4)
        no_reveal, full_reveal = trivial_schemes(4)
        assert revenue(inst, no_reveal) == pytest.approx(0.25, abs=1e-12)
        assert revenue(inst, full_reveal) == 0.0

    def test_identity_minimum_size(self):
        with pytest.raises(ValidationError):
            gen_identity(1)

    def test_many_signals_layout(self):
        inst = gen_many_signals(3)
        assert (inst.n, inst.m) == (3, 6)
        assert np.isclose(inst.V.sum(axis=0), 1.5).all()
        assert sorted(set(inst.V.flatten())) == [0.0, 0.5, 1.0]

    def test_many_signals_no_reveal_bids(self):
        inst = gen_many_signals(2)
        no_reveal, _ = trivial_schemes(2)
        assert revenue(inst, no_reveal) == pytest.approx(0.75, abs=1e-12)

    def test_gap_shape_and_welfare(self):
        inst = gen_gap(2)
        assert (inst.n, inst.m) == (3, 3)
        assert inst.V[0, 0] == 2.0
        assert optimal_welfare_star(inst) == pytest.approx(4 / 3, abs=1e-12)

    def test_gap_optimal_scheme_value(self):
        inst = gen_gap(4)
        assert revenue(inst, gap_optimal_scheme(4)) == pytest.approx(0.8, abs=1e-12)


class TestGraphSpec:
    def test_self_loop_rejected(self):
        with pytest.raises(ValidationError):
            GraphSpec(vertices=("a", "b"), edges=(("a", "a"),), x="a", y="b")

    def test_duplicate_edge_rejected(self):
        with pytest.raises(ValidationError):
            GraphSpec(vertices=("a", "b"), edges=(("a", "b"), ("b", "a")),
                      x="a", y="b")

    def test_equal_terminals_rejected(self):
        with pytest.raises(ValidationError):
            GraphSpec(vertices=("a", "b"), edges=(("a", "b"),), x="a", y="a")

    def test_unknown_vertex_rejected(self):
        with pytest.raises(ValidationError):
            GraphSpec(vertices=("a", "b"), edges=(("a", "z"),), x="a", y="b")

    def test_json_roundtrip(self):
        graph = triangle()
        assert GraphSpec.from_json(graph.to_json()) == graph

    def test_cut_size(self):
        assert four_cycle().cut_size({"a", "c"}) == 4


class TestMaxcutGadget:
    def test_triangle_dimensions(self):
        inst, meta = gen_maxcut(triangle(), 1e5, 1e2)
        assert (inst.n, inst.m, inst.k) == (3, 3, 6)
        assert meta["base_revenue"] == 2 * 1e5 + 1 * 1e2 + 3

    def test_table_entries_factor_back(self):
        inst, meta = gen_maxcut(triangle(), 1e5, 1e2)
        weighted = inst.q[:, None, None] * inst.p[None, None, :] * inst.Vs
        # anchor outcome: K1 on terminals for bidders 1 and 3
        xj, yj = 0, 1
        assert weighted[0, 0, xj] == pytest.approx(1e5, rel=1e-12)
        assert weighted[0, 2, yj] == pytest.approx(1e5, rel=1e-12)
        assert weighted[0, 1, xj] == 0.0
        # vertex outcome for ('x', 'c'): K2 pattern
        tag = ("vertex", "a", "c")
        ell = meta["outcomes"].index(tag)
        assert weighted[ell, 0, xj] == pytest.approx(1e2, rel=1e-12)
        assert weighted[ell, 1, 2] == pytest.approx(1e2, rel=1e-12)
        # edge outcome for (b, c): unit pattern including bidder 3
        ell = meta["outcomes"].index(("edge", "b", "c"))
        assert weighted[ell, 0, 1] == pytest.approx(1.0, rel=1e-12)
        assert weighted[ell, 2, 2] == pytest.approx(1.0, rel=1e-12)

    def test_weights_must_be_ordered(self):
        with pytest.raises(ValidationError):
            gen_maxcut(triangle(), 10.0, 10.0)

    @pytest.mark.parametrize("graph,k1,k2", [
        (triangle(), 1e5, 1e2),
        (path3(), 1e4, 1e2),
        (single_edge(), 50.0, 5.0),
        (four_cycle(), 1e5, 1e2),
    ])
    def test_cut_revenue_identity_all_cuts(self, graph, k1, k2):
        inst, meta = gen_maxcut(graph, k1, k2)
        for cut in separating_cuts(graph):
            cut_scheme = cut_to_scheme(graph, cut)
            value = revenue(inst, cut_scheme.scheme)
            expected = meta["base_revenue"] + graph.cut_size(cut)
            assert value == pytest.approx(expected, rel=1e-12)

    def test_path_cut_value_example(self):
        graph = path3()
        inst, meta = gen_maxcut(graph, 1e4, 1e2)
        value = revenue(inst, cut_to_scheme(graph, {"a", "b"}).scheme)
        assert value == pytest.approx(2 * 1e4 + 1e2 + 2 + 1, rel=1e-12)

    def test_default_weights_ordering(self):
        k1, k2 = default_gadget_weights(four_cycle())
        assert k1 > k2 > 1


class TestCutToScheme:
    def test_triangle_indicator_rows(self):
        cut_scheme = cut_to_scheme(triangle(), {"a", "c"})
        assert np.array_equal(cut_scheme.scheme.phi, [[1, 0, 1], [0, 1, 0]])

    def test_structural_invariants(self):
        graph = four_cycle()
        for cut in separating_cuts(graph):
            cs = cut_to_scheme(graph, cut)
            total = sum(weight for _, weight in cs.subsets)
            assert total == pytest.approx(2.0)
            for j, v in enumerate(graph.vertices):
                mass = sum(w for subset, w in cs.subsets if v in subset)
                assert mass == pytest.approx(1.0)
            assert validate_scheme(cs.scheme, len(graph.vertices)) == []

    def test_both_terminals_rejected(self):
        with pytest.raises(ValidationError):
            cut_to_scheme(triangle(), {"a", "b"})

    def test_unknown_vertex_rejected(self):
        with pytest.raises(ValidationError):
            cut_to_scheme(triangle(), {"a", "zz"})


class TestMaxcutBruteforce:
    def test_triangle(self):
        size, cut = maxcut_bruteforce(triangle())
        assert size == 2
        assert len(cut & {"a", "b"}) == 1

    def test_single_edge(self):
        assert maxcut_bruteforce(single_edge())[0] == 1

    def test_four_cycle_adjacent_terminals(self):
        size, cut = maxcut_bruteforce(four_cycle())
        assert size == 4
        assert cut == {"a", "c"}

    def test_guard(self):
        vertices = tuple(f"v{i}" for i in range(25))
        graph = GraphSpec(vertices=vertices, edges=(("v0", "v1"),),
                          x="v0", y="v1")
        with pytest.raises(GuardExceededError):
            maxcut_bruteforce(graph)


class TestRandomInstances:
    def test_same_seed_identical(self):
        a = random_instance(42, n=3, m=4)
        b = random_instance(42, n=3, m=4)
        assert np.array_equal(a.V, b.V) and np.array_equal(a.p, b.p)

    def test_known_invariants(self):
        inst = random_instance(1, n=2, m=2)
        assert isinstance(inst, KnownInstance)
        assert inst.p.sum() == pytest.approx(1.0)

    def test_bayes_invariants(self):
        inst = random_instance(1, n=2, m=2, k=2)
        assert isinstance(inst, BayesInstance)
        assert inst.q.sum() == pytest.approx(1.0)
        assert inst.Vs.shape == (2, 2, 2)

    def test_random_probs_flag(self):
        inst = random_instance(3, n=2, m=5, random_probs=True)
        assert inst.p.sum() == pytest.approx(1.0)
        assert len(set(np.round(inst.p, 12))) > 1


class TestRandomSearch:
    def test_single_signal_on_gap_hits_cap(self):
        inst = gen_gap(2)
        _, value = random_search(inst, s=1, iters=50, seed=0)
        assert value == pytest.approx(1 / 3, abs=1e-9)

    def test_never_beats_certified_optimum(self):
        for seed in range(5):
            inst = random_instance(900 + seed, n=3, m=3)
            _, lp_report = solve_optimal(inst)
            _, found = random_search(inst, s=3, iters=200, seed=seed)
            assert found <= lp_report.lp_objective + 1e-9

    def test_zero_iterations_still_valid(self):
        inst = gen_identity(4)
        scheme, value = random_search(inst, s=2, iters=0, seed=5)
        assert validate_scheme(scheme, 4) == []
        assert value == pytest.approx(revenue(inst, scheme), abs=1e-12)

    def test_identity_pairing_found_with_budget(self):
        inst = gen_identity(4)
        _, value = random_search(inst, s=2, iters=4000, seed=11)
        assert value >= 0.4  # approaches the 0.5 optimum from below
