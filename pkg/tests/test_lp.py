import numpy as np
import pytest

from auctionsignal import lp
from auctionsignal.errors import ValidationError


def problem(num_vars, objective, constraints):
    return lp.LpProblem(num_vars=num_vars, objective=np.array(objective, float),
                        constraints=tuple(
                            (np.array(a, float), rel, float(b))
                            for a, rel, b in constraints))


class TestSolveBasics:
    def test_single_upper_bound(self):
        sol = lp.solve(problem(1, [1], [([1], lp.LE, 3)]))
        assert sol.status == "optimal"
        assert sol.objective_value == pytest.approx(3.0, abs=1e-9)

    def test_conflicts_with_nonnegativity(self):
        sol = lp.solve(problem(1, [1], [([1], lp.LE, -1)]))
        assert sol.status == "infeasible"

    def test_simplex_edge(self):
        sol = lp.solve(problem(2, [1, 1], [([1, 1], lp.LE, 1)]))
        assert sol.status == "optimal"
        assert sol.objective_value == pytest.approx(1.0, abs=1e-9)

    def test_unbounded(self):
        sol = lp.solve(problem(2, [1, 0], [([0, 1], lp.LE, 1)]))
        assert sol.status == "unbounded"
        assert sol.x is None

    def test_equality_mix(self):
        sol = lp.solve(problem(2, [1, 1], [([1, 1], lp.EQ, 0.5),
                                           ([1, 0], lp.LE, 0.2)]))
        assert sol.objective_value == pytest.approx(0.5, abs=1e-9)

    def test_infeasible_equalities(self):
        sol = lp.solve(problem(2, [1, 0], [([1, 1], lp.EQ, 1.0),
                                           ([1, 1], lp.EQ, 2.0)]))
        assert sol.status == "infeasible"

    def test_ge_constraints(self):
        sol = lp.solve(problem(2, [-1, -1], [([1, 0], lp.GE, 0.25),
                                             ([0, 1], lp.GE, 0.75)]))
        assert sol.status == "optimal"
        assert sol.objective_value == pytest.approx(-1.0, abs=1e-9)
        assert np.allclose(sol.x, [0.25, 0.75], atol=1e-9)

    def test_malformed_problem(self):
        with pytest.raises(ValidationError):
            problem(2, [1], [])
        with pytest.raises(ValidationError):
            problem(1, [1], [([1], "<", 1)])


class TestDegenerate:
    def test_classic_cycling_instance_terminates(self):
        # A problem known to cycle under naive most-negative pricing.
        sol = lp.solve(problem(
            4, [0.75, -150, 0.02, -6],
            [([0.25, -60, -0.04, 9], lp.LE, 0),
             ([0.5, -90, -0.02, 3], lp.LE, 0),
             ([0, 0, 1, 0], lp.LE, 1)]))
        assert sol.status == "optimal"
        assert sol.objective_value == pytest.approx(0.05, abs=1e-9)

    def test_redundant_equalities(self):
        sol = lp.solve(problem(2, [1, 1], [([1, 1], lp.EQ, 1.0),
                                           ([2, 2], lp.EQ, 2.0)]))
        assert sol.status == "optimal"
        assert sol.objective_value == pytest.approx(1.0, abs=1e-9)


class TestDeterminismAndFeasibility:
    def test_identical_runs_identical_results(self):
        p = problem(3, [1, 2, 3], [([1, 1, 1], lp.LE, 1),
                                   ([1, 0, 0], lp.GE, 0.1)])
        a, b = lp.solve(p), lp.solve(p)
        assert a.objective_value == b.objective_value
        assert np.array_equal(a.x, b.x)

    @pytest.mark.parametrize("seed", range(10))
    def test_permuted_constraints_same_objective(self, seed):
        rng = np.random.default_rng(seed)
        rows = [(rng.uniform(-1, 1, 3), lp.LE, rng.uniform(0.2, 1.0)) for _ in range(6)]
        rows += [(np.ones(3), lp.LE, 2.0)]
        objective = rng.uniform(-1, 1, 3)
        base = lp.solve(problem(3, objective, rows))
        perm_rows = [rows[i] for i in rng.permutation(len(rows))]
        permuted = lp.solve(problem(3, objective, perm_rows))
        assert base.status == permuted.status
        if base.status == "optimal":
            assert base.objective_value == pytest.approx(
                permuted.objective_value, abs=1e-7)

    @pytest.mark.parametrize("seed", range(8))
    def test_residuals_small_on_solved_problems(self, seed):
        rng = np.random.default_rng(100 + seed)
        rows = [(rng.uniform(-1, 1, 4), lp.LE, rng.uniform(0.1, 1.0)) for _ in range(5)]
        rows += [(np.ones(4), lp.EQ, 1.0)]
        p = problem(4, rng.uniform(-1, 1, 4), rows)
        sol = lp.solve(p)
        if sol.status == "optimal":
            assert lp.residuals(p, sol.x).max() <= 1e-7
            assert (sol.x >= -1e-12).all()


def _vertex_oracle(objective, rows):
    """Exhaustive vertex enumeration for 2-variable problems (all rows <=)."""
    lines = [(np.array(a, float), float(b)) for a, b in rows]
    lines += [(np.array([-1.0, 0.0]), 0.0), (np.array([0.0, -1.0]), 0.0)]
    candidates = []
    for i in range(len(lines)):
        for j in range(i + 1, len(lines)):
            A = np.array([lines[i][0], lines[j][0]])
            b = np.array([lines[i][1], lines[j][1]])
            if abs(np.linalg.det(A)) < 1e-12:
                continue
            candidates.append(np.linalg.solve(A, b))
    feasible = [x for x in candidates
                if all(a @ x <= b + 1e-9 for a, b in lines)]
    if not feasible:
        return None
    return max(np.array(objective) @ x for x in feasible)


class TestAgainstVertexEnumeration:
    @pytest.mark.parametrize("seed", range(20))
    def test_random_bounded_2var(self, seed):
        rng = np.random.default_rng(200 + seed)
        rows = [(rng.uniform(-1, 1, 2), rng.uniform(-0.3, 1.0)) for _ in range(4)]
        rows += [(np.array([1.0, 0.0]), 2.0), (np.array([0.0, 1.0]), 2.0)]
        objective = rng.uniform(-1, 1, 2)
        sol = lp.solve(problem(2, objective, [(a, lp.LE, b) for a, b in rows]))
        expected = _vertex_oracle(objective, rows)
        if expected is None:
            assert sol.status == "infeasible"
        else:
            assert sol.status == "optimal"
            assert sol.objective_value == pytest.approx(expected, abs=1e-9)


class TestMaxMargin:
    def test_single_halfplane(self):
        t, x = lp.max_margin_point([[1.0, -1.0]], 2)
        assert t == pytest.approx(1.0, abs=1e-9)
        assert np.allclose(x, [1.0, 0.0], atol=1e-9)

    def test_forced_equality_has_zero_margin(self):
        t, _ = lp.max_margin_point([[1.0, -1.0], [-1.0, 1.0]], 2)
        assert t == pytest.approx(0.0, abs=1e-9)

    def test_empty_constraints_capped(self):
        t, x = lp.max_margin_point([], 2)
        assert t == pytest.approx(1.0, abs=1e-9)
        assert x.sum() == pytest.approx(1.0, abs=1e-9)

    def test_infeasible_side_negative_margin(self):
        t, _ = lp.max_margin_point([[-1.0, -1.0]], 2)
        assert t < -1e-6
