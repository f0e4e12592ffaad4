import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fbopt import (Box, BoxIndicator, CompositeProblem, ConfigError,
                   EvalCounters, L1Norm, LeastSquares, Quadratic, ZeroFunction,
                   counted_oracle, prox_box, prox_l1, weighted_sq_dist_to_box)


def brute_prox_1d(x, gl, lo=-10.0, hi=10.0, steps=2_000_001):
    """Independent oracle: grid minimization of gl|u| + (u - x)^2 / 2."""
    grid = np.linspace(lo, hi, steps)
    objective = gl * np.abs(grid) + 0.5 * (grid - x) ** 2
    return grid[np.argmin(objective)]


class TestProxL1:
    def test_zero_fixed_point(self):
        p, norm1 = prox_l1(np.array([0.0, 0.0]), 1.0)
        assert np.array_equal(p, [0.0, 0.0])
        assert norm1 == 0.0

    def test_componentwise_shrink(self):
        # frozen from the 1-d brute-force oracle, coordinate by coordinate
        x = np.array([3.0, -0.5, 0.0])
        for xi, expect in zip(x, [2.0, 0.0, 0.0]):
            assert brute_prox_1d(xi, 1.0) == pytest.approx(expect, abs=2e-5)
        p, _ = prox_l1(x, 1.0)
        np.testing.assert_array_equal(p, [2.0, 0.0, 0.0])

    def test_large_threshold_kills_everything(self):
        for xi in (-2.0, 2.0):
            assert brute_prox_1d(xi, 3.0) == pytest.approx(0.0, abs=2e-5)
        p, norm1 = prox_l1(np.array([-2.0, 2.0]), 3.0)
        np.testing.assert_array_equal(p, [0.0, 0.0])
        assert norm1 == 0.0


class TestProxBox:
    def test_clamp(self):
        p, g = prox_box(np.array([2.0, -3.0, 0.5]), -np.ones(3), np.ones(3))
        np.testing.assert_array_equal(p, [1.0, -1.0, 0.5])
        assert g == 0.0

    def test_interior_identity(self):
        x = np.array([0.3, -0.7])
        p, _ = prox_box(x, -np.ones(2), np.ones(2))
        np.testing.assert_array_equal(p, x)

    def test_nearest_corner(self):
        p, _ = prox_box(np.zeros(2), np.ones(2), 2 * np.ones(2))
        np.testing.assert_array_equal(p, [1.0, 1.0])

    def test_malformed_bounds(self):
        with pytest.raises(ConfigError):
            prox_box(np.zeros(2), np.array([1.0, 0.0]), np.array([0.0, 1.0]))
        with pytest.raises(ConfigError):
            Box(np.array([2.0]), np.array([1.0]))


class TestWeightedSqDist:
    def test_inside_is_zero(self):
        box = Box(-np.ones(2), np.ones(2))
        val, res = weighted_sq_dist_to_box(np.array([0.2, -0.9]), box, np.ones(2))
        assert val == 0.0
        np.testing.assert_array_equal(res, [0.0, 0.0])

    def test_hand_evaluation(self):
        # proj(2, -0.5) = (1, -0.5); residual (1, 0); value = 2 * 1 / 2 = 1.0
        box = Box(-np.ones(2), np.ones(2))
        val, res = weighted_sq_dist_to_box(np.array([2.0, -0.5]), box,
                                           np.array([2.0, 1.0]))
        assert val == pytest.approx(1.0)
        np.testing.assert_array_equal(res, [1.0, 0.0])

    def test_linear_in_weights(self):
        box = Box(-np.ones(3), np.ones(3))
        v = np.array([2.0, -3.0, 0.5])
        sigma = np.array([1.0, 2.0, 3.0])
        v1, r1 = weighted_sq_dist_to_box(v, box, sigma)
        v2, r2 = weighted_sq_dist_to_box(v, box, 2 * sigma)
        assert v2 == pytest.approx(2 * v1)
        np.testing.assert_array_equal(r1, r2)

    def test_rejects_bad_weights(self):
        box = Box(-np.ones(2), np.ones(2))
        with pytest.raises(ConfigError):
            weighted_sq_dist_to_box(np.zeros(2), box, np.array([1.0, 0.0]))


class TestIndicator:
    def test_value_zero_at_prox_outputs(self):
        g = BoxIndicator.from_bounds(-1.0, 1.0, dim=3)
        p, val = g.prox(np.array([5.0, -5.0, 0.0]), 0.7)
        assert val == 0.0
        assert g.g(p) == 0.0

    def test_infeasible_point_is_infinite(self):
        g = BoxIndicator.from_bounds(-1.0, 1.0, dim=2)
        assert g.g(np.array([1.5, 0.0])) == np.inf
        # tiny rounding violations stay feasible
        assert g.g(np.array([1.0 + 1e-13, 0.0])) == 0.0

    def test_infinity_propagates_in_objective(self):
        problem = CompositeProblem(
            Quadratic(np.eye(2), np.zeros(2)), BoxIndicator.from_bounds(-1, 1, dim=2))
        assert problem.phi(np.array([3.0, 0.0])) == np.inf
        assert np.isfinite(problem.phi(np.array([0.5, 0.5])))


class TestCounting:
    def make(self):
        counters = EvalCounters()
        inner = CompositeProblem(LeastSquares(np.eye(3), np.zeros(3)), L1Norm(0.5, 3))
        return inner, counted_oracle(inner, counters), counters

    def test_f_increments_once(self):
        _, prob, counters = self.make()
        prob.smooth.f(np.ones(3))
        assert counters.n_f == 1 and counters.n_grad == 0

    def test_prox_increments_prox_and_g(self):
        _, prob, counters = self.make()
        prob.proximable.prox(np.ones(3), 0.5)
        assert counters.n_prox == 1 and counters.n_g == 1

    def test_passthrough_bitwise(self, rng):
        inner, prob, _ = self.make()
        x = rng.standard_normal(3)
        assert np.array_equal(prob.smooth.grad(x), inner.smooth.grad(x))
        assert prob.smooth.f(x) == inner.smooth.f(x)
        p1, g1 = prob.proximable.prox(x, 0.3)
        p2, g2 = inner.proximable.prox(x, 0.3)
        assert np.array_equal(p1, p2) and g1 == g2

    def test_matvec_tally(self, rng):
        _, prob, counters = self.make()
        x = rng.standard_normal(3)
        prob.smooth.f(x)
        prob.smooth.grad(x)
        assert counters.n_matvec == 1 + 2  # least squares: one product for f, two for grad

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ConfigError):
            CompositeProblem(LeastSquares(np.eye(3), np.zeros(3)), L1Norm(0.5, 4))


CATALOG = [
    lambda: ZeroFunction(4),
    lambda: L1Norm(0.7, 4),
    lambda: BoxIndicator.from_bounds(-0.5, 1.5, dim=4),
]


@pytest.mark.parametrize("make_g", CATALOG)
def test_prox_first_order_optimality_sampling(make_g, rng):
    """The prox objective at the output beats 200 random nearby perturbations."""
    g = make_g()
    for _ in range(5):
        x = 2.0 * rng.standard_normal(4)
        gamma = float(rng.uniform(0.05, 2.0))
        p, g_at_p = g.prox(x, gamma)
        assert g_at_p == g.g(p)
        base = g_at_p + np.dot(p - x, p - x) / (2 * gamma)
        for _ in range(200):
            delta = rng.standard_normal(4)
            delta *= rng.uniform(0, 0.1) / np.linalg.norm(delta)
            q = p + delta
            val = g.g(q) + np.dot(q - x, q - x) / (2 * gamma)
            assert val >= base - 1e-12


@settings(max_examples=60, deadline=None)
@given(
    x1=st.lists(st.floats(-10, 10), min_size=4, max_size=4),
    x2=st.lists(st.floats(-10, 10), min_size=4, max_size=4),
    gamma=st.floats(0.01, 5.0),
)
def test_firm_nonexpansiveness(x1, x2, gamma):
    """||p1 - p2||^2 <= <p1 - p2, x1 - x2> for the box and l1 proxes."""
    x1 = np.asarray(x1)
    x2 = np.asarray(x2)
    for g in (BoxIndicator.from_bounds(-1.0, 2.0, dim=4), L1Norm(0.8, 4)):
        p1, _ = g.prox(x1, gamma)
        p2, _ = g.prox(x2, gamma)
        lhs = float(np.dot(p1 - p2, p1 - p2))
        rhs = float(np.dot(p1 - p2, x1 - x2))
        assert lhs <= rhs + 1e-10
        assert np.linalg.norm(p1 - p2) <= np.linalg.norm(x1 - x2) + 1e-10
