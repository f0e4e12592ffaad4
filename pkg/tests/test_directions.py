import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fbopt import (BoxIndicator, CompositeProblem, FbParams, LbfgsBuffer,
                   LbfgsDirections, Quadratic, SolveParams, StructuredNewtonBox,
                   ZeroDirections, ZeroFunction, lbfgs_direction, lbfgs_push,
                   normal_residual_jacobian_fd, panoc_plus_solve, pg_step,
                   structured_newton_box)
from fbopt.oracles import Box, SmoothFunction
from fbopt.problems import make_box_qp


class TestLbfgsBuffer:
    def test_accepts_positive_curvature(self):
        buf = LbfgsBuffer(capacity=4)
        assert lbfgs_push(buf, np.array([1.0, 0.0]), np.array([2.0, 0.0]))
        assert len(buf) == 1

    def test_rejects_negative_curvature(self):
        buf = LbfgsBuffer(capacity=4)
        assert not lbfgs_push(buf, np.array([1.0, 0.0]), np.array([-1.0, 0.0]))
        assert len(buf) == 0

    def test_ring_eviction(self):
        buf = LbfgsBuffer(capacity=2)
        for k in range(3):
            s = np.zeros(3)
            s[k] = 1.0
            assert buf.push(s, 2.0 * s)
        assert len(buf) == 2
        # the first pair is gone: only coordinates 1 and 2 carry pair scaling
        assert np.array_equal(buf._s[0], [0.0, 1.0, 0.0])

    def test_dimension_mismatch(self):
        buf = LbfgsBuffer(capacity=2)
        with pytest.raises(ValueError):
            buf.push(np.ones(2), np.ones(3))

    def test_empty_buffer_is_negative_identity(self):
        buf = LbfgsBuffer(capacity=3)
        np.testing.assert_array_equal(lbfgs_direction(buf, np.array([3.0, -1.0])),
                                      [-3.0, 1.0])

    def test_single_pair_secant_by_hand(self):
        # two-loop by hand: alpha=1, q -> 0, seed 0.5, result (1, 0)
        buf = LbfgsBuffer(capacity=3)
        buf.push(np.array([1.0, 0.0]), np.array([2.0, 0.0]))
        d = buf.direction(np.array([2.0, 0.0]))
        np.testing.assert_allclose(d, [-1.0, 0.0])

    def test_orthogonal_complement_gets_seed_scaling(self):
        buf = LbfgsBuffer(capacity=3)
        buf.push(np.array([1.0, 0.0]), np.array([2.0, 0.0]))  # seed 2/4 = 0.5
        d = buf.direction(np.array([0.0, 3.0]))
        np.testing.assert_allclose(d, [0.0, -1.5])

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(-5, 5), min_size=3, max_size=3),
           st.lists(st.floats(-5, 5), min_size=3, max_size=3))
    def test_secant_identity(self, s, y):
        s = np.asarray(s)
        y = np.asarray(y)
        buf = LbfgsBuffer(capacity=5)
        if not buf.push(s, y):
            return
        d = buf.direction(-y)
        np.testing.assert_allclose(d, s, rtol=1e-12, atol=1e-12)


class TestProviders:
    def test_zero_direction(self):
        prov = ZeroDirections()
        r = np.array([1.0, -2.0, 3.0])
        d = prov.direction(r)
        assert np.array_equal(d, np.zeros(3)) and d.shape == r.shape

    def test_cap_limits_magnitude(self):
        prov = LbfgsDirections(memory=2, cap_factor=2.0)
        # a pair with huge implied scaling blows the raw direction up
        prov.update(np.array([1e4, 0.0]), np.array([1.0, 0.0]))
        r = np.array([1.0, 0.0])
        d = prov.direction(r)
        assert np.linalg.norm(d) <= 2.0 * max(1.0, np.linalg.norm(r)) + 1e-12

    def test_initialize_resets_buffer(self):
        prov = LbfgsDirections(memory=2)
        prov.update(np.array([1.0, 0.0]), np.array([2.0, 0.0]))
        prov.initialize(np.zeros(2), np.zeros(2))
        np.testing.assert_array_equal(prov.direction(np.array([1.0, 0.0])), [-1.0, 0.0])


class TestStructuredNewton:
    def test_hand_worked_block_system(self):
        # K = {0}, J = {1}: d_J solves 2 d = -1, d_K = -gamma * 2
        hess = SmoothFunction(lambda x: 0.0, lambda x: np.zeros(2),
                              hess=lambda x: np.diag([1.0, 2.0]), dim=2)
        box = Box(np.array([-1.0, -10.0]), np.array([1.0, 10.0]))
        d = structured_newton_box(
            x=np.array([1.5, 0.0]), r_nor=np.array([2.0, 123.0]),
            x_hat=np.array([1.0, 0.0]), grad_at_x_hat=np.array([5.0, 1.0]),
            hess=hess, box=box, gamma=1.0)
        np.testing.assert_allclose(d, [-2.0, -0.5])

    def test_all_inactive_is_full_newton(self, rng):
        Q = np.array([[3.0, 0.4], [0.4, 1.0]])
        smooth = Quadratic(Q, np.array([1.0, -2.0]))
        box = Box(-10 * np.ones(2), 10 * np.ones(2))
        x = rng.uniform(-1, 1, 2)
        grad = smooth.grad(x)
        d = structured_newton_box(x=x, r_nor=grad, x_hat=x, grad_at_x_hat=grad,
                                  hess=smooth, box=box, gamma=0.5)
        np.testing.assert_allclose(d, -np.linalg.solve(Q, grad), atol=1e-12)

    def test_all_active_is_scaled_residual(self):
        smooth = Quadratic(np.eye(2), np.zeros(2))
        box = Box(-np.ones(2), np.ones(2))
        r = np.array([0.5, -0.25])
        d = structured_newton_box(x=np.array([2.0, -3.0]), r_nor=r,
                                  x_hat=np.array([1.0, -1.0]),
                                  grad_at_x_hat=np.array([1.0, -1.0]),
                                  hess=smooth, box=box, gamma=0.4)
        np.testing.assert_allclose(d, -0.4 * r)

    def test_singular_block_falls_back(self):
        hess = SmoothFunction(lambda x: 0.0, lambda x: np.zeros(2),
                              hess=lambda x: np.array([[0.0, 0.0], [0.0, -1.0]]),
                              dim=2)
        box = Box(-np.ones(2), np.ones(2))
        d = structured_newton_box(x=np.zeros(2), r_nor=np.ones(2),
                                  x_hat=np.zeros(2), grad_at_x_hat=np.ones(2),
                                  hess=hess, box=box, gamma=1.0,
                                  reg_ladder=())
        assert d is None

    def test_one_step_solve_on_unconstrained_quadratic(self, rng):
        inst = make_box_qp(n=10, seed=5, active_fraction=0.0)
        smooth = Quadratic(inst.Q, inst.q)
        big_box = Box(np.full(10, -np.inf), np.full(10, np.inf))
        problem = CompositeProblem(smooth, BoxIndicator(big_box))
        provider = StructuredNewtonBox(smooth, big_box, cap_factor=None)
        params = SolveParams(fb=FbParams.from_lipschitz(inst.lipschitz),
                             tol=1e-10, max_iter=5)
        res = panoc_plus_solve(problem, rng.standard_normal(10), params, provider)
        assert res.status.value == "Converged"
        assert res.iterations == 2  # one accepted Newton step + the closing pass
        assert res.trace[1].tau == 1.0
        assert res.residual_inf <= 1e-10


class TestDennisMoreProxy:
    def test_quotient_collapses_near_solution(self):
        inst = make_box_qp(n=10, seed=21, active_fraction=0.3)
        problem = inst.problem()
        recorded = []

        class Recording(LbfgsDirections):
            def direction(self, residual, state=None):
                d = super().direction(residual, state)
                recorded.append((np.copy(residual), np.copy(d), state))
                return d

        provider = Recording(memory=40, cap_factor=None)
        params = SolveParams(fb=FbParams.from_lipschitz(inst.lipschitz),
                             tol=1e-11, max_iter=100)
        res = panoc_plus_solve(problem, np.zeros(10), params, provider)
        assert res.status.value == "Converged"

        gamma = res.gamma_final
        P = np.diag((~inst.active).astype(float))
        jac = (np.eye(10) - (np.eye(10) - gamma * inst.Q) @ P) / gamma
        quotients = [
            float(np.linalg.norm(r + jac @ d) / np.linalg.norm(d))
            for r, d, _ in recorded if np.linalg.norm(d) > 0
        ]
        assert len(quotients) >= 5
        assert all(q < 1e-2 for q in quotients[-5:])
