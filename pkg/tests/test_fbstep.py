import numpy as np
import pytest

from fbopt import (BoxIndicator, CompositeProblem, ConfigError, FbParams,
                   L1Norm, LipschitzOverflowError, Quadratic, SmoothFunction,
                   ZeroFunction, adaptive_update, fbe, fd_jacobian, merit_psi,
                   natural_residual, normal_residual,
                   normal_residual_jacobian_fd, pg_step)
from fbopt.problems import make_box_qp

from conftest import INSTANCE_FAMILIES


def quad_1d(curvature=1.0, center=0.0):
    """f(x) = curvature (x - center)^2 / 2 as a 1-d composite with g = 0."""
    Q = np.array([[curvature]])
    q = np.array([-curvature * center])
    return CompositeProblem(Quadratic(Q, q), ZeroFunction(1))


class TestPgStep:
    def test_scaling_on_isotropic_quadratic(self):
        prob = CompositeProblem(Quadratic(np.eye(2), np.zeros(2)), ZeroFunction(2))
        p = pg_step(prob, np.array([2.0, -4.0]), 0.5)
        np.testing.assert_allclose(p, [1.0, -2.0])

    def test_fixed_point_at_clamped_bound(self):
        prob = CompositeProblem(
            Quadratic(np.array([[1.0]]), np.array([-2.0])),
            BoxIndicator.from_bounds(-1.0, 1.0, dim=1))
        for gamma in (0.3, 1.0, 1.9):
            np.testing.assert_allclose(pg_step(prob, np.array([1.0]), gamma), [1.0])

    def test_large_stepsize_closed_form(self):
        # x - gamma (x - 1) at x=0, gamma=1.95
        p = pg_step(quad_1d(center=1.0), np.array([0.0]), 1.95)
        np.testing.assert_allclose(p, [1.95])


class TestResiduals:
    def test_zero_at_fixed_point(self):
        prob = CompositeProblem(
            Quadratic(np.array([[1.0]]), np.array([-2.0])),
            BoxIndicator.from_bounds(-1.0, 1.0, dim=1))
        x = np.array([1.0])
        p = pg_step(prob, x, 0.7)
        np.testing.assert_allclose(natural_residual(x, p, 0.7), [0.0])

    def test_identity_for_isotropic_quadratic(self, rng):
        prob = CompositeProblem(Quadratic(np.eye(3), np.zeros(3)), ZeroFunction(3))
        x = rng.standard_normal(3)
        for gamma in (0.2, 1.0, 1.8):
            p = pg_step(prob, x, gamma)
            np.testing.assert_allclose(natural_residual(x, p, gamma), x, atol=1e-12)

    def test_natural_residual_closed_form(self):
        prob = quad_1d(center=1.0)
        x = np.array([0.0])
        p = pg_step(prob, x, 0.5)
        np.testing.assert_allclose(natural_residual(x, p, 0.5), [-1.0])

    def test_normal_residual_identity_when_prox_is_identity(self):
        prob = CompositeProblem(Quadratic(np.eye(2), np.zeros(2)), ZeroFunction(2))
        z = np.array([1.0, 2.0])
        for gamma in (0.3, 1.5):
            p, _ = prob.proximable.prox(z, gamma)
            r = normal_residual(z, p, prob.smooth.grad(p), gamma)
            np.testing.assert_allclose(r, z)

    def test_normal_residual_with_projection(self):
        prob = CompositeProblem(
            Quadratic(np.array([[1.0]]), np.array([0.0])),
            BoxIndicator.from_bounds(-1.0, 1.0, dim=1))
        z = np.array([3.0])
        p, _ = prob.proximable.prox(z, 1.0)
        r = normal_residual(z, p, prob.smooth.grad(p), 1.0)
        np.testing.assert_allclose(r, [3.0])  # grad f(1) + (3 - 1) / 1

    def test_zeros_map_into_natural_zeros(self):
        # at z = x* - gamma grad f(x*) the normal residual vanishes and the
        # prox image is a natural-residual zero
        prob = CompositeProblem(
            Quadratic(np.array([[1.0]]), np.array([-2.0])),
            BoxIndicator.from_bounds(-1.0, 1.0, dim=1))
        x_star = np.array([1.0])
        gamma = 0.8
        z = x_star - gamma * prob.smooth.grad(x_star)
        p, _ = prob.proximable.prox(z, gamma)
        r_nor = normal_residual(z, p, prob.smooth.grad(p), gamma)
        np.testing.assert_allclose(r_nor, [0.0], atol=1e-12)
        p2 = pg_step(prob, p, gamma)
        np.testing.assert_allclose(natural_residual(p, p2, gamma), [0.0], atol=1e-12)


class TestFbe:
    def test_quadratic_closed_form(self):
        # g = 0: envelope is (1 - gamma) x^2 / 2 for f = x^2/2
        assert fbe(quad_1d(), np.array([2.0]), 0.5) == pytest.approx(1.0)

    def test_equals_objective_at_fixed_point(self):
        prob = CompositeProblem(
            Quadratic(np.array([[1.0]]), np.array([-2.0])),
            BoxIndicator.from_bounds(-1.0, 1.0, dim=1))
        x_star = np.array([1.0])
        val = fbe(prob, x_star, 0.6)
        assert val == pytest.approx(prob.smooth.f(x_star), abs=1e-12)

    def test_smooth_case_formula(self, rng):
        prob = CompositeProblem(Quadratic(np.diag([1.0, 3.0]), np.ones(2)),
                                ZeroFunction(2))
        x = rng.standard_normal(2)
        gamma = 0.21
        grad = prob.smooth.grad(x)
        expected = prob.smooth.f(x) - 0.5 * gamma * float(grad @ grad)
        assert fbe(prob, x, gamma) == pytest.approx(expected, rel=1e-12)


class TestMeritPsi:
    def test_project_then_evaluate(self):
        prob = CompositeProblem(
            Quadratic(np.eye(2), np.array([-2.0, 0.0])),
            BoxIndicator.from_bounds(-1.0, 1.0, dim=2))
        # prox of (3, 0) is (1, 0); f(1,0) = 0.5 - 2 = -1.5, shift by f0 = 2 for
        # the pinned value 0.5 of ||x - (2,0)||^2/2
        val = merit_psi(prob, np.array([3.0, 0.0]), 0.4) + 2.0
        assert val == pytest.approx(0.5)

    def test_reduces_to_f_without_regularizer(self, rng):
        prob = quad_1d(curvature=2.0)
        x = rng.standard_normal(1)
        assert merit_psi(prob, x, 0.3) == pytest.approx(prob.smooth.f(x))

    def test_feasible_point_of_indicator(self):
        prob = CompositeProblem(
            Quadratic(np.eye(2), np.zeros(2)),
            BoxIndicator.from_bounds(-1.0, 1.0, dim=2))
        x = np.array([0.4, -0.2])
        assert merit_psi(prob, x, 0.9) == pytest.approx(prob.smooth.f(x))


class TestAdaptive:
    def test_hand_worked_update(self):
        # f = x^2/2 at x=1 with L=0.5, gamma=3.9: the bound fails (4.205 vs
        # 0.4025), one update gives L=1, gamma=1.95, where it holds with equality
        prob = quad_1d()
        params = FbParams(gamma=3.9, lipschitz=0.5, sigma=0.01, adaptive=True)
        x = np.array([1.0])
        st = adaptive_update(params, x, prob.smooth.f(x), prob.smooth.grad(x), prob)
        assert st.restarted and st.n_updates == 1
        assert st.params.lipschitz == pytest.approx(1.0)
        assert st.params.gamma == pytest.approx(1.95)
        np.testing.assert_allclose(st.p, [1.0 - 1.95])
        assert st.f_at_p == pytest.approx(0.45125)

    def test_no_update_when_estimate_covers_curvature(self):
        prob = quad_1d(curvature=2.0)
        params = FbParams.from_lipschitz(2.0)
        x = np.array([3.0])
        st = adaptive_update(params, x, prob.smooth.f(x), prob.smooth.grad(x), prob)
        assert not st.restarted and st.n_updates == 0
        assert st.params is not None and st.params.gamma == params.gamma

    def test_sigma_bound_preserved_exactly(self):
        params = FbParams.from_lipschitz(0.125, sigma_scale=0.37)
        ratio = params.sigma / params.sigma_upper()
        for _ in range(10):
            params = params.scaled()
            params.validate()
            assert params.sigma / params.sigma_upper() == pytest.approx(ratio, rel=1e-12)

    def test_inconsistent_oracle_raises(self):
        lying = CompositeProblem(
            SmoothFunction(lambda x: 1e10, lambda x: np.ones(1), dim=1),
            ZeroFunction(1))
        params = FbParams(gamma=1.0, lipschitz=1.0, sigma=0.1, adaptive=True)
        with pytest.raises(LipschitzOverflowError):
            adaptive_update(params, np.array([0.0]), 0.0, np.ones(1), lying)


class TestParams:
    def test_validation(self):
        FbParams.from_lipschitz(2.0).validate()
        with pytest.raises(ConfigError):
            FbParams(gamma=1.1, lipschitz=2.0, sigma=0.01).validate()  # gamma > 2/L
        with pytest.raises(ConfigError):
            FbParams(gamma=0.9, lipschitz=2.0, sigma=1.0).validate()  # sigma too big
        with pytest.raises(ConfigError):
            FbParams(gamma=0.9, lipschitz=2.0, sigma=0.01, beta=1.0).validate()


class TestJacobians:
    def test_fd_jacobian_of_linear_map(self):
        A = np.array([[1.0, 2.0], [3.0, -4.0]])
        jac = fd_jacobian(lambda v: A @ v, np.array([0.3, -0.7]))
        np.testing.assert_allclose(jac, A, atol=1e-8)

    def test_reduces_to_hessian_without_regularizer(self):
        Q = np.array([[2.0, 0.5], [0.5, 1.0]])
        prob = CompositeProblem(Quadratic(Q, np.zeros(2)), ZeroFunction(2))
        jac = normal_residual_jacobian_fd(prob, np.array([0.2, 0.4]), 0.5)
        np.testing.assert_allclose(jac, Q, atol=1e-6)

    def test_box_qp_matches_analytic_formula(self):
        inst = make_box_qp(n=8, seed=3, active_fraction=0.4)
        prob = inst.problem()
        gamma = 0.9 / inst.lipschitz
        z_star = inst.x_star - gamma * prob.smooth.grad(inst.x_star)
        jac_fd = normal_residual_jacobian_fd(prob, z_star, gamma)
        P = np.diag((~inst.active).astype(float))
        analytic = (np.eye(8) - (np.eye(8) - gamma * inst.Q) @ P) / gamma
        np.testing.assert_allclose(jac_fd, analytic, atol=1e-5 * inst.lipschitz)

    def test_transpose_relation_between_residual_jacobians(self):
        inst = make_box_qp(n=6, seed=9, active_fraction=0.34)
        prob = inst.problem()
        gamma = 0.8 / inst.lipschitz
        z_star = inst.x_star - gamma * prob.smooth.grad(inst.x_star)
        jac_nor = normal_residual_jacobian_fd(prob, z_star, gamma)

        def r_nat(x):
            p = pg_step(prob, x, gamma)
            return (x - p) / gamma

        jac_nat = fd_jacobian(r_nat, inst.x_star)
        np.testing.assert_allclose(jac_nat, jac_nor.T, atol=1e-5 * inst.lipschitz)


class TestDecreaseProperties:
    """Smaller-sample versions of the inequality suites (full runs live in
    the acceptance module)."""

    def sample(self, family, seed, k=40):
        problem, lipschitz = family(seed)
        rng = np.random.default_rng(seed + 999)
        n = problem.dim
        for _ in range(k):
            x = 2.0 * rng.standard_normal(n)
            gamma = float(rng.uniform(0.05, 1.95)) / lipschitz
            yield problem, lipschitz, x, gamma, rng

    @pytest.mark.parametrize("family", INSTANCE_FAMILIES)
    def test_pg_cost_decrease(self, family):
        for problem, lipschitz, x, gamma, _ in self.sample(family, 7):
            x = problem.proximable.prox(x, gamma)[0]  # keep phi(x) finite
            p = pg_step(problem, x, gamma)
            r = natural_residual(x, p, gamma)
            lhs = problem.phi(p) - problem.phi(x)
            rhs = -0.5 * gamma * (2 - gamma * lipschitz) * float(r @ r)
            assert lhs <= rhs + 1e-10

    @pytest.mark.parametrize("family", INSTANCE_FAMILIES)
    def test_merit_decrease_along_pg_step(self, family):
        for problem, lipschitz, x, gamma, _ in self.sample(family, 11):
            x_hat, _ = problem.proximable.prox(x, gamma)
            grad = problem.smooth.grad(x_hat)
            p = problem.proximable.prox(x_hat - gamma * grad, gamma)[0]
            r = natural_residual(x_hat, p, gamma)
            lhs = merit_psi(problem, x_hat - gamma * grad, gamma) - merit_psi(problem, x, gamma)
            rhs = -0.5 * gamma * (2 - gamma * lipschitz) * float(r @ r)
            assert lhs <= rhs + 1e-10

    @pytest.mark.parametrize("family", INSTANCE_FAMILIES)
    def test_regularizer_modulus_bound(self, family):
        for problem, lipschitz, x, gamma, rng in self.sample(family, 13, k=20):
            p_x, g_x = problem.proximable.prox(x, gamma)
            bound = float(np.linalg.norm(x - p_x)) / gamma
            for _ in range(10):
                d1 = 1e-4 * rng.standard_normal(x.shape[0])
                d2 = 1e-4 * rng.standard_normal(x.shape[0])
                p1, g1 = problem.proximable.prox(x + d1, gamma)
                p2, g2 = problem.proximable.prox(x + d2, gamma)
                dist = float(np.linalg.norm(d1 - d2))
                if dist < 1e-12:
                    continue
                assert abs(g1 - g2) / dist <= bound + 1e-3

    @pytest.mark.parametrize("family", INSTANCE_FAMILIES)
    def test_merit_modulus_bound(self, family):
        for problem, lipschitz, x, gamma, rng in self.sample(family, 17, k=20):
            p_x, _ = problem.proximable.prox(x, gamma)
            bound = (float(np.linalg.norm(problem.smooth.grad(p_x)))
                     + float(np.linalg.norm(x - p_x)) / gamma)
            psi_vals = {}
            for _ in range(10):
                d1 = 1e-4 * rng.standard_normal(x.shape[0])
                d2 = 1e-4 * rng.standard_normal(x.shape[0])
                v1 = merit_psi(problem, x + d1, gamma)
                v2 = merit_psi(problem, x + d2, gamma)
                dist = float(np.linalg.norm(d1 - d2))
                if dist < 1e-12:
                    continue
                assert abs(v1 - v2) / dist <= bound + 1e-3
