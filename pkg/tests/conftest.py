"""Shared fixtures: small convex instance families with exact Lipschitz bounds."""

import numpy as np
import pytest

from fbopt import CompositeProblem, L1Norm, LeastSquares, Quadratic
from fbopt.problems import logistic_oracle, make_box_qp, make_random_logistic


def lasso_family(seed: int, n: int = 8, m: int = 12):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((m, n)) / np.sqrt(m)
    b = rng.standard_normal(m)
    lam = 0.1 * float(np.max(np.abs(A.T @ b)))
    problem = CompositeProblem(LeastSquares(A, b), L1Norm(lam, n))
    lipschitz = float(np.linalg.norm(A, 2) ** 2)
    return problem, lipschitz


def boxqp_family(seed: int, n: int = 8):
    inst = make_box_qp(n=n, seed=seed, active_fraction=0.25)
    return inst.problem(), inst.lipschitz


def logistic_family(seed: int, n: int = 8, m: int = 16):
    inst = make_random_logistic(m=m, n=n, seed=seed, lam_ratio=0.1)
    return logistic_oracle(inst), inst.lipschitz


INSTANCE_FAMILIES = (lasso_family, boxqp_family, logistic_family)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
