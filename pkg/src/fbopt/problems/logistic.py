"""Sparse logistic regression with l1 regularization.

f(x) = sum_i log(1 + exp(-b_i <a_i, x>)),  g(x) = lam ||x||_1.

The loss uses the log-sum-exp guard so huge margins never overflow, the
gradient needs one product with A and one with its transpose, and the
Lipschitz constant is bounded by ||A||_2^2 / 4 (estimated by power
iteration on A'A).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ..oracles import CompositeProblem, L1Norm, SmoothOracle


def lambda_max(A, b) -> float:
    """Smallest l1 weight whose optimal solution is exactly zero: ||A'b||_inf / 2."""
    Atb = A.T @ np.asarray(b, dtype=float)
    Atb = np.asarray(Atb).ravel()
    return 0.5 * float(np.max(np.abs(Atb))) if Atb.size else 0.0


def spectral_norm_sq(A, iters: int = 50, rtol: float = 1e-6) -> float:
    """||A||_2^2 by power iteration on A'A with a deterministic start."""
    n = A.shape[1]
    v = np.ones(n) / np.sqrt(n)
    est = 0.0
    for _ in range(iters):
        w = A.T @ (A @ v)
        w = np.asarray(w).ravel()
        norm = float(np.linalg.norm(w))
        if norm == 0.0:
            return 0.0
        new_est = float(v @ w)
        v = w / norm
        if est > 0 and abs(new_est - est) <= rtol * est:
            est = new_est
            break
        est = new_est
    return est


class LogisticLoss(SmoothOracle):
    """Overflow-safe logistic loss over a (sparse) data matrix."""

    matvec_per_f = 1
    matvec_per_grad = 2

    def __init__(self, A, b):
        self.A = A
        self.b = np.asarray(b, dtype=float)
        self.dim = A.shape[1]

    def f(self, x):
        t = -self.b * np.asarray(self.A @ x).ravel()
        return float(np.logaddexp(0.0, t).sum())

    def grad(self, x):
        margins = self.b * np.asarray(self.A @ x).ravel()
        # sigmoid of the negated margin, stable for large |margins|
        s = np.where(margins >= 0,
                     np.exp(-np.logaddexp(0.0, margins)),
                     1.0 / (1.0 + np.exp(margins)))
        g = -(self.A.T @ (self.b * s))
        return np.asarray(g).ravel()


@dataclass
class LogisticProblem:
    """Data, labels, l1 weight, and the cached Lipschitz bound."""

    A: sp.csr_matrix
    b: np.ndarray
    lam: float
    lipschitz: float = 0.0

    def __post_init__(self):
        b = np.asarray(self.b, dtype=float)
        if not np.all(np.isin(b, (-1.0, 1.0))):
            raise ValueError("labels must be -1 or +1")
        if self.lam < 0:
            raise ValueError("regularization weight must be nonnegative")
        self.b = b
        if self.lipschitz <= 0.0:
            self.lipschitz = 0.25 * spectral_norm_sq(self.A)

    @property
    def dim(self) -> int:
        return self.A.shape[1]


def logistic_oracle(problem: LogisticProblem) -> CompositeProblem:
    return CompositeProblem(
        smooth=LogisticLoss(problem.A, problem.b),
        proximable=L1Norm(problem.lam, problem.dim),
    )


def make_random_logistic(m: int, n: int, seed: int = 0, density: float = 0.3,
                         lam_ratio: float = 0.05) -> LogisticProblem:
    """Synthetic instance with a planted separator; lam is a fraction of
    the zero-solution threshold weight."""
    rng = np.random.default_rng(seed)
    A = sp.random(m, n, density=density, random_state=rng,
                  data_rvs=rng.standard_normal, format="csr")
    w = rng.standard_normal(n)
    scores = np.asarray(A @ w).ravel() + 0.1 * rng.standard_normal(m)
    b = np.where(scores >= 0, 1.0, -1.0)
    lam = lam_ratio * lambda_max(A, b)
    return LogisticProblem(A=A, b=b, lam=lam)
