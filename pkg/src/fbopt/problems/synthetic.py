"""Synthetic convex test instances with known structure.

Box-constrained QPs are built backwards from a chosen solution point with
strict complementarity, so the optimum, the active set, and the optimal
value are exact by construction.  Lasso instances use a planted sparse
signal; their optimum is not analytic but any high-accuracy solve bounds
the optimal value from above.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..oracles import (Box, BoxIndicator, CompositeProblem, L1Norm,
                       LeastSquares, Quadratic)


@dataclass
class BoxQpInstance:
    """min x'Qx/2 + q'x over a box, with the optimum known exactly."""

    Q: np.ndarray
    q: np.ndarray
    box: Box
    x_star: np.ndarray
    grad_at_star: np.ndarray   # zero on inactive coordinates, pushes outward on active ones
    active: np.ndarray         # boolean mask of bound-active coordinates
    lipschitz: float

    @property
    def dim(self) -> int:
        return self.q.shape[0]

    def phi_min(self) -> float:
        return 0.5 * float(self.x_star @ (self.Q @ self.x_star)) + float(self.q @ self.x_star)

    def problem(self) -> CompositeProblem:
        return CompositeProblem(Quadratic(self.Q, self.q), BoxIndicator(self.box))


def make_box_qp(n: int, seed: int = 0, active_fraction: float = 0.3,
                cond: float = 100.0) -> BoxQpInstance:
    """Box QP with prescribed conditioning and active-set fraction.

    The requested fraction of coordinates sits exactly at a bound with a
    strictly signed gradient (magnitude in [0.5, 1.5]), the rest strictly
    inside with zero gradient, so the optimality conditions hold with
    strict complementarity and the solution is a fixed point of the
    projected-gradient map for every stepsize.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if not (0 <= active_fraction < 1):
        raise ValueError("active_fraction must lie in [0, 1)")
    rng = np.random.default_rng(seed)

    eigs = np.logspace(0.0, np.log10(cond), n)
    basis, _ = np.linalg.qr(rng.standard_normal((n, n)))
    Q = basis @ np.diag(eigs) @ basis.T
    Q = 0.5 * (Q + Q.T)

    lo = -np.ones(n)
    hi = np.ones(n)
    n_active = int(round(active_fraction * n))
    idx = rng.permutation(n)
    active = np.zeros(n, dtype=bool)
    active[idx[:n_active]] = True

    x_star = rng.uniform(-0.9, 0.9, size=n)
    at_upper = rng.random(n) < 0.5
    x_star[active & at_upper] = 1.0
    x_star[active & ~at_upper] = -1.0

    grad_star = np.zeros(n)
    mags = rng.uniform(0.5, 1.5, size=n)
    grad_star[active & at_upper] = -mags[active & at_upper]
    grad_star[active & ~at_upper] = mags[active & ~at_upper]

    q = grad_star - Q @ x_star
    return BoxQpInstance(Q=Q, q=q, box=Box(lo, hi), x_star=x_star,
                         grad_at_star=grad_star, active=active,
                         lipschitz=float(eigs[-1]))


@dataclass
class LassoInstance:
    """min ||Ax - b||^2/2 + lam ||x||_1 with a planted sparse signal."""

    A: np.ndarray
    b: np.ndarray
    lam: float
    x_true: np.ndarray
    lipschitz: float

    @property
    def dim(self) -> int:
        return self.A.shape[1]

    def problem(self) -> CompositeProblem:
        return CompositeProblem(LeastSquares(self.A, self.b), L1Norm(self.lam, self.dim))


def make_lasso(m: int, n: int, seed: int = 0, sparsity: float = 0.2,
               noise: float = 0.01, lam_scale: float = 0.1) -> LassoInstance:
    """Random dense lasso; lam is a fraction of ||A'b||_inf (the weight that
    already forces the all-zero solution)."""
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((m, n)) / np.sqrt(m)
    x_true = np.zeros(n)
    support = rng.permutation(n)[: max(1, int(sparsity * n))]
    x_true[support] = rng.standard_normal(support.size)
    b = A @ x_true + noise * rng.standard_normal(m)
    lam = lam_scale * float(np.max(np.abs(A.T @ b)))
    lipschitz = float(np.linalg.norm(A, 2) ** 2)
    return LassoInstance(A=A, b=b, lam=lam, x_true=x_true, lipschitz=lipschitz)


def convex_suite(n_instances: int = 20, seed: int = 0):
    """Alternating lasso / box-QP instances for the convex regression suite.

    Yields (name, CompositeProblem, lipschitz, x0) tuples, deterministic in
    the seed.
    """
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n_instances):
        sub = int(rng.integers(0, 2**31 - 1))
        if i % 2 == 0:
            inst = make_lasso(m=40, n=25, seed=sub)
            name = f"lasso-{i:02d}"
            problem, lip = inst.problem(), inst.lipschitz
            x0 = rng.standard_normal(inst.dim)
        else:
            inst = make_box_qp(n=20, seed=sub, active_fraction=0.3)
            name = f"boxqp-{i:02d}"
            problem, lip = inst.problem(), inst.lipschitz
            x0 = rng.uniform(-2.0, 2.0, size=inst.dim)
        out.append((name, problem, lip, x0))
    return out
