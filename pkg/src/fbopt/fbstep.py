"""Forward-backward machinery.

One proximal-gradient step T(x) = prox_{gamma g}(x - gamma grad f(x)) comes
with two residuals,

    natural residual at x:  (x - T(x)) / gamma
    normal residual at z:   grad f(prox(z)) + (z - prox(z)) / gamma

two merit functions (the forward-backward envelope and the cheaper
prox-composed objective phi o prox), and an adaptive rule that grows the
Lipschitz estimate whenever the quadratic upper bound fails between an
iterate and its proximal-gradient target.

Everything here is a pure function of explicit inputs; cached quantities
(gradients, prox points) are passed in rather than recomputed, so solvers
keep full control over their oracle budget.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .oracles import CompositeProblem, ConfigError

EPS = float(np.finfo(float).eps)


class LipschitzOverflowError(RuntimeError):
    """The Lipschitz estimate grew past the doubling cap.

    Usually means the smooth term is not Lipschitz-smooth near the current
    iterate (or the oracle is inconsistent with its gradient).
    """


# ---------------------------------------------------------------------------
# Parameters and per-iteration state
# ---------------------------------------------------------------------------

@dataclass
class FbParams:
    """Stepsize/backtracking parameters for forward-backward solvers.

    Invariants kept at all times (re-established by the adaptive rule):
    ``gamma in (0, 2/lipschitz)`` and ``sigma in (0, gamma(2 - gamma L)/2)``.
    """

    gamma: float
    lipschitz: float
    sigma: float
    beta: float = 0.5      # linesearch backtracking ratio
    shrink: float = 0.5    # stepsize shrink ratio of the adaptive rule
    adaptive: bool = True

    def validate(self) -> None:
        if not (self.lipschitz > 0):
            raise ConfigError(f"lipschitz estimate must be positive, got {self.lipschitz}")
        if not (0 < self.gamma < 2.0 / self.lipschitz):
            raise ConfigError(
                f"gamma={self.gamma} outside (0, 2/L)=(0, {2.0 / self.lipschitz})"
            )
        if not (0 < self.sigma < self.sigma_upper()):
            raise ConfigError(
                f"sigma={self.sigma} outside (0, {self.sigma_upper()})"
            )
        if not (0 < self.beta < 1):
            raise ConfigError(f"beta must be in (0,1), got {self.beta}")
        if not (0 < self.shrink < 1):
            raise ConfigError(f"shrink must be in (0,1), got {self.shrink}")

    def sigma_upper(self) -> float:
        """Open upper bound gamma (2 - gamma L) / 2 for the decrease coefficient."""
        return 0.5 * self.gamma * (2.0 - self.gamma * self.lipschitz)

    def sigma_upper_fbe(self) -> float:
        """Decrease-coefficient bound gamma (1 - gamma L) / 2 for envelope linesearches."""
        return 0.5 * self.gamma * (1.0 - self.gamma * self.lipschitz)

    def scaled(self) -> "FbParams":
        """One adaptive update: shrink gamma and sigma, grow the Lipschitz estimate.

        gamma*L is invariant under this scaling, so both sigma bounds scale
        by exactly ``shrink`` and the invariants are preserved.
        """
        a = self.shrink
        return replace(self, gamma=a * self.gamma, lipschitz=self.lipschitz / a,
                       sigma=a * self.sigma)

    @classmethod
    def from_lipschitz(cls, lipschitz: float, gamma_scale: float = 1.95,
                       sigma_scale: float = 0.1, **kwargs) -> "FbParams":
        """Defaults for the prox-merit linesearch: gamma close to 2/L."""
        if not (0 < gamma_scale < 2):
            raise ConfigError(f"gamma_scale must be in (0,2), got {gamma_scale}")
        gamma = gamma_scale / lipschitz
        sigma = sigma_scale * 0.5 * gamma * (2.0 - gamma * lipschitz)
        return cls(gamma=gamma, lipschitz=lipschitz, sigma=sigma, **kwargs)

    @classmethod
    def from_lipschitz_fbe(cls, lipschitz: float, gamma_scale: float = 0.95,
                           sigma_scale: float = 0.1, **kwargs) -> "FbParams":
        """Defaults for envelope-based solvers: gamma below 1/L."""
        if not (0 < gamma_scale < 1):
            raise ConfigError(f"gamma_scale must be in (0,1) for envelope solvers")
        gamma = gamma_scale / lipschitz
        sigma = sigma_scale * 0.5 * gamma * (1.0 - gamma * lipschitz)
        return cls(gamma=gamma, lipschitz=lipschitz, sigma=sigma, **kwargs)


@dataclass
class FbState:
    """Cached quantities of one forward-backward iteration.

    ``x_hat`` is the current prox point, ``x_bar = x_hat - gamma grad_x_hat``
    the forward point, ``p = prox(x_bar)`` its backward image, and the two
    residuals are derived from them; ``grad_at_p`` is the iteration's second
    gradient.
    """

    x_hat: np.ndarray
    x_bar: np.ndarray
    grad_x_hat: np.ndarray
    p: np.ndarray
    g_at_p: float
    f_at_p: float
    grad_at_p: np.ndarray | None
    r_nat: np.ndarray
    r_nor: np.ndarray | None
    phi_x_hat: float
    gamma: float


# ---------------------------------------------------------------------------
# Core operations
# ---------------------------------------------------------------------------

def pg_step(problem: CompositeProblem, x: np.ndarray, gamma: float) -> np.ndarray:
    """One proximal-gradient step T(x); exactly one gradient and one prox."""
    grad = problem.smooth.grad(x)
    p, _ = problem.proximable.prox(x - gamma * grad, gamma)
    return p


def natural_residual(x_hat: np.ndarray, p: np.ndarray, gamma: float) -> np.ndarray:
    """(x_hat - p) / gamma with p the proximal-gradient image of x_hat."""
    return (x_hat - p) / gamma


def normal_residual(z: np.ndarray, p: np.ndarray, grad_at_p: np.ndarray,
                    gamma: float) -> np.ndarray:
    """grad f(p) + (z - p) / gamma with p = prox(z) and the gradient supplied."""
    return grad_at_p + (z - p) / gamma


def fbe(problem: CompositeProblem, x: np.ndarray, gamma: float) -> float:
    """Forward-backward envelope value at x; costs one gradient and one prox."""
    f_x = problem.smooth.f(x)
    grad = problem.smooth.grad(x)
    p, g_p = problem.proximable.prox(x - gamma * grad, gamma)
    r = (x - p) / gamma
    return f_x + g_p - gamma * float(grad @ r) + 0.5 * gamma * float(r @ r)


def merit_psi(problem: CompositeProblem, x: np.ndarray, gamma: float) -> float:
    """Gradient-free merit phi(prox(x)); costs one prox and one f evaluation."""
    p, g_p = problem.proximable.prox(np.asarray(x, dtype=float), gamma)
    return problem.smooth.f(p) + g_p


# ---------------------------------------------------------------------------
# Adaptive Lipschitz estimation
# ---------------------------------------------------------------------------

@dataclass
class AdaptiveStep:
    """Forward-backward step together with the (possibly updated) parameters."""

    params: FbParams
    restarted: bool
    n_updates: int
    x_bar: np.ndarray
    p: np.ndarray
    g_at_p: float
    f_at_p: float


def adaptive_update(params: FbParams, x_hat: np.ndarray, f_x_hat: float,
                    grad_x_hat: np.ndarray, problem: CompositeProblem,
                    max_updates: int = 60) -> AdaptiveStep:
    """Forward-backward step with on-the-fly Lipschitz estimation.

    Computes the proximal-gradient target p of ``x_hat`` (one prox plus one
    f evaluation, reusing the supplied gradient) and, when ``params.adaptive``
    is set, verifies the quadratic upper bound between ``x_hat`` and p.  On
    violation the stepsize shrinks, the Lipschitz estimate grows, the
    decrease coefficient shrinks, and the step is recomputed, until the
    bound holds.  A relative machine-epsilon guard prevents endless
    shrinking near stationary points.
    """
    n_updates = 0
    guard = 10.0 * EPS * max(1.0, abs(f_x_hat))
    while True:
        x_bar = x_hat - params.gamma * grad_x_hat
        p, g_at_p = problem.proximable.prox(x_bar, params.gamma)
        f_at_p = problem.smooth.f(p)
        if not params.adaptive:
            break
        diff = x_hat - p
        bound = (f_x_hat - float(grad_x_hat @ diff)
                 + 0.5 * params.lipschitz * float(diff @ diff))
        if f_at_p <= bound + guard:
            break
        params = params.scaled()
        n_updates += 1
        if n_updates > max_updates:
            raise LipschitzOverflowError(
                f"Lipschitz estimate exceeded {params.lipschitz:.3e} after "
                f"{max_updates} updates; f may not be Lipschitz smooth here"
            )
    return AdaptiveStep(params=params, restarted=n_updates > 0, n_updates=n_updates,
                        x_bar=x_bar, p=p, g_at_p=g_at_p, f_at_p=f_at_p)


# ---------------------------------------------------------------------------
# Finite-difference Jacobians (test support)
# ---------------------------------------------------------------------------

def fd_jacobian(fun, z: np.ndarray, h: float | None = None) -> np.ndarray:
    """Central-difference Jacobian of a vector map, built column by column."""
    z = np.asarray(z, dtype=float)
    if h is None:
        h = EPS ** (1.0 / 3.0) * max(1.0, float(np.linalg.norm(z)))
    cols = []
    for j in range(z.shape[0]):
        e = np.zeros_like(z)
        e[j] = h
        cols.append((fun(z + e) - fun(z - e)) / (2.0 * h))
    return np.column_stack(cols)


def normal_residual_jacobian_fd(problem: CompositeProblem, z: np.ndarray,
                                gamma: float, h: float | None = None) -> np.ndarray:
    """Finite-difference Jacobian of the normal residual map at z."""

    def r_nor(zz):
        p, _ = problem.proximable.prox(zz, gamma)
        return problem.smooth.grad(p) + (zz - p) / gamma

    return fd_jacobian(r_nor, z, h)
