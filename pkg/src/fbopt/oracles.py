"""Problem oracles: smooth term, proximable term, prox catalog, call counters.

A composite problem is phi = f + g with smooth f (value + gradient) and
convex proximable g (prox + value at the prox point).  Solvers only ever
talk to these oracle objects, so instrumentation (evaluation counting) is
a wrapper at this level.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class ConfigError(ValueError):
    """Invalid problem or solver configuration."""


#: Feasibility slack used by indicator functions before reporting +inf.
FEASIBILITY_TOL = 1e-12


# ---------------------------------------------------------------------------
# Oracle contracts
# ---------------------------------------------------------------------------

class SmoothOracle:
    """Smooth term f: value, gradient, optional Hessian blocks.

    ``matvec_per_f`` / ``matvec_per_grad`` declare how many matrix-vector
    products a single call performs; the counting wrapper uses them to
    maintain the matvec tally.
    """

    dim: int
    matvec_per_f: int = 0
    matvec_per_grad: int = 0

    def f(self, x: np.ndarray) -> float:
        raise NotImplementedError

    def grad(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def hess_block(self, x: np.ndarray, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
        """Dense block of the Hessian at x, for structured Newton directions."""
        raise NotImplementedError(f"{type(self).__name__} exposes no Hessian blocks")


class ProxOracle:
    """Proximable term g: prox operator plus function values.

    ``prox(x, gamma)`` returns the unique minimizer of
    ``u -> g(u) + ||u - x||^2 / (2 gamma)`` together with the value of g
    at that minimizer, so callers never re-evaluate g at prox outputs.
    """

    dim: int

    def prox(self, x: np.ndarray, gamma: float) -> tuple[np.ndarray, float]:
        raise NotImplementedError

    def g(self, x: np.ndarray) -> float:
        raise NotImplementedError


@dataclass
class CompositeProblem:
    """phi = f + g over a shared space of dimension ``dim``."""

    smooth: SmoothOracle
    proximable: ProxOracle

    def __post_init__(self):
        if self.smooth.dim != self.proximable.dim:
            raise ConfigError(
                f"dimension mismatch: smooth has dim {self.smooth.dim}, "
                f"proximable has dim {self.proximable.dim}"
            )

    @property
    def dim(self) -> int:
        return self.smooth.dim

    def phi(self, x: np.ndarray) -> float:
        """Objective value f(x) + g(x); may be +inf outside dom g."""
        return self.smooth.f(x) + self.proximable.g(x)


@dataclass
class EvalCounters:
    """Monotone tallies of oracle calls made during one solve."""

    n_f: int = 0
    n_grad: int = 0
    n_prox: int = 0
    n_g: int = 0
    n_matvec: int = 0
    wall_time: float = 0.0

    def snapshot(self) -> tuple[int, int, int, int, int]:
        return (self.n_f, self.n_grad, self.n_prox, self.n_g, self.n_matvec)

    def add(self, other: "EvalCounters") -> None:
        self.n_f += other.n_f
        self.n_grad += other.n_grad
        self.n_prox += other.n_prox
        self.n_g += other.n_g
        self.n_matvec += other.n_matvec
        self.wall_time += other.wall_time


# ---------------------------------------------------------------------------
# Boxes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Box:
    """Axis-aligned box [lo, hi], possibly unbounded or degenerate (lo == hi)."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lo, dtype=float)
        hi = np.asarray(self.hi, dtype=float)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if lo.shape != hi.shape:
            raise ConfigError(f"box bounds have shapes {lo.shape} vs {hi.shape}")
        if np.any(lo > hi):
            bad = int(np.argmax(lo > hi))
            raise ConfigError(f"box has lo > hi at coordinate {bad}")

    @classmethod
    def from_bounds(cls, lo, hi, dim: int | None = None) -> "Box":
        """Build from scalars or arrays; scalars require an explicit ``dim``."""
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        if lo.ndim == 0 or hi.ndim == 0:
            if dim is None:
                raise ConfigError("scalar box bounds need an explicit dim")
            lo = np.full(dim, float(lo))
            hi = np.full(dim, float(hi))
        return cls(lo, hi)

    @classmethod
    def unbounded(cls, dim: int) -> "Box":
        return cls(np.full(dim, -np.inf), np.full(dim, np.inf))

    @property
    def dim(self) -> int:
        return self.lo.shape[0]

    def project(self, v: np.ndarray) -> np.ndarray:
        return np.clip(v, self.lo, self.hi)

    def contains(self, v: np.ndarray, tol: float = FEASIBILITY_TOL) -> bool:
        if self.dim == 0:
            return True
        return bool(np.all(v >= self.lo - tol) and np.all(v <= self.hi + tol))


# ---------------------------------------------------------------------------
# Prox catalog
# ---------------------------------------------------------------------------

def prox_l1(x: np.ndarray, threshold: float) -> tuple[np.ndarray, float]:
    """Soft threshold: prox of ``threshold * ||.||_1``.

    Returns the prox point and its plain l1 norm; the caller scales the
    norm by its own regularization weight.
    """
    x = np.asarray(x, dtype=float)
    p = np.sign(x) * np.maximum(np.abs(x) - threshold, 0.0)
    return p, float(np.abs(p).sum())


def prox_box(x: np.ndarray, lo, hi) -> tuple[np.ndarray, float]:
    """Projection onto [lo, hi]; the indicator value at the output is 0."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    if np.any(lo > hi):
        bad = int(np.argmax(lo > hi))
        raise ConfigError(f"box has lo > hi at coordinate {bad}")
    return np.clip(x, lo, hi), 0.0


def weighted_sq_dist_to_box(v: np.ndarray, box: Box, sigma: np.ndarray) -> tuple[float, np.ndarray]:
    """Half squared sigma-weighted distance to a box, plus the raw residual v - proj(v)."""
    sigma = np.asarray(sigma, dtype=float)
    if np.any(sigma <= 0):
        raise ConfigError("weights must be strictly positive")
    residual = v - box.project(v)
    value = 0.5 * float(np.dot(sigma * residual, residual))
    return value, residual


class ZeroFunction(ProxOracle):
    """g identically zero; prox is the identity."""

    def __init__(self, dim: int):
        self.dim = dim

    def prox(self, x, gamma):
        return np.array(x, dtype=float, copy=True), 0.0

    def g(self, x):
        return 0.0


class L1Norm(ProxOracle):
    """g(x) = weight * ||x||_1."""

    def __init__(self, weight: float, dim: int):
        if weight < 0:
            raise ConfigError("l1 weight must be nonnegative")
        self.weight = float(weight)
        self.dim = dim

    def prox(self, x, gamma):
        p, norm1 = prox_l1(x, gamma * self.weight)
        return p, self.weight * norm1

    def g(self, x):
        return self.weight * float(np.abs(np.asarray(x)).sum())


class BoxIndicator(ProxOracle):
    """Indicator of a box; prox is the projection, with value exactly 0.

    Evaluating g at arbitrary points allows a small feasibility slack
    before reporting +inf, so rounding never produces spurious infinities.
    """

    def __init__(self, box: Box):
        self.box = box
        self.dim = box.dim

    @classmethod
    def from_bounds(cls, lo, hi, dim: int | None = None) -> "BoxIndicator":
        return cls(Box.from_bounds(lo, hi, dim))

    def prox(self, x, gamma):
        return self.box.project(np.asarray(x, dtype=float)), 0.0

    def g(self, x):
        return 0.0 if self.box.contains(np.asarray(x, dtype=float)) else np.inf


# ---------------------------------------------------------------------------
# Smooth catalog
# ---------------------------------------------------------------------------

class SmoothFunction(SmoothOracle):
    """Smooth oracle from plain callables (value, gradient, optional Hessian)."""

    def __init__(self, fun, grad, dim, hess=None, matvec_per_f=0, matvec_per_grad=0):
        self._fun = fun
        self._grad = grad
        self._hess = hess
        self.dim = dim
        self.matvec_per_f = matvec_per_f
        self.matvec_per_grad = matvec_per_grad

    def f(self, x):
        return float(self._fun(x))

    def grad(self, x):
        return np.asarray(self._grad(x), dtype=float)

    def hess_block(self, x, rows, cols):
        if self._hess is None:
            raise NotImplementedError("no Hessian callable supplied")
        return np.asarray(self._hess(x), dtype=float)[np.ix_(rows, cols)]


class Quadratic(SmoothOracle):
    """f(x) = x'Qx/2 + q'x with symmetric Q."""

    matvec_per_f = 1
    matvec_per_grad = 1

    def __init__(self, Q: np.ndarray, q: np.ndarray):
        self.Q = np.asarray(Q, dtype=float)
        self.q = np.asarray(q, dtype=float)
        self.dim = self.q.shape[0]

    def f(self, x):
        return 0.5 * float(x @ (self.Q @ x)) + float(self.q @ x)

    def grad(self, x):
        return self.Q @ x + self.q

    def hess_block(self, x, rows, cols):
        return self.Q[np.ix_(rows, cols)]


class LeastSquares(SmoothOracle):
    """f(x) = ||Ax - b||^2 / 2."""

    matvec_per_f = 1
    matvec_per_grad = 2

    def __init__(self, A: np.ndarray, b: np.ndarray):
        self.A = np.asarray(A, dtype=float)
        self.b = np.asarray(b, dtype=float)
        self.dim = self.A.shape[1]

    def f(self, x):
        r = self.A @ x - self.b
        return 0.5 * float(r @ r)

    def grad(self, x):
        return self.A.T @ (self.A @ x - self.b)

    def hess_block(self, x, rows, cols):
        return self.A[:, rows].T @ self.A[:, cols]


# ---------------------------------------------------------------------------
# Counting wrapper
# ---------------------------------------------------------------------------

class _CountedSmooth(SmoothOracle):
    def __init__(self, inner: SmoothOracle, counters: EvalCounters):
        self._inner = inner
        self._counters = counters
        self.dim = inner.dim
        self.matvec_per_f = inner.matvec_per_f
        self.matvec_per_grad = inner.matvec_per_grad

    def f(self, x):
        self._counters.n_f += 1
        self._counters.n_matvec += self._inner.matvec_per_f
        return self._inner.f(x)

    def grad(self, x):
        self._counters.n_grad += 1
        self._counters.n_matvec += self._inner.matvec_per_grad
        return self._inner.grad(x)

    def hess_block(self, x, rows, cols):
        return self._inner.hess_block(x, rows, cols)


class _CountedProx(ProxOracle):
    def __init__(self, inner: ProxOracle, counters: EvalCounters):
        self._inner = inner
        self._counters = counters
        self.dim = inner.dim

    def prox(self, x, gamma):
        self._counters.n_prox += 1
        self._counters.n_g += 1  # the g value comes bundled with the prox
        return self._inner.prox(x, gamma)

    def g(self, x):
        self._counters.n_g += 1
        return self._inner.g(x)


def counted_oracle(problem: CompositeProblem, counters: EvalCounters) -> CompositeProblem:
    """Wrap a problem so every oracle call increments the matching counter.

    Values pass through bit-identically; the wrapper adds bookkeeping only.
    """
    return CompositeProblem(
        smooth=_CountedSmooth(problem.smooth, counters),
        proximable=_CountedProx(problem.proximable, counters),
    )
