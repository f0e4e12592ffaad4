"""Augmented-Lagrangian outer loop for box-constrained NLPs.

Problems of the form

    minimize  psi(u)   subject to  u in C,  h(u) in D

with boxes C, D are reduced to a sequence of composite subproblems

    f(u) = psi(u) + (1/2) dist_Sigma^2(h(u) + Sigma^-1 y, D),   g = indicator of C

solved by any solver from :mod:`fbopt.solvers`.  Multipliers are updated
from the weighted constraint violation, penalties grow per component when
infeasibility stalls, and the inner tolerance tightens geometrically.
Convergence requires both the projected-gradient stationarity measure and
the constraint infeasibility to drop below their tolerances.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .directions import LbfgsDirections
from .oracles import (Box, BoxIndicator, CompositeProblem, ConfigError,
                      EvalCounters, SmoothFunction, SmoothOracle, counted_oracle,
                      weighted_sq_dist_to_box)
from .solvers import SolveParams, SolveResult, Status, default_fb_params, solve


@dataclass
class NlpProblem:
    """Smooth cost with box-bounded variables and box-bounded constraints.

    ``constraint`` maps u to the m constraint values; ``constraint_jtvp``
    computes the constraint Jacobian transposed times a vector (the only
    form the ALM gradient needs).
    """

    cost: SmoothOracle
    constraint: callable
    constraint_jtvp: callable
    n_constraints: int
    var_box: Box
    constraint_box: Box

    def __post_init__(self):
        if self.var_box.dim != self.cost.dim:
            raise ConfigError("variable box dimension does not match the cost")
        if self.constraint_box.dim != self.n_constraints:
            raise ConfigError("constraint box dimension does not match n_constraints")

    @property
    def dim(self) -> int:
        return self.cost.dim

    def h(self, u: np.ndarray) -> np.ndarray:
        return np.asarray(self.constraint(u), dtype=float)

    def jtvp(self, u: np.ndarray, w: np.ndarray) -> np.ndarray:
        return np.asarray(self.constraint_jtvp(u, w), dtype=float)


@dataclass
class AlmState:
    """Outer-loop state: multipliers, penalties, tolerance schedule."""

    y: np.ndarray
    sigma: np.ndarray
    inner_tol: float
    outer_iterations: int = 0


@dataclass
class AlmConfig:
    eps_primal: float = 1e-4
    eps_dual: float = 1e-4
    sigma0: float = 1.0
    penalty_growth: float = 10.0     # Delta
    infeas_shrink: float = 0.5       # theta: required per-outer infeasibility decrease
    tol_shrink: float = 0.1          # rho: geometric inner-tolerance schedule
    inner_tol0: float = 1.0
    inner_tol_final: float | None = None   # default 0.1 * min(eps_primal, eps_dual)
    y_max: float = 1e9
    sigma_max: float = 1e9
    sigma_min: float = 1e-9
    max_outer: int = 100
    solver: str = "panocpp"
    lbfgs_memory: int = 50
    inner_max_iter: int = 20_000
    adaptive: bool = True
    initial_lipschitz: float | None = None  # None: finite-difference estimate

    def resolved_inner_tol_final(self) -> float:
        if self.inner_tol_final is not None:
            return self.inner_tol_final
        return 0.1 * min(self.eps_primal, self.eps_dual)


@dataclass
class OuterRow:
    outer: int
    infeasibility: float
    stationarity: float
    inner_tol: float
    inner_iterations: int
    inner_status: str
    sigma_max: float


@dataclass
class AlmResult:
    u: np.ndarray
    y: np.ndarray
    sigma: np.ndarray
    converged: bool
    outer_iterations: int
    counters: EvalCounters
    primal_residual: float
    dual_residual: float
    cost: float
    trace: list[OuterRow] = field(default_factory=list)
    inner_results: list[SolveResult] = field(default_factory=list)


def alm_inner_problem(nlp: NlpProblem, y: np.ndarray, sigma: np.ndarray) -> CompositeProblem:
    """Composite subproblem for multipliers y and diagonal penalties sigma.

    The smooth part adds half the sigma-weighted squared distance of
    ``h(u) + y/sigma`` to the constraint box; its gradient follows from the
    chain rule through the constraint Jacobian with the shifted-violation
    multiplier estimate ``y + sigma * (h(u) - proj(h(u) + y/sigma))``.
    """
    y = np.asarray(y, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    box = nlp.constraint_box
    m = nlp.n_constraints

    def value(u):
        base = nlp.cost.f(u)
        if m == 0:
            return base
        v = nlp.h(u) + y / sigma
        penalty, _ = weighted_sq_dist_to_box(v, box, sigma)
        return base + penalty

    def gradient(u):
        base = nlp.cost.grad(u)
        if m == 0:
            return base
        v = nlp.h(u) + y / sigma
        y_hat = sigma * (v - box.project(v))
        return base + nlp.jtvp(u, y_hat)

    smooth = SmoothFunction(value, gradient, dim=nlp.dim)
    return CompositeProblem(smooth=smooth, proximable=BoxIndicator(nlp.var_box))


def shifted_multipliers(nlp: NlpProblem, u: np.ndarray, y: np.ndarray,
                        sigma: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Multiplier estimate and componentwise infeasibility at u."""
    if nlp.n_constraints == 0:
        return y, np.zeros(0)
    hu = nlp.h(u)
    v = hu + y / sigma
    proj = nlp.constraint_box.project(v)
    infeas = np.abs(hu - proj)
    return y + sigma * (hu - proj), infeas


def _estimate_lipschitz(problem: CompositeProblem, u: np.ndarray) -> float:
    """Crude gradient-difference estimate to seed the adaptive stepsize rule."""
    n = u.shape[0]
    h = 1e-3 * max(1.0, float(np.linalg.norm(u)))
    d = np.full(n, h / np.sqrt(n))
    g0 = problem.smooth.grad(u)
    g1 = problem.smooth.grad(u + d)
    denom = float(np.linalg.norm(d))
    est = float(np.linalg.norm(g1 - g0)) / denom if denom > 0 else 1.0
    return max(est, 1e-6)


def alm_solve(nlp: NlpProblem, u0: np.ndarray, config: AlmConfig | None = None) -> AlmResult:
    """Safeguarded augmented-Lagrangian loop around a composite inner solver.

    Each outer iteration warm-starts the inner solve at the previous
    iterate with a fresh direction buffer (the inner objective changed, so
    stale curvature pairs would violate the secant condition) and carries
    the adapted Lipschitz estimate forward.  Counters aggregate all inner
    work plus the outer loop's own stationarity checks.
    """
    config = config or AlmConfig()
    u = np.asarray(u0, dtype=float)
    if not np.all(np.isfinite(u)):
        raise ConfigError("initial point must be finite")
    m = nlp.n_constraints
    state = AlmState(y=np.zeros(m), sigma=np.full(m, config.sigma0),
                     inner_tol=config.inner_tol0)
    tol_final = config.resolved_inner_tol_final()
    total = EvalCounters()
    t0 = time.perf_counter()

    overhead = EvalCounters()  # outer-loop residual checks, Lipschitz seeding
    lipschitz = config.initial_lipschitz
    infeas_prev = np.full(m, np.inf)
    trace: list[OuterRow] = []
    inner_results: list[SolveResult] = []
    converged = False
    primal = dual = np.inf
    cost_val = np.nan

    for outer in range(1, config.max_outer + 1):
        state.outer_iterations = outer
        inner = alm_inner_problem(nlp, state.y, state.sigma)
        counted_inner = counted_oracle(inner, overhead)
        if lipschitz is None:
            lipschitz = _estimate_lipschitz(counted_inner, u)

        fb = default_fb_params(config.solver, lipschitz, adaptive=config.adaptive)
        params = SolveParams(fb=fb, tol=state.inner_tol,
                             max_iter=config.inner_max_iter)
        provider = LbfgsDirections(memory=config.lbfgs_memory)
        res = solve(inner, u, config.solver, params, provider)
        inner_results.append(res)
        total.add(res.counters)
        u = np.asarray(res.x_final, dtype=float)
        lipschitz = res.lipschitz_final or lipschitz

        # multiplier estimate and infeasibility at the (old) multipliers
        y_hat, infeas = shifted_multipliers(nlp, u, state.y, state.sigma)
        dual = float(np.max(infeas)) if m else 0.0

        # projected-gradient stationarity of the subproblem at unit stepsize
        grad_u = res.grad_final
        if grad_u is None:
            grad_u = counted_inner.smooth.grad(u)
        primal = float(np.max(np.abs(u - nlp.var_box.project(u - grad_u)))) if u.size else 0.0

        cost_val = nlp.cost.f(u)
        trace.append(OuterRow(outer=outer, infeasibility=dual, stationarity=primal,
                              inner_tol=state.inner_tol,
                              inner_iterations=res.iterations,
                              inner_status=str(res.status),
                              sigma_max=float(state.sigma.max()) if m else 0.0))

        state.y = np.clip(y_hat, -config.y_max, config.y_max)
        if primal <= config.eps_primal and dual <= config.eps_dual:
            converged = True
            break

        if m:
            stalled = infeas > config.infeas_shrink * infeas_prev
            state.sigma = np.where(
                stalled,
                np.minimum(config.penalty_growth * state.sigma, config.sigma_max),
                state.sigma,
            )
            state.sigma = np.clip(state.sigma, config.sigma_min, config.sigma_max)
            infeas_prev = infeas
        state.inner_tol = max(config.tol_shrink * state.inner_tol, tol_final)

    total.add(overhead)
    total.wall_time = time.perf_counter() - t0
    return AlmResult(u=u, y=state.y, sigma=state.sigma, converged=converged,
                     outer_iterations=state.outer_iterations, counters=total,
                     primal_residual=primal, dual_residual=dual, cost=cost_val,
                     trace=trace, inner_results=inner_results)
