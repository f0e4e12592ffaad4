"""Composite-minimization solvers sharing the forward-backward machinery.

Four solvers over phi = f + g:

``panoc_plus_solve``
    Proximal linesearch on the gradient-free merit phi o prox.  Candidates
    are forward point + tau * direction, accepted when the objective at
    their prox point decreases sufficiently.  Every iteration costs exactly
    two gradients, no matter how often the linesearch backtracks; extra
    backtracking steps cost one prox + one f + one g evaluation only.
    Valid for stepsizes up to 2/L.

``zerofpr_solve`` / ``panoc_solve``
    Envelope-based baselines (stepsizes below 1/L).  Every backtracking
    step re-evaluates the forward-backward envelope and therefore costs an
    additional gradient - the budget contrast to ``panoc_plus_solve``.

``pg_solve``
    Plain proximal-gradient iteration with the same stopping rule.

All solvers terminate on the sup norm of the natural residual, return the
final prox point, and record a per-iteration trace with cumulative oracle
counts so runs can be replayed and audited.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .directions import DirectionProvider, LbfgsDirections, ZeroDirections
from .fbstep import AdaptiveStep, FbParams, FbState, adaptive_update
from .oracles import CompositeProblem, ConfigError, EvalCounters, counted_oracle


class Status(str, Enum):
    CONVERGED = "Converged"
    MAX_ITER = "MaxIter"
    LINESEARCH_FAILED = "LineSearchFailed"
    DIVERGED = "Diverged"

    def __str__(self):
        return self.value


@dataclass
class SolveParams:
    fb: FbParams
    tol: float = 1e-6
    max_iter: int = 10_000
    max_backtracks: int = 40
    keep_trace: bool = True

    def validate(self):
        self.fb.validate()
        if self.tol <= 0:
            raise ConfigError(f"tol must be positive, got {self.tol}")
        if self.max_backtracks < 1:
            raise ConfigError("max_backtracks must be at least 1")


@dataclass
class IterRow:
    """One row of the solve trace.

    ``merit`` is the value the linesearch works with, at the iterate
    entering the pass (the objective at the prox point for the merit
    solvers, the envelope value for the envelope solvers).  Counter fields
    are cumulative at the end of the pass, so consecutive differences are
    the per-iteration oracle costs.  ``tau`` is None on rows that accepted
    no step (initialization and termination); ``tau == 0`` marks the
    proximal-gradient fallback.
    """

    k: int
    gamma: float
    sigma: float
    lipschitz: float
    merit: float
    r_nat_sq: float
    r_nat_inf: float
    tau: float | None
    backtracks: int
    restarts: int
    n_f: int
    n_grad: int
    n_prox: int
    n_g: int
    n_matvec: int


@dataclass
class SolveResult:
    x_final: np.ndarray
    phi_final: float
    residual_inf: float
    iterations: int
    counters: EvalCounters
    status: Status
    trace: list[IterRow]
    solver: str
    backtracks_total: int = 0
    restarts_total: int = 0
    gamma_final: float = 0.0
    lipschitz_final: float = 0.0
    sigma_final: float = 0.0
    grad_final: np.ndarray | None = None


_SLACK = 1e-12


def _decrease_slack(merit: float) -> float:
    return _SLACK * max(1.0, abs(merit))


def _row(k, fb, merit, r_sq, r_inf, tau, backtracks, restarts, counters) -> IterRow:
    return IterRow(k=k, gamma=fb.gamma, sigma=fb.sigma, lipschitz=fb.lipschitz,
                   merit=merit, r_nat_sq=r_sq, r_nat_inf=r_inf, tau=tau,
                   backtracks=backtracks, restarts=restarts,
                   n_f=counters.n_f, n_grad=counters.n_grad, n_prox=counters.n_prox,
                   n_g=counters.n_g, n_matvec=counters.n_matvec)


# ---------------------------------------------------------------------------
# Merit-based solver (prox-composed objective) and plain PG
# ---------------------------------------------------------------------------

def panoc_plus_solve(problem: CompositeProblem, x0: np.ndarray, params: SolveParams,
                     provider: DirectionProvider | None = None) -> SolveResult:
    """Proximal linesearch with the gradient-free merit, two gradients per pass.

    Per pass: gradient at the prox point, forward-backward step with the
    adaptive Lipschitz rule (restarts reuse the cached gradient), gradient
    at the new prox image for the normal residual driving the direction
    provider, termination test, then backtracking over candidates
    ``forward point + tau * direction`` whose prox points must decrease the
    objective by ``sigma * ||natural residual||^2``.  When the candidate
    grid is exhausted the forward point itself is accepted (a plain
    proximal-gradient step, whose decrease the adaptive rule guarantees)
    before failure is reported.
    """
    params.validate()
    if provider is None:
        provider = LbfgsDirections(memory=10)
    fb = replace(params.fb)
    counters = EvalCounters()
    prob = counted_oracle(problem, counters)
    t0 = time.perf_counter()

    x_hat, g_hat = prob.proximable.prox(np.asarray(x0, dtype=float), fb.gamma)
    f_hat = prob.smooth.f(x_hat)
    phi = f_hat + g_hat

    trace: list[IterRow] = []
    if params.keep_trace:
        trace.append(_row(0, fb, phi, np.nan, np.nan, None, 0, 0, counters))

    status = Status.MAX_ITER
    iterations = 0
    backtracks_total = 0
    restarts_total = 0
    r_inf = np.inf
    prev_point = prev_res = None
    grad_final = None

    if not np.isfinite(phi):
        status = Status.DIVERGED

    while status is Status.MAX_ITER and iterations < params.max_iter:
        iterations += 1
        grad_hat = prob.smooth.grad(x_hat)
        st = adaptive_update(fb, x_hat, f_hat, grad_hat, prob)
        fb = st.params
        restarts_total += st.n_updates
        x_bar, p, g_p, f_p = st.x_bar, st.p, st.g_at_p, st.f_at_p
        if not np.isfinite(f_p + g_p):
            status = Status.DIVERGED
            if params.keep_trace:
                trace.append(_row(iterations, fb, phi, np.nan, np.nan, None, 0,
                                  st.n_updates, counters))
            break

        r_nat = (x_hat - p) / fb.gamma
        r_sq = float(r_nat @ r_nat)
        r_inf = float(np.max(np.abs(r_nat))) if r_nat.size else 0.0
        grad_p = prob.smooth.grad(p)
        r_nor = grad_p + (x_bar - p) / fb.gamma

        if prev_point is None:
            provider.initialize(x_bar, r_nor)
        else:
            provider.update(x_bar - prev_point, r_nor - prev_res)
        prev_point, prev_res = x_bar, r_nor

        if r_inf <= params.tol:
            status = Status.CONVERGED
            grad_final = grad_hat
            if params.keep_trace:
                trace.append(_row(iterations, fb, phi, r_sq, r_inf, None, 0,
                                  st.n_updates, counters))
            break

        state = FbState(x_hat=x_hat, x_bar=x_bar, grad_x_hat=grad_hat, p=p,
                        g_at_p=g_p, f_at_p=f_p, grad_at_p=grad_p, r_nat=r_nat,
                        r_nor=r_nor, phi_x_hat=phi, gamma=fb.gamma)
        d = provider.direction(r_nor, state)
        if d is None:
            d = np.zeros_like(r_nor)

        # the machine-precision slack keeps the test meaningful once the
        # true decrease shrinks below rounding noise in phi
        target = phi - fb.sigma * r_sq + _decrease_slack(phi)
        tau = 1.0
        backtracks = 0
        accepted = False
        tau_used = None
        x_new = f_new = g_new = None
        for _ in range(params.max_backtracks):
            step = tau * d
            if not step.any():
                # candidate is the forward point itself; its prox image and
                # objective pieces are already in hand
                if f_p + g_p <= target:
                    x_new, f_new, g_new = p, f_p, g_p
                    accepted, tau_used = True, tau
                break
            cand_hat, cand_g = prob.proximable.prox(x_bar + step, fb.gamma)
            cand_f = prob.smooth.f(cand_hat)
            if np.isfinite(cand_f + cand_g) and cand_f + cand_g <= target:
                x_new, f_new, g_new = cand_hat, cand_f, cand_g
                accepted, tau_used = True, tau
                break
            tau *= fb.beta
            backtracks += 1
        if not accepted:
            # proximal-gradient fallback: guaranteed decrease up to rounding
            if f_p + g_p <= target:
                x_new, f_new, g_new = p, f_p, g_p
                accepted, tau_used = True, 0.0
            else:
                status = Status.LINESEARCH_FAILED
                backtracks_total += backtracks
                if params.keep_trace:
                    trace.append(_row(iterations, fb, phi, r_sq, r_inf, None,
                                      backtracks, st.n_updates, counters))
                break

        backtracks_total += backtracks
        if params.keep_trace:
            trace.append(_row(iterations, fb, phi, r_sq, r_inf, tau_used,
                              backtracks, st.n_updates, counters))
        x_hat, f_hat, g_hat = x_new, f_new, g_new
        phi = f_new + g_new
        if not np.isfinite(phi):
            status = Status.DIVERGED
            break

    counters.wall_time = time.perf_counter() - t0
    return SolveResult(x_final=x_hat, phi_final=phi, residual_inf=r_inf,
                       iterations=iterations, counters=counters, status=status,
                       trace=trace, solver="panocpp",
                       backtracks_total=backtracks_total,
                       restarts_total=restarts_total, gamma_final=fb.gamma,
                       lipschitz_final=fb.lipschitz, sigma_final=fb.sigma,
                       grad_final=grad_final)


def pg_solve(problem: CompositeProblem, x0: np.ndarray, params: SolveParams) -> SolveResult:
    """Plain proximal-gradient iteration, one gradient per pass.

    Starts from the prox image of ``x0`` and applies the same adaptive
    stepsize rule and stopping test as the linesearch solvers, so its
    iterates coincide bit-for-bit with the merit solver driven by the zero
    direction.
    """
    params.validate()
    fb = replace(params.fb)
    counters = EvalCounters()
    prob = counted_oracle(problem, counters)
    t0 = time.perf_counter()

    x_hat, g_hat = prob.proximable.prox(np.asarray(x0, dtype=float), fb.gamma)
    f_hat = prob.smooth.f(x_hat)
    phi = f_hat + g_hat

    trace: list[IterRow] = []
    if params.keep_trace:
        trace.append(_row(0, fb, phi, np.nan, np.nan, None, 0, 0, counters))

    status = Status.MAX_ITER
    iterations = 0
    restarts_total = 0
    r_inf = np.inf
    grad_final = None
    if not np.isfinite(phi):
        status = Status.DIVERGED

    while status is Status.MAX_ITER and iterations < params.max_iter:
        iterations += 1
        grad_hat = prob.smooth.grad(x_hat)
        st = adaptive_update(fb, x_hat, f_hat, grad_hat, prob)
        fb = st.params
        restarts_total += st.n_updates
        p, g_p, f_p = st.p, st.g_at_p, st.f_at_p
        if not np.isfinite(f_p + g_p):
            status = Status.DIVERGED
            if params.keep_trace:
                trace.append(_row(iterations, fb, phi, np.nan, np.nan, None, 0,
                                  st.n_updates, counters))
            break
        r_nat = (x_hat - p) / fb.gamma
        r_sq = float(r_nat @ r_nat)
        r_inf = float(np.max(np.abs(r_nat))) if r_nat.size else 0.0
        if r_inf <= params.tol:
            status = Status.CONVERGED
            grad_final = grad_hat
            if params.keep_trace:
                trace.append(_row(iterations, fb, phi, r_sq, r_inf, None, 0,
                                  st.n_updates, counters))
            break
        if params.keep_trace:
            trace.append(_row(iterations, fb, phi, r_sq, r_inf, 1.0, 0,
                              st.n_updates, counters))
        x_hat, f_hat, g_hat = p, f_p, g_p
        phi = f_p + g_p

    counters.wall_time = time.perf_counter() - t0
    return SolveResult(x_final=x_hat, phi_final=phi, residual_inf=r_inf,
                       iterations=iterations, counters=counters, status=status,
                       trace=trace, solver="pg", restarts_total=restarts_total,
                       gamma_final=fb.gamma, lipschitz_final=fb.lipschitz,
                       sigma_final=fb.sigma, grad_final=grad_final)


# ---------------------------------------------------------------------------
# Envelope-based baselines
# ---------------------------------------------------------------------------

@dataclass
class _FbeData:
    """Forward-backward envelope pieces cached at one iterate."""

    x: np.ndarray
    f_x: float
    grad_x: np.ndarray
    z: np.ndarray          # forward point x - gamma grad
    x_bar: np.ndarray      # prox(z)
    g_xbar: float
    r_nat: np.ndarray
    val: float             # envelope value


def _fbe_assemble(x, f_x, grad_x, z, x_bar, g_xbar, gamma) -> _FbeData:
    r_nat = (x - x_bar) / gamma
    val = (f_x + g_xbar - gamma * float(grad_x @ r_nat)
           + 0.5 * gamma * float(r_nat @ r_nat))
    return _FbeData(x=x, f_x=f_x, grad_x=grad_x, z=z, x_bar=x_bar,
                    g_xbar=g_xbar, r_nat=r_nat, val=val)


def _fbe_refresh(prob, x, f_x, grad_x, gamma) -> _FbeData:
    """Rebuild the gamma-dependent envelope pieces, reusing f and gradient."""
    z = x - gamma * grad_x
    x_bar, g_xbar = prob.proximable.prox(z, gamma)
    return _fbe_assemble(x, f_x, grad_x, z, x_bar, g_xbar, gamma)


def _fbe_eval(prob, x, gamma) -> _FbeData:
    """Full envelope evaluation: one f, one gradient, one prox."""
    f_x = prob.smooth.f(x)
    grad_x = prob.smooth.grad(x)
    return _fbe_refresh(prob, x, f_x, grad_x, gamma)


def _fbe_adaptive(prob, data: _FbeData, fb: FbParams, max_updates: int = 60):
    """Adaptive Lipschitz rule between the iterate and its prox target.

    Returns updated params, refreshed data, f at the prox target (reusable),
    and the number of stepsize updates.  Costs one f evaluation per check
    and one prox per update; the gradient is always reused.
    """
    from .fbstep import LipschitzOverflowError

    n_updates = 0
    guard = 10.0 * np.finfo(float).eps * max(1.0, abs(data.f_x))
    while True:
        f_xbar = prob.smooth.f(data.x_bar)
        if not fb.adaptive:
            break
        diff = data.x - data.x_bar
        bound = (data.f_x - float(data.grad_x @ diff)
                 + 0.5 * fb.lipschitz * float(diff @ diff))
        if f_xbar <= bound + guard:
            break
        fb = fb.scaled()
        n_updates += 1
        if n_updates > max_updates:
            raise LipschitzOverflowError(
                f"Lipschitz estimate exceeded {fb.lipschitz:.3e} after "
                f"{max_updates} updates; f may not be Lipschitz smooth here")
        data = _fbe_refresh(prob, data.x, data.f_x, data.grad_x, fb.gamma)
    return fb, data, f_xbar, n_updates


def _validate_fbe_params(fb: FbParams):
    if fb.gamma * fb.lipschitz >= 1.0:
        raise ConfigError(
            f"envelope solvers need gamma < 1/L; got gamma*L = {fb.gamma * fb.lipschitz}")
    if fb.sigma >= fb.sigma_upper_fbe():
        raise ConfigError(
            f"envelope solvers need sigma < gamma(1 - gamma L)/2 = {fb.sigma_upper_fbe()}")


def zerofpr_solve(problem: CompositeProblem, x0: np.ndarray, params: SolveParams,
                  provider: DirectionProvider | None = None) -> SolveResult:
    """Envelope linesearch with candidates ``prox point + tau * direction``.

    Directions come from the natural residual evaluated at the prox point,
    which costs a gradient and a prox per pass on top of the envelope data;
    every backtracking candidate requires a full envelope evaluation (one
    gradient, one prox, one f), and the accepted candidate's evaluation is
    reused as the next iterate's cached data.
    """
    params.validate()
    _validate_fbe_params(params.fb)
    if provider is None:
        provider = LbfgsDirections(memory=10)
    fb = replace(params.fb)
    counters = EvalCounters()
    prob = counted_oracle(problem, counters)
    t0 = time.perf_counter()

    data = _fbe_eval(prob, np.asarray(x0, dtype=float), fb.gamma)

    trace: list[IterRow] = []
    if params.keep_trace:
        trace.append(_row(0, fb, data.val, np.nan, np.nan, None, 0, 0, counters))

    status = Status.MAX_ITER
    iterations = 0
    backtracks_total = 0
    restarts_total = 0
    r_inf = np.inf
    prev_point = prev_res = None
    x_final = data.x_bar
    phi_final = np.nan
    grad_final = None

    if not np.isfinite(data.val):
        status = Status.DIVERGED

    while status is Status.MAX_ITER and iterations < params.max_iter:
        iterations += 1
        fb, data, f_xbar, n_up = _fbe_adaptive(prob, data, fb)
        restarts_total += n_up
        if not np.isfinite(data.val):
            status = Status.DIVERGED
            if params.keep_trace:
                trace.append(_row(iterations, fb, data.val, np.nan, np.nan, None,
                                  0, n_up, counters))
            break

        # residual at the prox point: drives directions and the stopping test
        grad_bar = prob.smooth.grad(data.x_bar)
        z2 = data.x_bar - fb.gamma * grad_bar
        w, g_w = prob.proximable.prox(z2, fb.gamma)
        r_bar = (data.x_bar - w) / fb.gamma
        r_bar_inf = float(np.max(np.abs(r_bar))) if r_bar.size else 0.0

        if prev_point is None:
            provider.initialize(data.x_bar, r_bar)
        else:
            provider.update(data.x_bar - prev_point, r_bar - prev_res)
        prev_point, prev_res = data.x_bar, r_bar

        if r_bar_inf <= params.tol:
            status = Status.CONVERGED
            r_inf = r_bar_inf
            x_final = data.x_bar
            phi_final = f_xbar + data.g_xbar
            grad_final = grad_bar
            if params.keep_trace:
                trace.append(_row(iterations, fb, data.val,
                                  float(r_bar @ r_bar), r_bar_inf, None, 0,
                                  n_up, counters))
            break

        d = provider.direction(r_bar)
        if d is None:
            d = np.zeros_like(r_bar)

        r_sq = float(data.r_nat @ data.r_nat)
        r_inf = r_bar_inf
        target = data.val - fb.sigma * r_sq + _decrease_slack(data.val)
        tau = 1.0
        backtracks = 0
        accepted = False
        tau_used = None
        new_data = None
        bar_data = None  # envelope data at the prox point, built from cached pieces

        def data_at_prox_point():
            nonlocal bar_data
            if bar_data is None:
                bar_data = _fbe_assemble(data.x_bar, f_xbar, grad_bar, z2, w,
                                         g_w, fb.gamma)
            return bar_data

        for _ in range(params.max_backtracks):
            step = tau * d
            if not step.any():
                cd = data_at_prox_point()
                if cd.val <= target:
                    new_data, accepted, tau_used = cd, True, tau
                break
            cd = _fbe_eval(prob, data.x_bar + step, fb.gamma)
            if np.isfinite(cd.val) and cd.val <= target:
                new_data, accepted, tau_used = cd, True, tau
                break
            tau *= fb.beta
            backtracks += 1
        if not accepted:
            cd = data_at_prox_point()
            if cd.val <= target:
                new_data, accepted, tau_used = cd, True, 0.0
            else:
                status = Status.LINESEARCH_FAILED
                backtracks_total += backtracks
                x_final, phi_final = data.x_bar, f_xbar + data.g_xbar
                if params.keep_trace:
                    trace.append(_row(iterations, fb, data.val, r_sq, r_bar_inf,
                                      None, backtracks, n_up, counters))
                break

        backtracks_total += backtracks
        if params.keep_trace:
            trace.append(_row(iterations, fb, data.val, r_sq, r_bar_inf,
                              tau_used, backtracks, n_up, counters))
        data = new_data
        x_final = data.x_bar
        if not np.isfinite(data.val):
            status = Status.DIVERGED

    if not np.isfinite(phi_final) and status is not Status.CONVERGED:
        phi_final = data.f_x + data.g_xbar  # envelope pieces; best available
    counters.wall_time = time.perf_counter() - t0
    return SolveResult(x_final=x_final, phi_final=phi_final, residual_inf=r_inf,
                       iterations=iterations, counters=counters, status=status,
                       trace=trace, solver="zerofpr",
                       backtracks_total=backtracks_total,
                       restarts_total=restarts_total, gamma_final=fb.gamma,
                       lipschitz_final=fb.lipschitz, sigma_final=fb.sigma,
                       grad_final=grad_final)


def panoc_solve(problem: CompositeProblem, x0: np.ndarray, params: SolveParams,
                provider: DirectionProvider | None = None) -> SolveResult:
    """Envelope linesearch with convex-combination candidates.

    Candidates interpolate between the prox point (tau -> 0) and iterate +
    direction (tau = 1).  Directions come from the natural residual at the
    iterate, which the cached envelope data provides for free, so only the
    candidates' own forward-backward steps spend oracle calls; the accepted
    candidate's evaluation carries over to the next iteration.
    """
    params.validate()
    _validate_fbe_params(params.fb)
    if provider is None:
        provider = LbfgsDirections(memory=10)
    fb = replace(params.fb)
    counters = EvalCounters()
    prob = counted_oracle(problem, counters)
    t0 = time.perf_counter()

    data = _fbe_eval(prob, np.asarray(x0, dtype=float), fb.gamma)

    trace: list[IterRow] = []
    if params.keep_trace:
        trace.append(_row(0, fb, data.val, np.nan, np.nan, None, 0, 0, counters))

    status = Status.MAX_ITER
    iterations = 0
    backtracks_total = 0
    restarts_total = 0
    r_inf = np.inf
    prev_point = prev_res = None
    x_final = data.x_bar
    phi_final = np.nan

    if not np.isfinite(data.val):
        status = Status.DIVERGED

    while status is Status.MAX_ITER and iterations < params.max_iter:
        iterations += 1
        fb, data, f_xbar, n_up = _fbe_adaptive(prob, data, fb)
        restarts_total += n_up
        if not np.isfinite(data.val):
            status = Status.DIVERGED
            if params.keep_trace:
                trace.append(_row(iterations, fb, data.val, np.nan, np.nan, None,
                                  0, n_up, counters))
            break

        r_sq = float(data.r_nat @ data.r_nat)
        r_inf = float(np.max(np.abs(data.r_nat))) if data.r_nat.size else 0.0

        if prev_point is None:
            provider.initialize(data.x, data.r_nat)
        else:
            provider.update(data.x - prev_point, data.r_nat - prev_res)
        prev_point, prev_res = data.x, data.r_nat

        if r_inf <= params.tol:
            status = Status.CONVERGED
            x_final = data.x_bar
            phi_final = f_xbar + data.g_xbar
            if params.keep_trace:
                trace.append(_row(iterations, fb, data.val, r_sq, r_inf, None,
                                  0, n_up, counters))
            break

        d = provider.direction(data.r_nat)
        if d is None:
            d = np.zeros_like(data.r_nat)

        target = data.val - fb.sigma * r_sq + _decrease_slack(data.val)
        endpoint = data.x + d  # tau = 1 candidate
        tau = 1.0
        backtracks = 0
        accepted = False
        tau_used = None
        new_data = None
        for _ in range(params.max_backtracks):
            cand = (1.0 - tau) * data.x_bar + tau * endpoint
            cd = _fbe_eval(prob, cand, fb.gamma)
            if np.isfinite(cd.val) and cd.val <= target:
                new_data, accepted, tau_used = cd, True, tau
                break
            tau *= fb.beta
            backtracks += 1
        if not accepted:
            cd = _fbe_eval(prob, data.x_bar, fb.gamma)
            if cd.val <= target:
                new_data, accepted, tau_used = cd, True, 0.0
            else:
                status = Status.LINESEARCH_FAILED
                backtracks_total += backtracks
                x_final, phi_final = data.x_bar, f_xbar + data.g_xbar
                if params.keep_trace:
                    trace.append(_row(iterations, fb, data.val, r_sq, r_inf,
                                      None, backtracks, n_up, counters))
                break

        backtracks_total += backtracks
        if params.keep_trace:
            trace.append(_row(iterations, fb, data.val, r_sq, r_inf, tau_used,
                              backtracks, n_up, counters))
        data = new_data
        x_final = data.x_bar
        if not np.isfinite(data.val):
            status = Status.DIVERGED

    if not np.isfinite(phi_final) and status is not Status.CONVERGED:
        phi_final = data.f_x + data.g_xbar
    counters.wall_time = time.perf_counter() - t0
    return SolveResult(x_final=x_final, phi_final=phi_final, residual_inf=r_inf,
                       iterations=iterations, counters=counters, status=status,
                       trace=trace, solver="panoc",
                       backtracks_total=backtracks_total,
                       restarts_total=restarts_total, gamma_final=fb.gamma,
                       lipschitz_final=fb.lipschitz, sigma_final=fb.sigma)


# ---------------------------------------------------------------------------
# Dispatch helpers
# ---------------------------------------------------------------------------

SOLVER_KINDS = ("panocpp", "zerofpr", "panoc", "pg")


def default_fb_params(kind: str, lipschitz: float, adaptive: bool = True) -> FbParams:
    """Stepsize defaults per solver: 1.95/L for the merit solvers and plain
    PG, 0.95/L for the envelope baselines."""
    if kind in ("panocpp", "pg"):
        return FbParams.from_lipschitz(lipschitz, adaptive=adaptive)
    if kind in ("zerofpr", "panoc"):
        return FbParams.from_lipschitz_fbe(lipschitz, adaptive=adaptive)
    raise ConfigError(f"unknown solver kind {kind!r}; expected one of {SOLVER_KINDS}")


def solve(problem: CompositeProblem, x0: np.ndarray, kind: str, params: SolveParams,
          provider: DirectionProvider | None = None) -> SolveResult:
    if kind == "panocpp":
        return panoc_plus_solve(problem, x0, params, provider)
    if kind == "zerofpr":
        return zerofpr_solve(problem, x0, params, provider)
    if kind == "panoc":
        return panoc_solve(problem, x0, params, provider)
    if kind == "pg":
        return pg_solve(problem, x0, params)
    raise ConfigError(f"unknown solver kind {kind!r}; expected one of {SOLVER_KINDS}")
