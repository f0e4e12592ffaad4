"""Run matrices of (problem, solver) pairs and MPC closed-loop simulations."""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..alm import AlmConfig, alm_solve
from ..directions import LbfgsDirections
from ..oracles import CompositeProblem
from ..problems.ocp import BicycleConfig, make_bicycle_mpc, ocp_single_shooting
from ..solvers import SolveParams, default_fb_params, solve
from .records import RunRecord


@dataclass
class BenchProblem:
    """One benchmark entry: a composite problem with its metadata."""

    problem_id: str
    problem: CompositeProblem
    lipschitz: float
    x0: np.ndarray


@dataclass
class RunConfig:
    tol: float = 1e-6
    max_iter: int = 50_000
    lbfgs_memory: int = 10
    adaptive: bool = True
    jobs: int = 1
    seed: int = 0

    def hash(self) -> str:
        payload = json.dumps(self.__dict__, sort_keys=True, default=str)
        return hashlib.sha1(payload.encode()).hexdigest()[:12]


def run_single(entry: BenchProblem, solver_id: str, config: RunConfig) -> RunRecord:
    """One (problem, solver) run; exceptions become failure records."""
    try:
        fb = default_fb_params(solver_id, entry.lipschitz, adaptive=config.adaptive)
        params = SolveParams(fb=fb, tol=config.tol, max_iter=config.max_iter,
                             keep_trace=False)
        provider = LbfgsDirections(memory=config.lbfgs_memory)
        res = solve(entry.problem, entry.x0, solver_id, params, provider)
        c = res.counters
        return RunRecord(problem=entry.problem_id, solver=solver_id,
                         status=str(res.status), iters=res.iterations,
                         n_f=c.n_f, n_grad=c.n_grad, n_prox=c.n_prox,
                         n_matvec=c.n_matvec, wall_ms=1e3 * c.wall_time,
                         resid_inf=res.residual_inf, phi=res.phi_final,
                         config_hash=config.hash())
    except Exception as exc:  # noqa: BLE001 - a failed run must not abort the matrix
        return RunRecord(problem=entry.problem_id, solver=solver_id,
                         status=f"Error:{type(exc).__name__}", iters=0, n_f=0,
                         n_grad=0, n_prox=0, n_matvec=0, wall_ms=0.0,
                         resid_inf=float("nan"), phi=float("nan"),
                         config_hash=config.hash())


def run_matrix(problems: list[BenchProblem], solver_ids: list[str],
               config: RunConfig | None = None) -> list[RunRecord]:
    """Cartesian product of problems and solvers, each with fresh counters.

    Runs are independent (problems are read-only; counters live per run) so
    they may execute in parallel; records come back sorted regardless of
    completion order.
    """
    config = config or RunConfig()
    if not problems or not solver_ids:
        raise ValueError("need at least one problem and one solver")
    pairs = [(p, s) for p in problems for s in solver_ids]
    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            records = list(pool.map(lambda ps: run_single(ps[0], ps[1], config), pairs))
    else:
        records = [run_single(p, s, config) for p, s in pairs]
    records.sort(key=lambda r: (r.problem, r.solver))
    return records


# ---------------------------------------------------------------------------
# MPC closed loop
# ---------------------------------------------------------------------------

@dataclass
class MpcRunConfig:
    steps: int = 10
    warm_start: bool = False
    solvers: tuple[str, ...] = ("panocpp", "zerofpr", "panoc")
    alm: AlmConfig = field(default_factory=AlmConfig)

    def hash(self) -> str:
        payload = json.dumps({"steps": self.steps, "warm": self.warm_start,
                              "solvers": list(self.solvers),
                              "alm": self.alm.__dict__}, sort_keys=True, default=str)
        return hashlib.sha1(payload.encode()).hexdigest()[:12]


def shift_warm_start(u_prev: np.ndarray, n_u: int) -> np.ndarray:
    """Shift the previous input sequence one stage, repeating the last input."""
    return np.concatenate([u_prev[n_u:], u_prev[-n_u:]])


def run_mpc_closed_loop(bike_config: BicycleConfig, run_config: MpcRunConfig) -> list[RunRecord]:
    """Receding-horizon simulation of the bicycle corridor problem.

    At every simulated time step each solver re-solves the OCP from the
    current state; warm starts reuse the shifted previous solution, cold
    starts begin from zero inputs.  The plant always advances with the
    first solver's first input so all solvers see the same sequence of
    states.
    """
    records: list[RunRecord] = []
    chash = run_config.hash()
    states = {s: None for s in run_config.solvers}
    warm = {s: None for s in run_config.solvers}
    base = make_bicycle_mpc(bike_config)
    z_current = {s: base.z0.copy() for s in run_config.solvers}

    for step in range(run_config.steps):
        for solver_id in run_config.solvers:
            ocp = make_bicycle_mpc(bike_config, z0=z_current[solver_id])
            nlp = ocp_single_shooting(ocp)
            if run_config.warm_start and warm[solver_id] is not None:
                u0 = shift_warm_start(warm[solver_id], ocp.n_u)
            else:
                u0 = np.zeros(nlp.dim)
            alm_cfg = AlmConfig(**{**run_config.alm.__dict__, "solver": solver_id})
            res = alm_solve(nlp, u0, alm_cfg)
            warm[solver_id] = res.u
            c = res.counters
            inner_iters = sum(r.iterations for r in res.inner_results)
            records.append(RunRecord(
                problem=f"bicycle:t{step:02d}", solver=solver_id,
                status="Converged" if res.converged else "NotConverged",
                iters=inner_iters, n_f=c.n_f, n_grad=c.n_grad, n_prox=c.n_prox,
                n_matvec=c.n_matvec, wall_ms=1e3 * c.wall_time,
                resid_inf=max(res.primal_residual, res.dual_residual),
                phi=res.cost, config_hash=chash))
            # plant update: apply the first input of this solver's plan
            u_first = res.u[: ocp.n_u]
            z_current[solver_id] = ocp.dyn(z_current[solver_id], u_first)
    records.sort(key=lambda r: (r.problem, r.solver))
    return records
