"""Discrete-time optimal control via single shooting.

An OCP with dynamics z+ = dyn(z, u), quadratic stage/terminal costs, input
bounds, and box-bounded state constraints c(z) is condensed into an NLP
over the stacked input sequence: states are rolled out from the inputs,
the cost gradient comes from one reverse (adjoint) sweep, and the
constraint map stacks c along the trajectory with its transposed Jacobian
products computed by the same adjoint recursion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..alm import NlpProblem
from ..oracles import Box, ConfigError, SmoothOracle


@dataclass
class OcpProblem:
    """Single system rollout problem.

    Derivative callables return dense Jacobians: ``dyn_jac_z`` is d(dyn)/dz
    of shape (n_z, n_z), ``dyn_jac_u`` d(dyn)/du of shape (n_z, n_u), and
    ``constraint_jac`` dc/dz of shape (n_c, n_z).
    """

    horizon: int
    n_z: int
    n_u: int
    dyn: callable
    dyn_jac_z: callable
    dyn_jac_u: callable
    stage_q: np.ndarray        # state weight (n_z, n_z)
    stage_r: np.ndarray        # input weight (n_u, n_u)
    terminal_q: np.ndarray
    z_goal: np.ndarray
    input_box: Box
    constraint: callable
    constraint_jac: callable
    n_c: int
    constraint_box: Box
    z0: np.ndarray

    @property
    def n_inputs_total(self) -> int:
        return self.n_u * self.horizon

    def rollout(self, u_seq: np.ndarray) -> np.ndarray:
        """Trajectory (horizon + 1, n_z) from the stacked input vector."""
        u = np.asarray(u_seq, dtype=float).reshape(self.horizon, self.n_u)
        traj = np.empty((self.horizon + 1, self.n_z))
        traj[0] = self.z0
        for k in range(self.horizon):
            traj[k + 1] = self.dyn(traj[k], u[k])
        return traj

    def stage_cost(self, z, u) -> float:
        dz = z - self.z_goal
        return 0.5 * float(dz @ (self.stage_q @ dz)) + 0.5 * float(u @ (self.stage_r @ u))

    def terminal_cost(self, z) -> float:
        dz = z - self.z_goal
        return 0.5 * float(dz @ (self.terminal_q @ dz))


class _ShootingCost(SmoothOracle):
    """Rollout cost with adjoint gradient; caches the latest trajectory."""

    def __init__(self, ocp: OcpProblem):
        self.ocp = ocp
        self.dim = ocp.n_inputs_total
        self._cache: tuple[np.ndarray, np.ndarray] | None = None

    def trajectory(self, u_seq: np.ndarray) -> np.ndarray:
        cached = self._cache
        if cached is not None and np.array_equal(cached[0], u_seq):
            return cached[1]
        traj = self.ocp.rollout(u_seq)
        self._cache = (np.array(u_seq, copy=True), traj)
        return traj

    def f(self, x):
        ocp = self.ocp
        traj = self.trajectory(x)
        u = np.asarray(x, dtype=float).reshape(ocp.horizon, ocp.n_u)
        total = sum(ocp.stage_cost(traj[k], u[k]) for k in range(ocp.horizon))
        return total + ocp.terminal_cost(traj[-1])

    def grad(self, x):
        ocp = self.ocp
        traj = self.trajectory(x)
        u = np.asarray(x, dtype=float).reshape(ocp.horizon, ocp.n_u)
        grad_u = np.empty_like(u)
        lam = ocp.terminal_q @ (traj[-1] - ocp.z_goal)
        for k in range(ocp.horizon - 1, -1, -1):
            grad_u[k] = ocp.stage_r @ u[k] + ocp.dyn_jac_u(traj[k], u[k]).T @ lam
            lam = ocp.stage_q @ (traj[k] - ocp.z_goal) + ocp.dyn_jac_z(traj[k], u[k]).T @ lam
        return grad_u.ravel()


def ocp_single_shooting(ocp: OcpProblem) -> NlpProblem:
    """Condense the OCP into an NLP over the stacked inputs.

    Constraints stack c(z_1) .. c(z_N); input bounds tile along the
    horizon.  The transposed constraint-Jacobian product reuses the cost
    oracle's trajectory cache, so an objective evaluation followed by a
    constraint evaluation at the same inputs rolls the dynamics out once.
    """
    cost = _ShootingCost(ocp)
    N, n_u, n_c = ocp.horizon, ocp.n_u, ocp.n_c

    def constraint(u_seq):
        traj = cost.trajectory(np.asarray(u_seq, dtype=float))
        if n_c == 0:
            return np.zeros(0)
        return np.concatenate([ocp.constraint(traj[k]) for k in range(1, N + 1)])

    def constraint_jtvp(u_seq, w):
        u_seq = np.asarray(u_seq, dtype=float)
        traj = cost.trajectory(u_seq)
        u = u_seq.reshape(N, n_u)
        w = np.asarray(w, dtype=float).reshape(N, n_c)
        out = np.empty((N, n_u))
        mu = ocp.constraint_jac(traj[N]).T @ w[N - 1]
        for k in range(N - 1, -1, -1):
            out[k] = ocp.dyn_jac_u(traj[k], u[k]).T @ mu
            if k > 0:
                mu = (ocp.constraint_jac(traj[k]).T @ w[k - 1]
                      + ocp.dyn_jac_z(traj[k], u[k]).T @ mu)
        return out.ravel()

    var_box = Box(np.tile(ocp.input_box.lo, N), np.tile(ocp.input_box.hi, N))
    con_box = Box(np.tile(ocp.constraint_box.lo, N), np.tile(ocp.constraint_box.hi, N))
    return NlpProblem(cost=cost, constraint=constraint,
                      constraint_jtvp=constraint_jtvp, n_constraints=n_c * N,
                      var_box=var_box, constraint_box=con_box)


# ---------------------------------------------------------------------------
# Kinematic bicycle in an S-shaped corridor
# ---------------------------------------------------------------------------

@dataclass
class BicycleConfig:
    """Desk-scale corridor-following setup; every value is adjustable.

    State (px, py, heading, speed), inputs (acceleration, steering angle),
    explicit-Euler discretization.  The corridor centerline is the smooth
    S-curve ``amp * tanh(slope * (px - center))`` and the lateral offset
    from it is box-bounded by the half width.
    """

    horizon: int = 32
    dt: float = 0.05
    wheelbase: float = 0.5
    half_width: float = 0.3
    s_amplitude: float = 0.7
    s_slope: float = 2.0
    s_center: float = 2.0
    accel_limit: float = 1.0
    steer_limit: float = 0.6
    goal_x: float = 4.0
    state_weight: float = 10.0
    terminal_weight: float = 100.0
    input_weight: float = 0.1
    start_x: float = 0.0

    def validate(self):
        if self.horizon < 2:
            raise ConfigError(f"horizon must be at least 2, got {self.horizon}")
        if self.half_width <= 0:
            raise ConfigError(f"corridor half width must be positive, got {self.half_width}")
        if self.dt <= 0 or self.wheelbase <= 0:
            raise ConfigError("dt and wheelbase must be positive")

    def centerline(self, px: float) -> float:
        return self.s_amplitude * math.tanh(self.s_slope * (px - self.s_center))

    def centerline_slope(self, px: float) -> float:
        t = math.tanh(self.s_slope * (px - self.s_center))
        return self.s_amplitude * self.s_slope * (1.0 - t * t)


def make_bicycle_mpc(config: BicycleConfig | None = None,
                     z0: np.ndarray | None = None) -> OcpProblem:
    """Corridor-following bicycle OCP; genuinely nonconvex but desk-sized."""
    cfg = config or BicycleConfig()
    cfg.validate()
    dt, lwb = cfg.dt, cfg.wheelbase

    def dyn(z, u):
        px, py, th, v = z
        a, steer = u
        return np.array([
            px + dt * v * math.cos(th),
            py + dt * v * math.sin(th),
            th + dt * (v / lwb) * math.tan(steer),
            v + dt * a,
        ])

    def dyn_jac_z(z, u):
        _, _, th, v = z
        _, steer = u
        return np.array([
            [1.0, 0.0, -dt * v * math.sin(th), dt * math.cos(th)],
            [0.0, 1.0, dt * v * math.cos(th), dt * math.sin(th)],
            [0.0, 0.0, 1.0, dt * math.tan(steer) / lwb],
            [0.0, 0.0, 0.0, 1.0],
        ])

    def dyn_jac_u(z, u):
        _, _, _, v = z
        _, steer = u
        sec2 = 1.0 / math.cos(steer) ** 2
        return np.array([
            [0.0, 0.0],
            [0.0, 0.0],
            [0.0, dt * (v / lwb) * sec2],
            [dt, 0.0],
        ])

    def corridor_offset(z):
        return np.array([z[1] - cfg.centerline(z[0])])

    def corridor_jac(z):
        return np.array([[-cfg.centerline_slope(z[0]), 1.0, 0.0, 0.0]])

    goal = np.array([cfg.goal_x, cfg.centerline(cfg.goal_x), 0.0, 0.0])
    pos_mask = np.diag([1.0, 1.0, 0.0, 0.0])
    start = np.array([cfg.start_x, cfg.centerline(cfg.start_x), 0.0, 0.0]) if z0 is None \
        else np.asarray(z0, dtype=float)

    return OcpProblem(
        horizon=cfg.horizon, n_z=4, n_u=2,
        dyn=dyn, dyn_jac_z=dyn_jac_z, dyn_jac_u=dyn_jac_u,
        stage_q=cfg.state_weight * pos_mask,
        stage_r=cfg.input_weight * np.eye(2),
        terminal_q=cfg.terminal_weight * pos_mask,
        z_goal=goal,
        input_box=Box(np.array([-cfg.accel_limit, -cfg.steer_limit]),
                      np.array([cfg.accel_limit, cfg.steer_limit])),
        constraint=corridor_offset, constraint_jac=corridor_jac, n_c=1,
        constraint_box=Box(np.array([-cfg.half_width]), np.array([cfg.half_width])),
        z0=start,
    )
