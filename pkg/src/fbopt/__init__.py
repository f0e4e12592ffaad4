"""Composite minimization with forward-backward linesearch solvers.

Minimize phi = f + g from a smooth oracle f and a proximable oracle g.
The flagship solver backtracks on the objective evaluated at prox points
only (two gradients per iteration, stepsizes up to 2/L); envelope-based
baselines, a plain proximal-gradient loop, an augmented-Lagrangian outer
loop for constrained NLPs, problem front-ends, and a benchmarking harness
round out the package.
"""

from .alm import (AlmConfig, AlmResult, AlmState, NlpProblem, alm_inner_problem,
                  alm_solve, shifted_multipliers)
from .directions import (DirectionProvider, LbfgsBuffer, LbfgsDirections,
                         StructuredNewtonBox, ZeroDirections, lbfgs_direction,
                         lbfgs_push, structured_newton_box)
from .fbstep import (AdaptiveStep, FbParams, FbState, LipschitzOverflowError,
                     adaptive_update, fbe, fd_jacobian, merit_psi,
                     natural_residual, normal_residual,
                     normal_residual_jacobian_fd, pg_step)
from .oracles import (Box, BoxIndicator, CompositeProblem, ConfigError,
                      EvalCounters, L1Norm, LeastSquares, ProxOracle, Quadratic,
                      SmoothFunction, SmoothOracle, ZeroFunction, counted_oracle,
                      prox_box, prox_l1, weighted_sq_dist_to_box)
from .solvers import (SOLVER_KINDS, IterRow, SolveParams, SolveResult, Status,
                      default_fb_params, panoc_plus_solve, panoc_solve, pg_solve,
                      solve, zerofpr_solve)

__version__ = "0.1.0"

__all__ = [
    "AdaptiveStep", "AlmConfig", "AlmResult", "AlmState", "Box", "BoxIndicator",
    "CompositeProblem", "ConfigError", "DirectionProvider", "EvalCounters",
    "FbParams", "FbState", "IterRow", "L1Norm", "LbfgsBuffer", "LbfgsDirections",
    "LeastSquares", "LipschitzOverflowError", "NlpProblem", "ProxOracle",
    "Quadratic", "SOLVER_KINDS", "SmoothFunction", "SmoothOracle", "SolveParams",
    "SolveResult", "Status", "StructuredNewtonBox", "ZeroDirections",
    "ZeroFunction", "adaptive_update", "alm_inner_problem", "alm_solve",
    "counted_oracle", "default_fb_params", "fbe", "fd_jacobian",
    "lbfgs_direction", "lbfgs_push", "merit_psi", "natural_residual",
    "normal_residual", "normal_residual_jacobian_fd", "panoc_plus_solve",
    "panoc_solve", "pg_solve", "pg_step", "prox_box", "prox_l1",
    "shifted_multipliers", "solve", "structured_newton_box",
    "weighted_sq_dist_to_box", "zerofpr_solve",
]
