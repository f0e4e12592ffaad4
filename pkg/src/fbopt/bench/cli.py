"""Command-line benchmark harness.

Verbs:

* ``solve``            one problem / one solver, summary on stdout
* ``bench logistic``   l1-regularized logistic regression over a lambda grid
* ``bench synthetic``  random lasso / box-QP matrix
* ``bench mpc``        bicycle corridor MPC closed loop (cold or warm starts)
* ``profile``          Dolan-More performance profile from a records CSV

Every flag can instead come from a ``key=value`` config file passed with
``--config``; explicit flags win over config values.  The environment
variable ``BENCH_SEED`` overrides the default seed.  Exit status is 0 when
all requested runs executed (converged or not) and nonzero on
configuration errors.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from ..alm import AlmConfig, alm_solve
from ..directions import LbfgsDirections
from ..oracles import ConfigError
from ..problems.libsvm import LibsvmParseError, parse_libsvm
from ..problems.logistic import (LogisticProblem, lambda_max, logistic_oracle,
                                 make_random_logistic)
from ..problems.ocp import BicycleConfig, make_bicycle_mpc, ocp_single_shooting
from ..problems.synthetic import make_box_qp, make_lasso
from ..solvers import SOLVER_KINDS, SolveParams, default_fb_params, solve
from .profiles import METRICS, performance_profile, write_profiles_csv
from .records import read_records_csv, write_records_csv, write_records_json
from .runner import BenchProblem, MpcRunConfig, RunConfig, run_matrix, run_mpc_closed_loop

LAMBDA_GRID = (0.01, 0.02, 0.05, 0.1, 0.2)


def _default_seed() -> int:
    return int(os.environ.get("BENCH_SEED", "0"))


def _parse_solvers(text: str) -> list[str]:
    solvers = [s.strip() for s in text.split(",") if s.strip()]
    for s in solvers:
        if s not in SOLVER_KINDS:
            raise ConfigError(f"unknown solver {s!r}; expected one of {SOLVER_KINDS}")
    if not solvers:
        raise ConfigError("empty solver list")
    return solvers


def _read_config_file(path: str) -> dict:
    values = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{path}:{line_no}: expected key=value, got {raw!r}")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _apply_config(parser: argparse.ArgumentParser, args: argparse.Namespace,
                  argv_tail: list[str]) -> argparse.Namespace:
    """Re-parse with config-file values as defaults (flags still win)."""
    if not getattr(args, "config", None):
        return args
    values = _read_config_file(args.config)
    known = {a.dest: a for a in parser._actions}
    defaults = {}
    for key, value in values.items():
        if key not in known:
            raise ConfigError(f"unknown config key {key!r}")
        action = known[key]
        if action.type is not None:
            value = action.type(value)
        elif isinstance(action.const, bool) or isinstance(action.default, bool):
            value = value.lower() in ("1", "true", "yes", "on")
        defaults[key] = value
    parser.set_defaults(**defaults)
    return parser.parse_args(argv_tail)


def _emit(records, out_path: str) -> None:
    out = Path(out_path)
    write_records_csv(records, out)
    write_records_json(records, out.with_suffix(".json"))
    print(f"wrote {len(records)} records to {out} (+ JSON mirror)")


# ---------------------------------------------------------------------------
# Subcommand implementations
# ---------------------------------------------------------------------------

def _cmd_solve(args) -> int:
    rng = np.random.default_rng(args.seed)
    if args.problem == "bicycle":
        nlp = ocp_single_shooting(make_bicycle_mpc(BicycleConfig(horizon=args.horizon)))
        cfg = AlmConfig(solver=args.solver, lbfgs_memory=args.lbfgs)
        res = alm_solve(nlp, np.zeros(nlp.dim), cfg)
        print(f"bicycle alm+{args.solver}: converged={res.converged} "
              f"outer={res.outer_iterations} cost={res.cost:.6g} "
              f"primal={res.primal_residual:.3e} dual={res.dual_residual:.3e} "
              f"n_f={res.counters.n_f} n_grad={res.counters.n_grad}")
        return 0

    if args.problem == "lasso":
        inst = make_lasso(m=args.m, n=args.n, seed=args.seed)
        problem, lipschitz = inst.problem(), inst.lipschitz
        x0 = rng.standard_normal(args.n)
    elif args.problem == "boxqp":
        inst = make_box_qp(n=args.n, seed=args.seed)
        problem, lipschitz = inst.problem(), inst.lipschitz
        x0 = rng.uniform(-2, 2, size=args.n)
    elif args.problem == "logistic":
        inst = make_random_logistic(m=args.m, n=args.n, seed=args.seed,
                                    lam_ratio=args.lambda_ratio or 0.05)
        problem, lipschitz = logistic_oracle(inst), inst.lipschitz
        x0 = np.zeros(args.n)
    else:
        raise ConfigError(f"unknown problem {args.problem!r}")

    fb = default_fb_params(args.solver, lipschitz)
    params = SolveParams(fb=fb, tol=args.tol, max_iter=args.max_iter)
    res = solve(problem, x0, args.solver, params, LbfgsDirections(memory=args.lbfgs))
    c = res.counters
    print(f"{args.problem} {args.solver}: status={res.status} iters={res.iterations} "
          f"resid={res.residual_inf:.3e} phi={res.phi_final:.9g} "
          f"n_f={c.n_f} n_grad={c.n_grad} n_prox={c.n_prox}")
    return 0


def _logistic_entries(args) -> list[tuple[str, LogisticProblem]]:
    entries = []
    if args.data:
        A, b = parse_libsvm(Path(args.data))
        name = Path(args.data).stem
        entries.append((name, (A, b)))
    else:
        for i in range(args.synthetic):
            inst = make_random_logistic(m=args.m, n=args.n, seed=args.seed + i)
            entries.append((f"synth-{i:02d}", (inst.A, inst.b)))
    return entries


def _cmd_bench_logistic(args) -> int:
    ratios = [args.lambda_ratio] if args.lambda_ratio else list(LAMBDA_GRID)
    solvers = _parse_solvers(args.solvers)
    bench_problems = []
    for name, (A, b) in _logistic_entries(args):
        lmax = lambda_max(A, b)
        for ratio in ratios:
            prob = LogisticProblem(A=A, b=b, lam=ratio * lmax)
            bench_problems.append(BenchProblem(
                problem_id=f"{name}@{ratio:g}", problem=logistic_oracle(prob),
                lipschitz=prob.lipschitz, x0=np.zeros(prob.dim)))
    config = RunConfig(tol=args.tol, max_iter=args.max_iter,
                       lbfgs_memory=args.lbfgs, jobs=args.jobs, seed=args.seed)
    records = run_matrix(bench_problems, solvers, config)
    _emit(records, args.out)
    return 0


def _cmd_bench_synthetic(args) -> int:
    solvers = _parse_solvers(args.solvers)
    bench_problems = []
    for i in range(args.instances):
        seed = args.seed + i
        if args.kind in ("lasso", "mixed") and (args.kind == "lasso" or i % 2 == 0):
            inst = make_lasso(m=2 * args.n, n=args.n, seed=seed)
            problem, lipschitz = inst.problem(), inst.lipschitz
            name = f"lasso-{i:02d}"
        else:
            inst = make_box_qp(n=args.n, seed=seed)
            problem, lipschitz = inst.problem(), inst.lipschitz
            name = f"boxqp-{i:02d}"
        x0 = np.random.default_rng(seed).standard_normal(args.n)
        bench_problems.append(BenchProblem(problem_id=name, problem=problem,
                                           lipschitz=lipschitz, x0=x0))
    config = RunConfig(tol=args.tol, max_iter=args.max_iter,
                       lbfgs_memory=args.lbfgs, jobs=args.jobs, seed=args.seed)
    records = run_matrix(bench_problems, solvers, config)
    _emit(records, args.out)
    return 0


def _cmd_bench_mpc(args) -> int:
    solvers = tuple(_parse_solvers(args.solvers))
    bike = BicycleConfig(horizon=args.horizon, dt=args.dt, wheelbase=args.wheelbase,
                         half_width=args.width)
    run_cfg = MpcRunConfig(steps=args.steps, warm_start=args.warm, solvers=solvers,
                           alm=AlmConfig(lbfgs_memory=args.lbfgs))
    records = run_mpc_closed_loop(bike, run_cfg)
    _emit(records, args.out)
    return 0


def _cmd_profile(args) -> int:
    records = read_records_csv(args.infile)
    curves = performance_profile(records, args.metric)
    write_profiles_csv(curves, args.out)
    print(f"wrote {len(curves)} profile curves to {args.out}")
    return 0


# ---------------------------------------------------------------------------
# Parser assembly
# ---------------------------------------------------------------------------

def build_parser() -> tuple[argparse.ArgumentParser, dict]:
    parser = argparse.ArgumentParser(prog="fbopt",
                                     description="composite-minimization benchmarks")
    sub = parser.add_subparsers(dest="command", required=True)
    registry = {}

    def common(p):
        p.add_argument("--config", help="key=value file supplying defaults for any flag")
        p.add_argument("--seed", type=int, default=_default_seed())
        p.add_argument("--tol", type=float, default=1e-6)
        p.add_argument("--max-iter", dest="max_iter", type=int, default=50_000)

    p_solve = sub.add_parser("solve", help="run one problem with one solver")
    common(p_solve)
    p_solve.add_argument("--problem", required=True,
                         choices=["lasso", "boxqp", "logistic", "bicycle"])
    p_solve.add_argument("--solver", default="panocpp", choices=SOLVER_KINDS)
    p_solve.add_argument("--n", type=int, default=50)
    p_solve.add_argument("--m", type=int, default=100)
    p_solve.add_argument("--lbfgs", type=int, default=10)
    p_solve.add_argument("--lambda-ratio", dest="lambda_ratio", type=float)
    p_solve.add_argument("--horizon", type=int, default=32)
    p_solve.set_defaults(func=_cmd_solve)
    registry["solve"] = p_solve

    p_bench = sub.add_parser("bench", help="run a benchmark matrix")
    bench_sub = p_bench.add_subparsers(dest="bench_kind", required=True)

    p_log = bench_sub.add_parser("logistic", help="l1 logistic regression bench")
    common(p_log)
    p_log.add_argument("--data", help="LIBSVM text file (synthetic instances if omitted)")
    p_log.add_argument("--lambda-ratio", dest="lambda_ratio", type=float,
                       help="single ratio of the zero-solution weight; default grid "
                            + str(LAMBDA_GRID))
    p_log.add_argument("--solvers", default="panocpp,zerofpr,panoc")
    p_log.add_argument("--synthetic", type=int, default=5,
                       help="number of synthetic instances when --data is absent")
    p_log.add_argument("--n", type=int, default=60)
    p_log.add_argument("--m", type=int, default=120)
    p_log.add_argument("--lbfgs", type=int, default=5)
    p_log.add_argument("--jobs", type=int, default=1)
    p_log.add_argument("--out", default="logistic_records.csv")
    p_log.set_defaults(func=_cmd_bench_logistic)
    registry["bench logistic"] = p_log

    p_syn = bench_sub.add_parser("synthetic", help="random lasso / box-QP bench")
    common(p_syn)
    p_syn.add_argument("--n", type=int, default=30)
    p_syn.add_argument("--instances", type=int, default=20)
    p_syn.add_argument("--kind", default="mixed", choices=["lasso", "boxqp", "mixed"])
    p_syn.add_argument("--solvers", default="panocpp,zerofpr,panoc,pg")
    p_syn.add_argument("--lbfgs", type=int, default=25)
    p_syn.add_argument("--jobs", type=int, default=1)
    p_syn.add_argument("--out", default="synthetic_records.csv")
    p_syn.set_defaults(func=_cmd_bench_synthetic)
    registry["bench synthetic"] = p_syn

    p_mpc = bench_sub.add_parser("mpc", help="bicycle corridor MPC closed loop")
    common(p_mpc)
    p_mpc.add_argument("--steps", type=int, default=10)
    start = p_mpc.add_mutually_exclusive_group()
    start.add_argument("--warm", action="store_true", default=False)
    start.add_argument("--cold", dest="warm", action="store_false")
    p_mpc.add_argument("--solvers", default="panocpp,zerofpr,panoc")
    p_mpc.add_argument("--horizon", type=int, default=32)
    p_mpc.add_argument("--dt", type=float, default=0.05)
    p_mpc.add_argument("--wheelbase", type=float, default=0.5)
    p_mpc.add_argument("--width", type=float, default=0.3)
    p_mpc.add_argument("--lbfgs", type=int, default=50)
    p_mpc.add_argument("--out", default="mpc_records.csv")
    p_mpc.set_defaults(func=_cmd_bench_mpc)
    registry["bench mpc"] = p_mpc

    p_prof = sub.add_parser("profile", help="performance profile from records CSV")
    p_prof.add_argument("--metric", default="evals_f_plus_grad", choices=METRICS)
    p_prof.add_argument("--in", dest="infile", required=True)
    p_prof.add_argument("--out", required=True)
    p_prof.add_argument("--config", help="key=value file supplying defaults")
    p_prof.set_defaults(func=_cmd_profile)
    registry["profile"] = p_prof

    return parser, registry


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, registry = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "config", None):
            key = args.command if args.command != "bench" else f"bench {args.bench_kind}"
            args = _apply_config(registry[key], args, argv[2 if " " in key else 1:])
        return args.func(args)
    except (ConfigError, LibsvmParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
