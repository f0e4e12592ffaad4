"""Performance profiles over benchmark records.

For each problem the best converged cost defines the per-solver ratio
(infinite when a solver failed); a solver's profile value at tau is the
fraction of all problems it solved within factor tau of the best.  Curves
are step functions; their breakpoints are exactly the solver's finite
ratios.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .records import RunRecord

METRICS = ("evals_f_plus_grad", "matvec", "iterations", "time")


class EmptyProfileError(RuntimeError):
    """No problem in the record set was solved by any solver."""


def _metric_value(record: RunRecord, metric: str) -> float:
    if metric == "evals_f_plus_grad":
        return float(record.n_f + record.n_grad)
    if metric == "matvec":
        return float(record.n_matvec)
    if metric == "iterations":
        return float(record.iters)
    if metric == "time":
        return float(record.wall_ms)
    raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}")


@dataclass
class ProfileCurve:
    solver: str
    points: list[tuple[float, float]]   # (tau, rho) breakpoints, tau ascending
    fraction_solved: float              # value of rho at tau -> infinity

    def rho_at(self, tau: float) -> float:
        rho = 0.0
        for t, r in self.points:
            if t <= tau:
                rho = r
            else:
                break
        return rho


def performance_ratios(records: list[RunRecord], metric: str):
    """Per-(problem, solver) cost ratios against the best converged solver."""
    problems = sorted({r.problem for r in records})
    solvers = sorted({r.solver for r in records})
    by_key = {(r.problem, r.solver): r for r in records}

    ratios: dict[str, dict[str, float]] = {s: {} for s in solvers}
    any_solved = False
    for p in problems:
        best = np.inf
        for s in solvers:
            rec = by_key.get((p, s))
            if rec is not None and rec.converged:
                best = min(best, _metric_value(rec, metric))
        for s in solvers:
            rec = by_key.get((p, s))
            if rec is None or not rec.converged or not np.isfinite(best):
                ratios[s][p] = np.inf
            else:
                value = _metric_value(rec, metric)
                ratios[s][p] = value / best if best > 0 else (1.0 if value == 0 else np.inf)
                any_solved = True
    if not any_solved:
        raise EmptyProfileError("no converged run in the record set; profile is empty")
    return ratios, problems, solvers


def performance_profile(records: list[RunRecord], metric: str) -> list[ProfileCurve]:
    ratios, problems, solvers = performance_ratios(records, metric)
    n = len(problems)
    curves = []
    for s in solvers:
        finite = sorted(r for r in ratios[s].values() if np.isfinite(r))
        points = []
        count = 0
        for tau in finite:
            count += 1
            if points and points[-1][0] == tau:
                points[-1] = (tau, count / n)
            else:
                points.append((tau, count / n))
        if not points or points[0][0] > 1.0:
            points.insert(0, (1.0, sum(1 for r in finite if r <= 1.0) / n))
        curves.append(ProfileCurve(solver=s, points=points,
                                   fraction_solved=len(finite) / n))
    return curves


def profiles_to_csv(curves: list[ProfileCurve]) -> str:
    lines = ["solver,tau,rho"]
    for curve in sorted(curves, key=lambda c: c.solver):
        for tau, rho in sorted(curve.points):
            lines.append(f"{curve.solver},{format(tau, '.17g')},{format(rho, '.17g')}")
    return "\n".join(lines) + "\n"


def write_profiles_csv(curves: list[ProfileCurve], path) -> None:
    from pathlib import Path
    try:
        Path(path).write_text(profiles_to_csv(curves))
    except OSError as exc:
        raise OSError(f"cannot write profiles to {path}: {exc}") from exc
