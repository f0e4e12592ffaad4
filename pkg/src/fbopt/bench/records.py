"""Benchmark run records and their CSV/JSON serialization.

The CSV header is a fixed contract:
``problem,solver,status,iters,n_f,n_grad,n_prox,n_matvec,wall_ms,resid_inf,phi``
and the JSON mirror uses exactly these field names.  Floats are printed
with 17 significant digits so a round trip reproduces them bit-exactly.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass
from pathlib import Path

CSV_FIELDS = ("problem", "solver", "status", "iters", "n_f", "n_grad",
              "n_prox", "n_matvec", "wall_ms", "resid_inf", "phi")
CSV_HEADER = ",".join(CSV_FIELDS)


@dataclass
class RunRecord:
    problem: str
    solver: str
    status: str
    iters: int
    n_f: int
    n_grad: int
    n_prox: int
    n_matvec: int
    wall_ms: float
    resid_inf: float
    phi: float
    config_hash: str = ""

    @property
    def converged(self) -> bool:
        return self.status == "Converged"

    def evals_f_plus_grad(self) -> int:
        return self.n_f + self.n_grad


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def records_to_csv(records: list[RunRecord]) -> str:
    out = io.StringIO()
    out.write(CSV_HEADER + "\n")
    for r in records:
        row = asdict(r)
        out.write(",".join(_fmt(row[f]) for f in CSV_FIELDS) + "\n")
    return out.getvalue()


def write_records_csv(records: list[RunRecord], path) -> None:
    try:
        Path(path).write_text(records_to_csv(records))
    except OSError as exc:
        raise OSError(f"cannot write records to {path}: {exc}") from exc


def write_records_json(records: list[RunRecord], path) -> None:
    rows = []
    for r in records:
        row = asdict(r)
        rows.append({f: row[f] for f in CSV_FIELDS})
    try:
        Path(path).write_text(json.dumps(rows, indent=2) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write records to {path}: {exc}") from exc


def read_records_csv(path) -> list[RunRecord]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise OSError(f"cannot read records from {path}: {exc}") from exc
    reader = csv.DictReader(io.StringIO(text))
    records = []
    for row in reader:
        records.append(RunRecord(
            problem=row["problem"], solver=row["solver"], status=row["status"],
            iters=int(row["iters"]), n_f=int(row["n_f"]), n_grad=int(row["n_grad"]),
            n_prox=int(row["n_prox"]), n_matvec=int(row["n_matvec"]),
            wall_ms=float(row["wall_ms"]), resid_inf=float(row["resid_inf"]),
            phi=float(row["phi"]),
        ))
    return records
