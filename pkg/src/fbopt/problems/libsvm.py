"""Reader/writer for the LIBSVM sparse text format.

Lines look like ``<label> <index>:<value> ...`` with 1-based, strictly
ascending indices; ``#`` starts a comment.  Labels must be in {-1, +1} or
{0, 1} (0 maps to -1).  The feature count is the largest index seen.
"""

from __future__ import annotations

import io
from pathlib import Path

import numpy as np
import scipy.sparse as sp


class LibsvmParseError(ValueError):
    """Malformed LIBSVM input; carries the 1-based line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


def _map_label(token: str, line_no: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise LibsvmParseError(f"non-numeric label {token!r}", line_no) from None
    if value == 0.0:
        return -1.0
    if value in (-1.0, 1.0):
        return value
    raise LibsvmParseError(f"label {token!r} not in {{-1, 0, +1}}", line_no)


def parse_libsvm(source) -> tuple[sp.csr_matrix, np.ndarray]:
    """Parse LIBSVM text from a path, string, or text stream.

    Returns the sparse row matrix of features and the label vector in
    {-1, +1}.  Raises :class:`LibsvmParseError` (with a line number) on
    malformed tokens, non-ascending indices, or an input without data rows.
    """
    if isinstance(source, (str, Path)) and "\n" not in str(source) and Path(str(source)).exists():
        text = Path(source).read_text()
    elif isinstance(source, (str, Path)):
        text = str(source)
    else:
        text = source.read()

    labels: list[float] = []
    rows: list[int] = []
    cols: list[int] = []
    vals: list[float] = []
    n_features = 0

    for line_no, raw in enumerate(io.StringIO(text), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        labels.append(_map_label(tokens[0], line_no))
        row = len(labels) - 1
        prev_idx = 0
        for tok in tokens[1:]:
            idx_str, _, val_str = tok.partition(":")
            if not val_str:
                raise LibsvmParseError(f"malformed feature token {tok!r}", line_no)
            try:
                idx = int(idx_str)
                val = float(val_str)
            except ValueError:
                raise LibsvmParseError(f"non-numeric feature token {tok!r}", line_no) from None
            if idx < 1:
                raise LibsvmParseError(f"index {idx} must be 1-based", line_no)
            if idx <= prev_idx:
                raise LibsvmParseError(
                    f"duplicate/non-ascending index {idx} after {prev_idx}", line_no)
            prev_idx = idx
            rows.append(row)
            cols.append(idx - 1)
            vals.append(val)
            n_features = max(n_features, idx)

    if not labels:
        raise LibsvmParseError("no data rows", 1)

    A = sp.coo_matrix((vals, (rows, cols)), shape=(len(labels), n_features)).tocsr()
    return A, np.array(labels)


def serialize_libsvm(A, b) -> str:
    """Inverse of :func:`parse_libsvm`; values keep 17 significant digits."""
    A = sp.csr_matrix(A)
    lines = []
    for i in range(A.shape[0]):
        start, end = A.indptr[i], A.indptr[i + 1]
        label = "+1" if b[i] > 0 else "-1"
        feats = " ".join(
            f"{A.indices[k] + 1}:{format(A.data[k], '.17g')}"
            for k in range(start, end)
            if A.data[k] != 0.0
        )
        lines.append(f"{label} {feats}".rstrip())
    return "\n".join(lines) + "\n"
