"""Deterministic table and JSON serialization for the command-line tools.

All numeric output is rendered at 17 significant digits ("%.17g"), which
round-trips IEEE doubles exactly: identical inputs produce byte-identical
files.  Tables are comma-delimited with a mandatory header row, '.' decimal
separator and LF line endings; JSON objects are emitted with sorted keys.
"""

from __future__ import annotations

import math
import os

import numpy as np

from .engine import SampledPotential
from .errors import DomainError

__all__ = [
    "detect_periods",
    "dumps_json",
    "format_float",
    "format_table",
    "read_potential_csv",
    "read_table",
    "write_json",
    "write_table",
]


def format_float(value: float) -> str:
    """Render one finite double at 17 significant digits."""
    v = float(value)
    if not math.isfinite(v):
        raise DomainError(f"non-finite value {v!r} cannot be serialized")
    if v == 0.0:
        v = 0.0  # normalize -0.0 so output does not depend on sign of zero
    return "%.17g" % v


def format_table(header, columns) -> str:
    """Render named columns as comma-delimited text with LF line endings."""
    header = list(header)
    columns = [np.asarray(c, dtype=np.float64) for c in columns]
    if len(header) != len(columns):
        raise DomainError("header and column counts differ")
    if not columns:
        raise DomainError("a table needs at least one column")
    n = columns[0].size
    for c in columns:
        if c.size != n:
            raise DomainError("all columns must have the same length")
    lines = [",".join(header)]
    for i in range(n):
        lines.append(",".join(format_float(c[i]) for c in columns))
    return "\n".join(lines) + "\n"


def write_table(path: str, header, columns) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(format_table(header, columns))


def read_table(path: str):
    """Read a comma-delimited table back as (header, list of float arrays)."""
    with open(path, "r", encoding="ascii") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    if not lines:
        raise DomainError(f"{path}: empty table")
    header = lines[0].split(",")
    rows = [ln.split(",") for ln in lines[1:]]
    for r in rows:
        if len(r) != len(header):
            raise DomainError(f"{path}: ragged row (expected {len(header)} fields)")
    cols = [np.array([float(r[j]) for r in rows]) for j in range(len(header))]
    return header, cols


def _json_fragments(obj, indent: int, out):
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        keys = sorted(obj.keys())
        for i, k in enumerate(keys):
            if not isinstance(k, str):
                raise DomainError("JSON object keys must be strings")
            out.append(f'{pad}  "{k}": ')
            _json_fragments(obj[k], indent + 1, out)
            out.append(",\n" if i + 1 < len(keys) else "\n")
        out.append(pad + "}")
    elif isinstance(obj, (list, tuple)):
        seq = list(obj)
        if not seq:
            out.append("[]")
            return
        out.append("[\n")
        for i, item in enumerate(seq):
            out.append(pad + "  ")
            _json_fragments(item, indent + 1, out)
            out.append(",\n" if i + 1 < len(seq) else "\n")
        out.append(pad + "]")
    elif isinstance(obj, bool):
        out.append("true" if obj else "false")
    elif obj is None:
        out.append("null")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(format_float(float(obj)))
    elif isinstance(obj, str):
        escaped = (
            obj.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
        )
        out.append(f'"{escaped}"')
    else:
        raise DomainError(f"cannot serialize {type(obj).__name__} to JSON")


def dumps_json(obj) -> str:
    """Deterministic JSON: sorted keys, 17-significant-digit numbers."""
    out: list[str] = []
    _json_fragments(obj, 0, out)
    return "".join(out) + "\n"


def write_json(path: str, obj) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(dumps_json(obj))


def detect_periods(values: np.ndarray, dx: float, tol: float = 1e-8):
    """Infer periodicity of a sampled curve from the samples alone.

    Returns (period, background_period): ``period`` is set when the whole
    array repeats with some lattice-commensurate period; otherwise
    ``background_period`` is set when the leading and trailing quarters each
    repeat with one common period (a localized deformation of a periodic
    background).  Unset entries are None.
    """
    v = np.asarray(values, dtype=np.float64)
    n = v.size
    scale = max(1.0, float(np.max(np.abs(v))))

    def smallest_shift(arr: np.ndarray):
        m = arr.size
        if m < 17 or np.max(arr) - np.min(arr) <= tol * scale:
            return None  # constant data has no well-defined period
        # Only shifts that at least map the first sample onto a matching
        # value can be periods; checking those alone keeps this linear for
        # aperiodic data.
        candidates = np.flatnonzero(np.abs(arr - arr[0]) <= tol * scale)
        for k in candidates:
            if 8 <= k <= m // 2 and np.max(np.abs(arr[:-k] - arr[k:])) <= tol * scale:
                return int(k)
        return None

    k_full = smallest_shift(v)
    if k_full is not None:
        return float(k_full * dx), None

    quarter = n // 4
    if quarter >= 24:
        k_left = smallest_shift(v[:quarter])
        k_right = smallest_shift(v[n - quarter :])
        if k_left is not None and k_left == k_right:
            return None, float(k_left * dx)
    return None, None


def read_potential_csv(
    path: str,
    column: str | None = None,
    period: float | None = None,
    detect: bool = True,
):
    """Load a potential from a delimited table with an ``x`` column.

    ``column`` picks the value column by header name (default: the last
    column).  An explicit ``period`` wins over detection; with ``detect``
    false the result carries no period metadata at all.
    """
    if not os.path.exists(path):
        raise DomainError(f"no such file: {path}")
    header, cols = read_table(path)
    if "x" not in header:
        raise DomainError(f"{path}: no 'x' column in header {header}")
    x = cols[header.index("x")]
    if column is None:
        idx = len(header) - 1
        if header[idx] == "x":
            raise DomainError(f"{path}: only an 'x' column present")
    else:
        if column not in header:
            raise DomainError(f"{path}: no column named {column!r}")
        idx = header.index(column)
    v = cols[idx]
    if x.size < 2:
        raise DomainError(f"{path}: need at least two rows")
    steps = np.diff(x)
    dx = float(steps[0])
    if dx <= 0 or np.max(np.abs(steps - dx)) > 1e-9 * max(1.0, abs(dx)):
        raise DomainError(f"{path}: x column is not uniformly spaced")

    per = bgper = None
    if period is not None:
        per = float(period)
    elif detect:
        per, bgper = detect_periods(v, dx)
    return SampledPotential(
        x0=float(x[0]),
        dx=dx,
        values=v,
        period=per,
        background_period=bgper,
        label=header[idx],
    )
