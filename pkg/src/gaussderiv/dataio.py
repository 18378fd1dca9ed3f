"""Input parsing and deterministic output formatting for the CLI layer.

Matrix and vector inputs arrive as CSV files, inline comma lists, or the
keyword ``identity``.  Matrix inputs are symmetrized as ``(M + M') / 2``; an
asymmetry beyond ``1e-12`` (relative) triggers a warning but not an error,
so forgiving ingestion meets strict math downstream.

JSON output renders every float with 17 significant digits and sorted keys,
so a fixed seed yields byte-identical bytes across runs.
"""

from __future__ import annotations

import json
import math
import warnings
from pathlib import Path

import numpy as np

_ASYM_WARN_TOL = 1e-12


def load_sample_csv(path: str, skip_header: bool = False) -> np.ndarray:
    """Load an ``(n, d)`` sample; comma- or whitespace-delimited rows."""
    text = Path(path).read_text()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if skip_header:
        lines = lines[1:]
    if not lines:
        raise ValueError(f"no data rows in {path}")
    delim = "," if "," in lines[0] else None
    rows = [np.fromstring(ln, sep=delim or " ") for ln in lines]
    widths = {len(row) for row in rows}
    if len(widths) != 1 or 0 in widths:
        raise ValueError(f"ragged or empty rows in {path}")
    return np.vstack(rows)


def parse_vector(text: str, d: int | None = None) -> np.ndarray:
    """Vector from an inline comma list, a file path, or ``zeros``."""
    if text == "zeros":
        if d is None:
            raise ValueError("'zeros' needs a known dimension")
        return np.zeros(d)
    path = Path(text)
    if path.exists():
        vec = load_sample_csv(text).reshape(-1)
    else:
        vec = np.fromstring(text, sep=",")
    if vec.size == 0:
        raise ValueError(f"could not parse vector from {text!r}")
    if d is not None and vec.size != d:
        raise ValueError(f"expected a vector of length {d}, got {vec.size}")
    return vec


def parse_matrix(text: str, d: int | None = None, *, name: str = "matrix") -> np.ndarray:
    """Matrix from ``identity``, a CSV file, or inline ``;``-separated rows.

    Square inputs are symmetrized; asymmetry beyond tolerance warns.
    """
    if text == "identity":
        if d is None:
            raise ValueError("'identity' needs a known dimension")
        return np.eye(d)
    path = Path(text)
    if path.exists():
        mat = load_sample_csv(text)
    else:
        rows = [np.fromstring(part, sep=",") for part in text.split(";") if part.strip()]
        if not rows or {len(r) for r in rows} == {0}:
            raise ValueError(f"could not parse {name} from {text!r}")
        mat = np.vstack(rows)
    if mat.shape[0] == 1 and d is not None and mat.size == d * d:
        mat = mat.reshape(d, d)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"{name} must be square, got shape {mat.shape}")
    if d is not None and mat.shape[0] != d:
        raise ValueError(f"{name} must be {d}x{d}, got {mat.shape[0]}x{mat.shape[1]}")
    scale = max(1.0, float(np.abs(mat).max()))
    asym = float(np.abs(mat - mat.T).max())
    if asym > _ASYM_WARN_TOL * scale:
        warnings.warn(
            f"{name} asymmetric by {asym:.3e}; using (M + M')/2", stacklevel=2
        )
    return (mat + mat.T) / 2.0


def _fmt_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return "null"
    if x == int(x) and abs(x) < 1e16:
        return format(x, ".1f")
    return format(x, ".17g")


def dumps_full_precision(obj, *, indent: int = 0) -> str:
    """Deterministic JSON: sorted keys, floats at 17 significant digits."""
    if obj is None:
        return "null"
    if isinstance(obj, bool) or isinstance(obj, np.bool_):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        return dumps_full_precision(obj.tolist())
    if isinstance(obj, dict):
        items = sorted(obj.items(), key=lambda kv: str(kv[0]))
        body = ",".join(f"{json.dumps(str(k))}:{dumps_full_precision(v)}" for k, v in items)
        return "{" + body + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(dumps_full_precision(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj)!r}")


def rows_to_csv(rows: list[dict], field_order: list[str] | None = None) -> str:
    """Render homogeneous dict rows as CSV with a header line."""
    if not rows:
        return ""
    fields = field_order or sorted({k for row in rows for k in row})

    def cell(v) -> str:
        if v is None:
            return ""
        if isinstance(v, (float, np.floating)):
            return _fmt_float(float(v)).strip()
        return str(v)

    lines = [",".join(fields)]
    for row in rows:
        lines.append(",".join(cell(row.get(f)) for f in fields))
    return "\n".join(lines) + "\n"
