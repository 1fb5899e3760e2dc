"""JSON wire formats for matrices, vectors, module elements and states.

Matrix: ``{"rows": R, "cols": C, "re": [[...]], "im": [[...]]}``; a missing
``"im"`` means a zero imaginary part. Floats are written with Python's
shortest round-trip repr, so reading a file back gives identical bits.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .exceptions import InputError
from .linalg import check_matrix, check_vector


def _num(x: float) -> float:
    x = float(x)
    # normalise negative zero so output is stable across code paths
    return 0.0 if x == 0.0 else x


def matrix_to_dict(A) -> dict:
    A = check_matrix(A)
    out = {
        "rows": int(A.shape[0]),
        "cols": int(A.shape[1]),
        "re": [[_num(v) for v in row] for row in A.real],
    }
    if np.any(A.imag != 0):
        out["im"] = [[_num(v) for v in row] for row in A.imag]
    return out


def _grid(data, rows, cols, key):
    if not isinstance(data, list) or len(data) != rows:
        raise InputError(f"matrix JSON: '{key}' must be a list of {rows} rows")
    for row in data:
        if not isinstance(row, list) or len(row) != cols:
            raise InputError(f"matrix JSON: each row of '{key}' must have {cols} entries")
        for v in row:
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise InputError(f"matrix JSON: '{key}' entries must be finite numbers")
    return np.array(data, dtype=float).reshape(rows, cols)


def matrix_from_dict(d) -> np.ndarray:
    if not isinstance(d, dict):
        raise InputError("matrix JSON must be an object")
    try:
        rows, cols = d["rows"], d["cols"]
        re = d["re"]
    except KeyError as exc:
        raise InputError(f"matrix JSON: missing key {exc}") from None
    if not all(isinstance(v, int) and not isinstance(v, bool) and v >= 1 for v in (rows, cols)):
        raise InputError("matrix JSON: 'rows' and 'cols' must be positive integers")
    A = _grid(re, rows, cols, "re").astype(complex)
    if "im" in d:
        A += 1j * _grid(d["im"], rows, cols, "im")
    return check_matrix(A)


def vector_to_dict(x) -> dict:
    x = check_vector(x)
    return {
        "dim": int(x.size),
        "re": [_num(v) for v in x.real],
        "im": [_num(v) for v in x.imag],
    }


def vector_from_dict(d) -> np.ndarray:
    try:
        dim, re = d["dim"], d["re"]
    except (KeyError, TypeError) as exc:
        raise InputError(f"vector JSON: missing key {exc}") from None
    col = _grid([[v] for v in re], dim, 1, "re")[:, 0].astype(complex)
    if "im" in d:
        col += 1j * _grid([[v] for v in d["im"]], dim, 1, "im")[:, 0]
    return check_vector(col)


def complex_to_dict(z) -> dict:
    z = complex(z)
    return {"re": _num(z.real), "im": _num(z.imag)}


def to_jsonable(obj):
    """Recursively convert reports (numpy scalars, complex, arrays) to JSON types."""
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return _num(v) if math.isfinite(v) else str(v)
    if isinstance(obj, (complex, np.complexfloating)):
        return complex_to_dict(obj)
    if isinstance(obj, np.ndarray):
        if obj.ndim == 1:
            return vector_to_dict(obj)
        if obj.ndim == 2:
            return matrix_to_dict(obj)
        return to_jsonable(obj.tolist())
    return obj


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True) + "\n"


def load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON ({exc})") from exc


def load_matrix(path) -> np.ndarray:
    return matrix_from_dict(load_json(path))
