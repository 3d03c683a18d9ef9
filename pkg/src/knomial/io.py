"""JSON/CSV serialization for matrices and vectors.

Reals are written with 17 significant digits, which round-trips doubles
exactly.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile

import numpy as np

BASES = ("standard", "knomial")


class FormatError(ValueError):
    pass


def _num(x: float) -> float:
    return float(f"{float(x):.17g}")


def _pair(z) -> list[float]:
    return [_num(z.real), _num(z.imag)]


def matrix_rows(M: np.ndarray) -> list:
    return [[_pair(z) for z in row] for row in np.asarray(M)]


def matrix_to_json(M: np.ndarray, basis: str = "standard") -> dict:
    M = np.asarray(M)
    return {"dim": int(M.shape[0]), "basis": basis, "rows": matrix_rows(M)}


def vector_to_json(v: np.ndarray, basis: str = "standard") -> dict:
    v = np.asarray(v)
    return {"dim": int(v.shape[0]), "basis": basis, "v": [_pair(z) for z in v]}


def _complex_array(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.shape[-1] != 2:
        raise FormatError("complex entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def matrix_from_json(obj: dict) -> tuple[np.ndarray, str]:
    try:
        M = _complex_array(obj["rows"])
        dim, basis = int(obj["dim"]), obj.get("basis", "standard")
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed matrix: {exc}") from exc
    if M.shape != (dim, dim) or basis not in BASES:
        raise FormatError(f"matrix shape {M.shape} / basis {basis!r} inconsistent with dim {dim}")
    return M, basis


def vector_from_json(obj: dict) -> tuple[np.ndarray, str]:
    try:
        v = _complex_array(obj["v"])
        dim, basis = int(obj["dim"]), obj.get("basis", "standard")
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed vector: {exc}") from exc
    if v.shape != (dim,) or basis not in BASES:
        raise FormatError(f"vector length {v.shape} / basis {basis!r} inconsistent with dim {dim}")
    return v, basis


def matrix_to_csv(M: np.ndarray) -> str:
    """One row per matrix row, alternating real/imaginary columns."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in np.asarray(M):
        writer.writerow([f"{x:.17g}" for z in row for x in (z.real, z.imag)])
    return buf.getvalue()


def matrix_from_csv(text: str) -> np.ndarray:
    rows = [[float(x) for x in row] for row in csv.reader(io.StringIO(text)) if row]
    arr = np.asarray(rows)
    return arr[:, 0::2] + 1j * arr[:, 1::2]


def dumps(obj) -> str:
    return json.dumps(obj, indent=None, separators=(",", ":")) + "\n"


def write_atomic(path: str, text: str) -> None:
    """Write via a temporary file in the same directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
