"""JSON and CSV file formats.

Complex numbers are ``[re, im]`` pairs and matrices are row-major lists of
rows. Every file is written to a temporary sibling and renamed into place.
"""
from __future__ import annotations

import csv
import io as _io
import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from .domains import ConformalImage, Disk, IntervalUnion, MomentTable1D, MomentTable2D, SublevelSet
from .exptransform import ExpCoeffTable, ExpCoeffTable1D
from .polynomials import RealPoly

__all__ = [
    "FormatError",
    "complex_to_json",
    "complex_from_json",
    "spec_to_json",
    "spec_from_json",
    "table_to_json",
    "table_from_json",
    "poly_to_json",
    "poly_from_json",
    "to_jsonable",
    "dumps",
    "load_json",
    "write_text_atomic",
    "write_json",
    "write_csv",
    "csv_text",
]


class FormatError(ValueError):
    """Malformed input file; the message names the line or field."""


def complex_to_json(z):
    z = complex(z)
    return [z.real, z.imag]


def complex_from_json(v, where="value"):
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(isinstance(x, (int, float)) for x in v):
        return complex(v[0], v[1])
    raise FormatError(f"{where}: expected a number or [re, im], got {v!r}")


def _cmatrix_to_json(a):
    return [[complex_to_json(x) for x in row] for row in np.asarray(a)]


def _cmatrix_from_json(rows, where):
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise FormatError(f"{where}: expected a list of rows")
    out = np.array(
        [[complex_from_json(x, f"{where}[{i}][{j}]") for j, x in enumerate(r)] for i, r in enumerate(rows)],
        dtype=complex,
    )
    if out.ndim != 2 or out.shape[0] != out.shape[1]:
        raise FormatError(f"{where}: expected a square matrix")
    return out


def _field(obj, name, where):
    if not isinstance(obj, dict):
        raise FormatError(f"{where}: expected a JSON object")
    if name not in obj:
        raise FormatError(f"{where}: missing field {name!r}")
    return obj[name]


# --------------------------------------------------------------------------
# shapes and polynomials


def poly_to_json(p: RealPoly):
    return p.to_json()


def poly_from_json(obj, where="poly"):
    try:
        return RealPoly.from_json(obj)
    except FormatError:
        raise
    except (ValueError, TypeError) as exc:
        raise FormatError(f"{where}: {exc}") from exc


def spec_to_json(spec):
    if isinstance(spec, Disk):
        return {"kind": "disk", "center": complex_to_json(spec.center), "radius": spec.radius}
    if isinstance(spec, ConformalImage):
        return {"kind": "conformal", "phi": [complex_to_json(c) for c in spec.phi]}
    if isinstance(spec, IntervalUnion):
        return {"kind": "intervals", "intervals": [list(iv) for iv in spec.intervals]}
    if isinstance(spec, SublevelSet):
        return {"kind": "sublevel", "poly": poly_to_json(spec.poly)}
    raise TypeError(f"not a domain spec: {type(spec).__name__}")


def spec_from_json(obj, where="spec"):
    kind = _field(obj, "kind", where)
    try:
        if kind == "disk":
            return Disk(
                complex_from_json(obj.get("center", 0.0), f"{where}.center"),
                float(_field(obj, "radius", where)),
            )
        if kind == "conformal":
            phi = _field(obj, "phi", where)
            return ConformalImage(tuple(complex_from_json(c, f"{where}.phi[{i}]") for i, c in enumerate(phi)))
        if kind == "intervals":
            return IntervalUnion(tuple(tuple(iv) for iv in _field(obj, "intervals", where)))
        if kind == "sublevel":
            return SublevelSet(poly_from_json(_field(obj, "poly", where), f"{where}.poly"))
    except FormatError:
        raise
    except (ValueError, TypeError) as exc:
        raise FormatError(f"{where}: {exc}") from exc
    raise FormatError(f"{where}.kind: unknown shape kind {kind!r}")


# --------------------------------------------------------------------------
# tables


def table_to_json(t):
    if isinstance(t, MomentTable2D):
        return {"type": "moments2d", "d": t.d, "s": _cmatrix_to_json(t.s), "provenance": t.provenance}
    if isinstance(t, MomentTable1D):
        return {"type": "moments1d", "m": t.m, "s": [float(x) for x in t.s]}
    if isinstance(t, ExpCoeffTable):
        return {"type": "expcoeffs2d", "d": t.d, "b": _cmatrix_to_json(t.b)}
    if isinstance(t, ExpCoeffTable1D):
        return {"type": "expcoeffs1d", "m": t.m, "t": [float(x) for x in t.t]}
    raise TypeError(f"not a table: {type(t).__name__}")


def _check_size(arr, declared, name, where):
    size = arr.shape[0] - 1
    if declared is not None and int(declared) != size:
        raise FormatError(f"{where}.{name}: declared {declared} but data has order {size}")


def table_from_json(obj, where="table"):
    kind = _field(obj, "type", where)
    if kind == "moments2d":
        s = _cmatrix_from_json(_field(obj, "s", where), f"{where}.s")
        _check_size(s, obj.get("d"), "d", where)
        return MomentTable2D(s, str(obj.get("provenance", "closed-form")))
    if kind == "expcoeffs2d":
        b = _cmatrix_from_json(_field(obj, "b", where), f"{where}.b")
        _check_size(b, obj.get("d"), "d", where)
        return ExpCoeffTable(b)
    if kind in ("moments1d", "expcoeffs1d"):
        key = "s" if kind == "moments1d" else "t"
        vals = _field(obj, key, where)
        if not isinstance(vals, list) or not all(isinstance(x, (int, float)) for x in vals):
            raise FormatError(f"{where}.{key}: expected a list of real numbers")
        arr = np.array(vals, dtype=float)
        if not arr.size:
            raise FormatError(f"{where}.{key}: empty")
        _check_size(arr, obj.get("m"), "m", where)
        return MomentTable1D(arr) if kind == "moments1d" else ExpCoeffTable1D(arr)
    raise FormatError(f"{where}.type: unknown table type {kind!r}")


# --------------------------------------------------------------------------
# generic reports


def to_jsonable(x):
    """Recursively convert dataclasses and numpy values to plain JSON values.

    Non-finite floats become ``null``.
    """
    if hasattr(x, "__dataclass_fields__"):
        return {k: to_jsonable(getattr(x, k)) for k in x.__dataclass_fields__}
    if isinstance(x, RealPoly):
        return x.to_json()
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return to_jsonable(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [to_jsonable(float(x.real)), to_jsonable(float(x.imag))]
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    return x


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, allow_nan=False) + "\n"


def load_json(path):
    """Parse a JSON file; syntax errors are reported with line and column."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FileNotFoundError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def write_text_atomic(path, text):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path, obj):
    write_text_atomic(path, dumps(obj))


def csv_text(header, rows) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_csv_cell(v) for v in row])
    return buf.getvalue()


def _csv_cell(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if v is None:
        return ""
    return v


def write_csv(path, header, rows):
    write_text_atomic(path, csv_text(header, rows))
