"""Deterministic JSON and CSV output for reports."""

from __future__ import annotations

import csv
import io
import json
import math
from fractions import Fraction

import numpy as np

SCHEMA = "1"


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating, Fraction)):
        return float(obj)
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def format_float(x):
    """17 significant digits; non-finite values become ``null``."""
    return format(x, ".17g") if math.isfinite(x) else "null"


def _emit(obj, indent, level):
    pad = "\n" + " " * (indent * (level + 1))
    end = "\n" + " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{json.dumps(k)}: {_emit(v, indent, level + 1)}" for k, v in obj.items()]
        return "{" + pad + ("," + pad).join(items) + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(_emit(v, indent, level) for v in obj) + "]"
        return "[" + pad + ("," + pad).join(_emit(v, indent, level + 1) for v in obj) + end + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return format_float(obj)
    return json.dumps(obj)


def dumps(obj, indent=2):
    """Report JSON tagged with ``"schema": "1"``."""
    data = _plain(obj)
    if isinstance(data, dict) and "schema" not in data:
        data = {"schema": SCHEMA, **data}
    return _emit(data, indent, 0) + "\n"


def to_csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([format_float(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()
