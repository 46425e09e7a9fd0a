"""Deterministic JSON and CSV emission for report documents."""

from __future__ import annotations

import csv
import io
import json
import math
from fractions import Fraction
from typing import Any

import numpy as np

VOLATILE_KEYS = ("timestamp",)


def _number(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    if x == int(x) and abs(x) < 1e17:
        return repr(float(x))
    return format(x, ".17g")


def _normalize(obj: Any) -> Any:
    if isinstance(obj, np.ndarray):
        return [_normalize(x) for x in obj.tolist()]
    if isinstance(obj, np.generic):
        return _normalize(obj.item())
    if isinstance(obj, Fraction):
        return float(obj)
    if isinstance(obj, complex):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (list, tuple)):
        return [_normalize(x) for x in obj]
    if isinstance(obj, dict):
        return {str(k): _normalize(v) for k, v in obj.items()}
    return obj


def _emit(obj: Any, indent: int, level: int) -> str:
    pad, inner = " " * (indent * level), " " * (indent * (level + 1))
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _number(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(x, (list, dict)) for x in obj):
            return "[" + ", ".join(_emit(x, indent, level + 1) for x in obj) + "]"
        return "[\n" + ",\n".join(inner + _emit(x, indent, level + 1) for x in obj) + "\n" + pad + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = (inner + json.dumps(k) + ": " + _emit(v, indent, level + 1) for k, v in obj.items())
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(doc: Any, indent: int = 2) -> str:
    """JSON with 17 significant digits, complex as ``[re, im]`` and non-finite as ``null``."""
    return _emit(_normalize(doc), indent, 0) + "\n"


def strip_volatile(doc: dict) -> dict:
    return {k: v for k, v in doc.items() if k not in VOLATILE_KEYS}


def to_csv(rows: list[dict], columns: list[str] | None = None) -> str:
    """Flatten per-degree rows; nested values are dropped."""
    if columns is None:
        columns = []
        for row in rows:
            for k, v in row.items():
                if k not in columns and not isinstance(v, (list, dict)):
                    columns.append(k)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        out = []
        for c in columns:
            v = _normalize(row.get(c))
            if isinstance(v, float):
                out.append(_number(v) if math.isfinite(v) else "")
            elif v is None or isinstance(v, (list, dict)):
                out.append("")
            else:
                out.append(v)
        writer.writerow(out)
    return buf.getvalue()
