"""JSON and CSV rendering with round-trip-safe 17-significant-digit floats."""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np


def fmt_float(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return format(x, ".17g")


def _plain(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, tuple):
        return list(obj)
    return obj


def dumps(obj, indent: int = 2) -> str:
    """Serialize like ``json.dumps`` but print every float with 17 significant digits.

    Non-finite floats become ``null``.
    """
    lines: list[str] = []

    def emit(o, level):
        o = _plain(o)
        pad = " " * (indent * (level + 1))
        end = " " * (indent * level)
        if isinstance(o, bool) or o is None or isinstance(o, (str, int)) and not isinstance(o, float):
            return json.dumps(o)
        if isinstance(o, float):
            return fmt_float(o) if math.isfinite(o) else "null"
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = [f"{pad}{json.dumps(str(k))}: {emit(v, level + 1)}" for k, v in o.items()]
            return "{\n" + ",\n".join(items) + "\n" + end + "}"
        if isinstance(o, list):
            if not o:
                return "[]"
            if all(isinstance(_plain(v), (int, float)) and not isinstance(v, bool) for v in o):
                return "[" + ", ".join(emit(v, level + 1) for v in o) + "]"
            items = [pad + emit(v, level + 1) for v in o]
            return "[\n" + ",\n".join(items) + "\n" + end + "]"
        raise TypeError(f"cannot serialize {type(o).__name__}")

    lines.append(emit(obj, 0))
    return "\n".join(lines) + "\n"


def csv_table(rows: list[dict], columns: list[str] | None = None) -> str:
    """Comma-separated table with a header row and LF line endings."""
    if columns is None:
        columns = list(rows[0].keys()) if rows else []
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
    writer.writerow(columns)
    for row in rows:
        out = []
        for col in columns:
            v = _plain(row.get(col, ""))
            if isinstance(v, float):
                out.append(fmt_float(v))
            else:
                out.append(v)
        writer.writerow(out)
    return buf.getvalue()
