"""JSON and CSV emission with 17-significant-digit floats.

``repr`` already round-trips doubles, but the digit count varies; fixing it at
17 keeps payloads byte-stable across platforms and Python versions.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from typing import Any, Iterable, Sequence

import numpy as np

CSV_SCHEMA_VERSION = 1


def fmt_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return "null"
    s = format(x, ".17g")
    # keep it a JSON float so it reads back as float, not int
    if not any(c in s for c in ".e"):
        s += ".0"
    return s


def _plain(obj: Any) -> Any:
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return obj


def dumps(obj: Any, indent: int | None = 2, _level: int = 0) -> str:
    """Deterministic JSON: sorted keys, fixed float format."""
    obj = _plain(obj)
    pad = "" if indent is None else "\n" + " " * (indent * (_level + 1))
    end = "" if indent is None else "\n" + " " * (indent * _level)
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {dumps(v, indent, _level + 1)}"
                 for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))]
        return "{" + ",".join(items) + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[" + ",".join(pad + dumps(v, indent, _level + 1) for v in obj) + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def config_hash(config: Any) -> str:
    """Short sha256 over the canonical compact serialization."""
    return hashlib.sha256(dumps(config, indent=None).encode()).hexdigest()[:16]


def csv_cell(v: Any) -> str:
    v = _plain(v)
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return "" if math.isnan(v) else format(v, ".17g")
    return str(v)


def csv_text(columns: Sequence[str], rows: Iterable[Sequence[Any]], kind: str) -> str:
    buf = io.StringIO()
    buf.write(f"# mawc {kind} schema v{CSV_SCHEMA_VERSION}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([csv_cell(v) for v in r])
    return buf.getvalue()


def read_csv(text: str) -> list[dict[str, str]]:
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))
