"""Reports: named scalars plus columnar tables, written as JSON or CSV.

Floats are always printed with 17 significant digits so every value
round-trips bitwise and identical runs give byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3


def fnv1a64(data: bytes) -> str:
    h = FNV_OFFSET
    for b in data:
        h ^= b
        h = (h * FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return f"{h:016x}"


@dataclass
class Report:
    command: str
    inputs_digest: str
    tables: dict[str, dict[str, list]] = field(default_factory=dict)
    scalars: dict[str, Any] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def add_table(self, name: str, columns: dict[str, Any]) -> None:
        self.tables[name] = {k: list(np.asarray(v).tolist()) for k, v in columns.items()}


def fmt_float(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".17g")


def _json(obj, indent: int) -> str:
    pad = "  " * indent
    inner_pad = "  " * (indent + 1)
    if isinstance(obj, bool) or obj is None:
        return {True: "true", False: "false", None: "null"}[obj]
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return f"[{fmt_float(obj.real)}, {fmt_float(obj.imag)}]"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner_pad}{_json(str(k), 0)}: {_json(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(_json(v, 0) for v in obj) + "]"
        return "[\n" + ",\n".join(inner_pad + _json(v, indent + 1) for v in obj) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _cell(v) -> str:
    if isinstance(v, (float, np.floating)):
        return fmt_float(v)
    if isinstance(v, (complex, np.complexfloating)):
        return f"{fmt_float(v.real)}{'+' if v.imag >= 0 else '-'}{fmt_float(abs(v.imag))}j"
    return str(v)


def table_csv(columns: dict[str, list]) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(columns))
    for row in zip(*columns.values()):
        w.writerow([_cell(v) for v in row])
    return buf.getvalue().encode("utf-8")


def scalars_table(r: Report) -> dict[str, list]:
    names, re, im = [], [], []
    for k, v in r.scalars.items():
        z = complex(v)
        names.append(k)
        re.append(z.real)
        im.append(z.imag)
    return {"name": names, "re": re, "im": im}


def report_files(r: Report, fmt: str) -> dict[str, bytes]:
    """File name -> contents. CSV gives one file per table plus scalars.csv."""
    if fmt == "json":
        return {f"{r.command}.json": write_report(r, "json")}
    files = {f"{name}.csv": table_csv(cols) for name, cols in r.tables.items()}
    files["scalars.csv"] = table_csv(scalars_table(r))
    return files


def write_report(r: Report, fmt: str = "json") -> bytes:
    if fmt == "json":
        doc = {
            "command": r.command,
            "inputs_digest": r.inputs_digest,
            "scalars": r.scalars,
            "tables": r.tables,
            "warnings": r.warnings,
        }
        return (_json(doc, 0) + "\n").encode("utf-8")
    if fmt == "csv":
        parts = []
        for name, data in report_files(r, "csv").items():
            parts.append(f"# {name}\n".encode("utf-8") + data)
        return b"".join(parts)
    raise ValueError(f"unknown report format {fmt!r}")
