"""Report serialization.

JSON reports keep the key order produced by ``run`` (documented in the
README) and print every float with 17 significant digits, which round-trips
IEEE doubles exactly. Non-finite floats become ``null``.

CSV reports are a header plus one summary row with the columns in
``CSV_COLUMNS``.
"""
from __future__ import annotations

import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, TextIO

REPORT_SCHEMA_VERSION = "1"

CSV_COLUMNS = (
    "family",
    "method",
    "converged",
    "iterations",
    "residual",
    "s1",
    "s2",
    "max_deviation_gap",
    "saddle_gap_g1",
    "saddle_gap_g2",
    "is_nash",
    "verified",
    "closed_form_error",
    "exit_code",
    "seconds",
)


@dataclass
class RunReport:
    data: dict[str, Any]
    exit_code: int
    csv_row: dict[str, Any] = field(default_factory=dict)


def _format_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    text = format(x, ".17g")
    if all(ch not in text for ch in ".eEn"):
        text += ".0"
    return text


def _write(value: Any, out: list[str], indent: int) -> None:
    pad = "  " * indent
    if value is None or isinstance(value, bool):
        out.append(json.dumps(value))
    elif isinstance(value, int):
        out.append(str(value))
    elif isinstance(value, float):
        out.append(_format_float(value))
    elif isinstance(value, str):
        out.append(json.dumps(value, ensure_ascii=False))
    elif isinstance(value, dict):
        if not value:
            out.append("{}")
            return
        out.append("{\n")
        items = list(value.items())
        for k, (key, item) in enumerate(items):
            out.append(f"{pad}  {json.dumps(str(key), ensure_ascii=False)}: ")
            _write(item, out, indent + 1)
            out.append(",\n" if k < len(items) - 1 else "\n")
        out.append(f"{pad}}}")
    elif isinstance(value, (list, tuple)):
        if not value:
            out.append("[]")
            return
        if all(isinstance(v, (int, float, bool)) or v is None for v in value):
            parts: list[str] = []
            for v in value:
                _write(v, parts, 0)
            out.append("[" + ", ".join(parts) + "]")
            return
        out.append("[\n")
        for k, item in enumerate(value):
            out.append(f"{pad}  ")
            _write(item, out, indent + 1)
            out.append(",\n" if k < len(value) - 1 else "\n")
        out.append(f"{pad}]")
    elif hasattr(value, "item"):
        _write(value.item(), out, indent)
    else:
        raise TypeError(f"cannot serialize {type(value).__name__}")


def to_json(data: dict[str, Any]) -> str:
    out: list[str] = []
    _write(data, out, 0)
    out.append("\n")
    return "".join(out)


def to_csv(row: dict[str, Any]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    cells = []
    for col in CSV_COLUMNS:
        v = row.get(col)
        if v is None:
            cells.append("")
        elif isinstance(v, bool):
            cells.append("true" if v else "false")
        elif isinstance(v, float):
            cells.append(_format_float(v) if math.isfinite(v) else "")
        else:
            cells.append(str(v))
    writer.writerow(cells)
    return buf.getvalue()


def emit_report(report: RunReport, fmt: str = "json", destination: str | Path | TextIO | None = None) -> None:
    """Write ``report`` as JSON or CSV to a path, an open stream, or stdout.

    Raises:
        OSError: the destination cannot be written.
    """
    if fmt == "json":
        text = to_json(report.data)
    elif fmt == "csv":
        text = to_csv(report.csv_row)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    if destination is None:
        sys.stdout.write(text)
    elif hasattr(destination, "write"):
        destination.write(text)
    else:
        Path(destination).write_text(text, encoding="utf-8")
