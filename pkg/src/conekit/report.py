"""Deterministic JSON and CSV reports.

Floats are written with 17 significant digits and keys are sorted, so the
same configuration and seed always produce byte-identical files.
Non-finite floats become ``null`` in JSON and ``nan``/``inf`` in CSV.
"""
from __future__ import annotations

import io
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

__all__ = ["Report", "format_float", "to_json", "to_csv", "emit_report"]


@dataclass
class Report:
    """Result of one command: summary fields plus a table with a fixed header."""

    command: str
    params: dict
    seed: int
    max_error: float
    tolerance: float | None
    passed: bool
    columns: list[str] = field(default_factory=list)
    rows: list[list] = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def summary(self) -> dict:
        return {
            "command": self.command,
            "params": self.params,
            "seed": self.seed,
            "max_error": self.max_error,
            "tolerance": self.tolerance,
            "pass": self.passed,
            **self.extra,
        }


def format_float(v: float) -> str:
    return format(float(v), ".17g")


def _plain(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, np.ndarray):
        return [_plain(u) for u in v.tolist()]
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def _json(v, indent: int, level: int) -> str:
    v = _plain(v)
    pad = "\n" + " " * (indent * (level + 1))
    end = "\n" + " " * (indent * level)
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return format_float(v) if math.isfinite(v) else "null"
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, dict):
        if not v:
            return "{}"
        items = [f"{_json(str(k), indent, level + 1)}: {_json(v[k], indent, level + 1)}"
                 for k in sorted(v, key=str)]
        return "{" + pad + ("," + pad).join(items) + end + "}"
    if isinstance(v, (list, tuple)):
        if not v:
            return "[]"
        return "[" + pad + ("," + pad).join(_json(u, indent, level + 1) for u in v) + end + "]"
    raise TypeError(f"cannot serialize {type(v).__name__}")


def to_json(report: Report, indent: int = 1) -> str:
    data = report.summary()
    data["columns"] = report.columns
    data["rows"] = report.rows
    return _json(data, indent, 0) + "\n"


def _cell(v) -> str:
    v = _plain(v)
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format_float(v)
    s = str(v)
    if any(c in s for c in ',"\n'):
        s = '"' + s.replace('"', '""') + '"'
    return s


def to_csv(report: Report) -> str:
    """Comment lines ``# key=value`` for the summary, then the header and rows."""
    buf = io.StringIO()
    summ = report.summary()
    for k in sorted(summ):
        v = summ[k]
        if isinstance(v, dict):
            v = ";".join(f"{a}={_cell(v[a])}" for a in sorted(v))
        else:
            v = _cell(v)
        buf.write(f"# {k}={v}\n")
    buf.write(",".join(report.columns) + "\n")
    for row in report.rows:
        buf.write(",".join(_cell(c) for c in row) + "\n")
    return buf.getvalue()


def emit_report(report: Report, fmt: str = "json", path: str | None = None) -> None:
    """Write the report to ``path`` (stdout when None); I/O errors name the path."""
    text = to_json(report) if fmt == "json" else to_csv(report)
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc.strerror or exc}") from exc
