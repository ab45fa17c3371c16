"""Reading income files and writing reports."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import re

from .sample import IncomeSample

__all__ = ["read_incomes_csv", "write_report", "format_report", "report_dict"]

_DECIMAL = re.compile(r"[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?")


def _parse_income(text: str, line: int, y0: float) -> float:
    if not _DECIMAL.fullmatch(text):
        raise ValueError(f"line {line}: {text!r} is not a decimal number")
    value = float(text)
    if not math.isfinite(value):
        raise ValueError(f"line {line}: {text!r} is not finite")
    if value < 0:
        raise ValueError(f"line {line}: negative income {text}")
    if value < y0:
        raise ValueError(f"line {line}: income {text} lies below y0={y0:g}")
    return value


def read_incomes_csv(path, y0: float = 0.0) -> IncomeSample:
    """Read one income per row, with an optional ``income`` header line.

    Blank lines are skipped.  Errors name the offending 1-based line.
    """
    if y0 < 0:
        raise ValueError(f"y0 must be non-negative, got {y0}")
    with open(path, newline="", encoding="utf-8-sig") as fh:
        rows = list(csv.reader(fh))
    incomes = []
    seen_data = False
    for line, row in enumerate(rows, start=1):
        cells = [c.strip() for c in row]
        if not any(cells):
            continue
        if len(cells) != 1:
            raise ValueError(f"line {line}: expected a single column, found {len(cells)}")
        text = cells[0]
        if not seen_data and not incomes and text.lower() == "income":
            seen_data = True
            continue
        seen_data = True
        incomes.append(_parse_income(text, line, y0))
    if not incomes:
        raise ValueError(f"empty file: no incomes in {os.fspath(path)}")
    return IncomeSample(incomes, y0=y0)


def report_dict(report) -> dict:
    """Flat ``dict`` view of a report object (or the dict itself)."""
    if isinstance(report, dict):
        return dict(report)
    if hasattr(report, "to_dict"):
        return report.to_dict()
    raise TypeError(f"cannot serialize {type(report).__name__}")


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def format_report(report, fmt: str = "json") -> str:
    """Render a report as JSON or as a two-column ``key,value`` CSV table."""
    data = report_dict(report)
    if fmt == "json":
        return json.dumps(data, indent=2, allow_nan=True) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        for key, value in data.items():
            writer.writerow([key, _cell(value)])
        return buf.getvalue()
    raise ValueError(f"unknown report format {fmt!r}; expected json or csv")


def write_report(report, fmt: str = "json", path=None) -> str:
    """Write the rendered report to ``path`` (or return it only when ``path`` is None)."""
    text = format_report(report, fmt)
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text
