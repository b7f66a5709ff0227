"""Tabular reports: CSV or JSON on stdout or a file, with trailing '#' comment lines."""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any

from oscint.config import ReportFormat
from oscint.errors import OutputError

if TYPE_CHECKING:
    from pathlib import Path

Cell = float | int | bool | str


@dataclass(frozen=True)
class Report:
    columns: list[str]
    rows: list[list[Cell]]
    comments: list[str] = field(default_factory=list)
    failed: bool = False  # a --check style mismatch; the CLI exits 2 after writing

    def __post_init__(self) -> None:
        for row in self.rows:
            if len(row) != len(self.columns):
                msg = f"row {row!r} has {len(row)} cells for {len(self.columns)} columns"
                raise OutputError(msg)


def _format_cell(value: Cell) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_cell(text: str) -> Cell:
    if text in ("true", "false"):
        return text == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def _json_cell(value: Cell) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    return value


def emit_report(report: Report, fmt: ReportFormat = ReportFormat.CSV) -> bytes:
    """Serialize a report. CSV uses '.' decimals and repr-exact floats."""
    if fmt is ReportFormat.JSON:
        payload = {
            "columns": report.columns,
            "data": [[_json_cell(v) for v in row] for row in report.rows],
            "comments": report.comments,
        }
        return (json.dumps(payload, indent=2) + "\n").encode("utf-8")

    buffer = io.StringIO()
    if report.columns:
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(report.columns)
        writer.writerows([_format_cell(v) for v in row] for row in report.rows)
    for comment in report.comments:
        buffer.write(f"# {comment}\n")
    return buffer.getvalue().encode("utf-8")


def parse_report(data: bytes, fmt: ReportFormat = ReportFormat.CSV) -> Report:
    """Inverse of `emit_report`."""
    text = data.decode("utf-8")
    if fmt is ReportFormat.JSON:
        payload = json.loads(text)
        rows = [
            [_parse_cell(v) if isinstance(v, str) else v for v in row] for row in payload["data"]
        ]
        return Report(columns=payload["columns"], rows=rows, comments=payload["comments"])

    comments = [line[2:] for line in text.splitlines() if line.startswith("# ")]
    body = [line for line in text.splitlines() if line and not line.startswith("#")]
    if not body:
        return Report(columns=[], rows=[], comments=comments)
    parsed = list(csv.reader(body))
    rows = [[_parse_cell(cell) for cell in row] for row in parsed[1:]]
    return Report(columns=parsed[0], rows=rows, comments=comments)


def write_report(report: Report, fmt: ReportFormat, output: Path | None = None) -> None:
    """Write to `output`, or to stdout when it is None."""
    payload = emit_report(report, fmt)
    try:
        if output is None:
            sys.stdout.buffer.write(payload)
            sys.stdout.flush()
        else:
            output.write_bytes(payload)
    except OSError as e:
        msg = f"cannot write report to {output or 'stdout'}: {e}"
        raise OutputError(msg) from e
