"""CSV/JSON emission of result rows."""

from __future__ import annotations

import csv
import io
import json
import math
import re
import sys
from pathlib import Path
from typing import Any, Sequence

Row = dict[str, Any]

_INT = re.compile(r"^[+-]?\d+$")


def format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        text = f"{value:.17g}"
        if math.isfinite(value) and not any(c in text for c in ".e"):
            text += ".0"
        return text
    return str(value)


def parse_value(text: str) -> Any:
    if text == "":
        return ""
    if _INT.match(text):
        return int(text)
    try:
        return float(text)
    except ValueError:
        return text


def _check_rows(rows: Sequence[Row]) -> list[str]:
    if not rows:
        raise ValueError("nothing to emit: no rows")
    columns = list(rows[0])
    for i, row in enumerate(rows):
        if list(row) != columns:
            raise ValueError(f"row {i} has columns {list(row)}, expected {columns}")
    return columns


def to_csv(rows: Sequence[Row]) -> str:
    columns = _check_rows(rows)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row[c]) for c in columns])
    return buf.getvalue()


def to_json(rows: Sequence[Row]) -> str:
    _check_rows(rows)
    plain = [{k: _plain(v) for k, v in row.items()} for row in rows]
    return json.dumps(plain, indent=1) + "\n"


def _plain(value):
    if hasattr(value, "item"):
        return value.item()
    return value


def emit(rows: Sequence[Row], format: str = "csv", path: str | Path | None = None) -> None:
    """Write ``rows`` to ``path`` (stdout when ``None`` or ``"-"``)."""
    if format == "csv":
        text = to_csv(rows)
    elif format == "json":
        text = to_json(rows)
    else:
        raise ValueError(f"unknown format {format!r}; expected csv or json")
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def read_rows(path: str | Path, format: str | None = None) -> list[Row]:
    """Read rows written by :func:`emit` back into Python values."""
    path = Path(path)
    format = format or path.suffix.lstrip(".") or "csv"
    text = path.read_text()
    if format == "json":
        return json.loads(text)
    reader = csv.reader(io.StringIO(text, newline=""))
    header = next(reader)
    return [dict(zip(header, map(parse_value, rec))) for rec in reader]
