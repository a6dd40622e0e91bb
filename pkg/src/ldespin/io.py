"""Table output as CSV or JSON, and CSV input for the classify/fit commands."""

from __future__ import annotations

import csv
import json
import math
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path


class OutputError(OSError):
    pass


def tool_version() -> str:
    try:
        return version("ldespin")
    except PackageNotFoundError:
        return "0+unknown"


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return "%.17g" % v
    return str(v)


def _json_value(v):
    # JSON has no inf/nan; keep them as strings so parsing stays strict
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    return v


def format_csv(rows: list[dict], columns) -> str:
    lines = [",".join(columns)]
    for r in rows:
        lines.append(",".join(_csv_escape(_cell(r.get(c))) for c in columns))
    return "\n".join(lines) + "\n"


def _csv_escape(s: str) -> str:
    if any(ch in s for ch in ',"\n'):
        return '"' + s.replace('"', '""') + '"'
    return s


def format_json(rows: list[dict], columns, metadata: dict | None = None) -> str:
    meta = {"tool_version": tool_version()}
    meta.update(metadata or {})
    doc = {
        "metadata": meta,
        "columns": list(columns),
        "rows": [{c: _json_value(r.get(c)) for c in columns} for r in rows],
    }
    return json.dumps(doc, indent=2) + "\n"


def emit(rows: list[dict], columns, fmt: str = "csv", path=None, metadata: dict | None = None) -> str:
    """Render ``rows`` with a fixed column order and write them to ``path`` (or return only).

    CSV floats carry 17 significant digits so values round-trip exactly.
    """
    if fmt == "csv":
        text = format_csv(rows, columns)
    elif fmt == "json":
        text = format_json(rows, columns, metadata)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        try:
            Path(path).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise OutputError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return text


def read_columns(path, names) -> list[tuple]:
    """Read the named float columns from a headed CSV file."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            missing = [n for n in names if n not in (reader.fieldnames or [])]
            if missing:
                raise ValueError(f"{path}: missing columns {missing}")
            return [tuple(float(row[n]) for n in names) for row in reader]
    except OSError as exc:
        raise OutputError(f"cannot read {path}: {exc.strerror or exc}") from exc
