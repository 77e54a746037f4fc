"""Serialization helpers: deterministic JSON and CSV report writing.

Reruns with identical config and seed must reproduce byte-identical JSON
and CSV, so reports never embed wall-clock data (that goes to the text
log) and all dictionaries serialize with sorted keys.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

FORMAT_VERSION = "msl-v1"


def jsonify(obj):
    """Recursively convert numpy scalars/arrays for the json encoder."""
    if isinstance(obj, dict):
        return {str(k): jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonify(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonify(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def write_json(payload: dict, path) -> None:
    """Write a report with the format version stamped in."""
    body = dict(payload)
    body.setdefault("format_version", FORMAT_VERSION)
    text = json.dumps(jsonify(body), sort_keys=True, indent=2) + "\n"
    Path(path).write_text(text, encoding="utf-8")


def write_csv(rows: list[dict], path, columns: list[str] | None = None) -> None:
    """Write trace rows with a fixed column order, full float precision."""
    if columns is None:
        columns = sorted({k for row in rows for k in row})
    lines = [",".join(columns)]
    for row in rows:
        cells = []
        for c in columns:
            v = jsonify(row.get(c, ""))
            if isinstance(v, float):
                cells.append(repr(v))
            elif isinstance(v, (list, dict)):
                cells.append('"' + json.dumps(v).replace('"', "'") + '"')
            else:
                cells.append(str(v))
        lines.append(",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def validate_report(path) -> list[str]:
    """Self-validation: every JSON output carries config and format version."""
    problems = []
    p = Path(path)
    files = sorted(p.glob("*.json")) if p.is_dir() else [p]
    if not files:
        problems.append(f"no JSON reports under {p}")
    for f in files:
        try:
            data = json.loads(f.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            problems.append(f"{f.name}: unreadable ({exc})")
            continue
        if data.get("format_version") != FORMAT_VERSION:
            problems.append(f"{f.name}: missing or wrong format_version")
        if "config" not in data:
            problems.append(f"{f.name}: missing config")
    return problems
