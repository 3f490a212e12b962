"""Point-set files: CSV (one point per row, optional header) or JSON arrays."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from kdisc.errors import UsageError
from kdisc.geometry import as_points


def _is_json(path, fmt):
    if fmt is not None:
        return fmt == "json"
    return str(path).lower().endswith(".json")


def parse_points(text: str, fmt: str = "csv") -> np.ndarray:
    if fmt == "json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise UsageError(f"invalid JSON point file: {exc}") from None
        if isinstance(data, dict):
            data = data.get("points")
        if not isinstance(data, list) or not data:
            raise UsageError("JSON point file must hold a non-empty array of points")
        return as_points(data)
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    if not rows:
        raise UsageError("point file is empty")
    try:
        [float(c) for c in rows[0]]
    except ValueError:
        rows = rows[1:]  # header
    try:
        A = np.array([[float(c) for c in r] for r in rows], dtype=np.float64)
    except ValueError as exc:
        raise UsageError(f"non-numeric value in point file: {exc}") from None
    if A.ndim != 2:
        raise UsageError("rows in the point file have differing lengths")
    return as_points(A)


def read_points(path, fmt: str | None = None) -> np.ndarray:
    text = Path(path).read_text()
    return parse_points(text, "json" if _is_json(path, fmt) else "csv")


def format_points(P, fmt: str = "csv") -> str:
    P = as_points(P)
    if fmt == "json":
        return json.dumps(P.tolist()) + "\n"
    return "".join(",".join(f"{v:.17g}" for v in row) + "\n" for row in P)


def write_points(path, P, fmt: str | None = None) -> None:
    Path(path).write_text(format_points(P, "json" if _is_json(path, fmt) else "csv"))
