"""CSV and JSON file formats. Every write is atomic (temp file + rename)."""

from __future__ import annotations

import json
import math
import os
import tempfile
from pathlib import Path

import jsonschema
import numpy as np

from .errors import InvalidInput


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_points(path) -> np.ndarray:
    try:
        X = np.loadtxt(path, delimiter=",", ndmin=2, dtype=float)
    except (OSError, ValueError) as exc:
        raise InvalidInput(f"cannot read points from {path}: {exc}") from exc
    if X.shape[0] < 2 or X.shape[1] < 1:
        raise InvalidInput(f"{path} must hold at least two points")
    if not np.all(np.isfinite(X)):
        raise InvalidInput(f"{path} contains non-finite coordinates")
    return X


def read_labels(path, n: int | None = None) -> np.ndarray:
    try:
        with open(path, encoding="utf-8") as fh:
            labels = np.array([int(line) for line in fh if line.strip()], dtype=np.int64)
    except (OSError, ValueError) as exc:
        raise InvalidInput(f"cannot read labels from {path}: {exc}") from exc
    if n is not None and labels.shape[0] != n:
        raise InvalidInput(f"{path} has {labels.shape[0]} labels for {n} points")
    return labels


def format_float(x: float) -> str:
    # repr round-trips exactly and does not depend on locale.
    return repr(float(x))


def write_points(path, X: np.ndarray) -> None:
    rows = (",".join(format_float(v) for v in row) for row in np.asarray(X, dtype=float))
    atomic_write_text(path, "".join(r + "\n" for r in rows))


def write_labels(path, labels) -> None:
    atomic_write_text(path, "".join(f"{int(v)}\n" for v in np.asarray(labels).ravel()))


def write_csv_rows(path, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)] + [",".join(str(v) for v in row) for row in rows]
    atomic_write_text(path, "\n".join(lines) + "\n")


def finite_or_none(x):
    """JSON has no infinities: map them (and NaN) to null."""
    x = float(x)
    return x if math.isfinite(x) else None


def write_json(path, obj, schema: dict | None = None) -> None:
    if schema is not None:
        try:
            jsonschema.validate(obj, schema)
        except jsonschema.ValidationError as exc:
            raise InvalidInput(f"report failed schema validation: {exc.message}") from exc
    atomic_write_text(path, json.dumps(obj, indent=2, allow_nan=False) + "\n")


def labels_path_for(points_path) -> Path:
    """``points.csv`` -> ``points.labels.csv``; other names get ``.labels.csv`` appended."""
    p = Path(points_path)
    if p.suffix == ".csv":
        return p.with_suffix(".labels.csv")
    return p.with_name(p.name + ".labels.csv")
