"""Reading and writing point clouds and JSON documents."""

import csv
import json
import math

import numpy as np

from .exceptions import PreconditionError


class InputFormatError(PreconditionError):
    """A data file could not be parsed; the message names the offending line."""


def format_float(x):
    """Shortest text that round-trips a float64 (17 significant digits)."""
    return "%.17g" % x


def read_cloud(path):
    """Read a headerless CSV of floats into an (n, d) array.

    Blank lines are skipped. Raises :class:`InputFormatError` for an empty
    file, a non-numeric or non-finite entry, or rows of unequal length.
    """
    rows, width = [], None
    with open(path, newline="") as fh:
        for lineno, record in enumerate(csv.reader(fh), start=1):
            if not record or all(not cell.strip() for cell in record):
                continue
            try:
                row = [float(cell) for cell in record]
            except ValueError:
                raise InputFormatError(f"{path}:{lineno}: non-numeric entry in {record!r}") from None
            if not all(math.isfinite(v) for v in row):
                raise InputFormatError(f"{path}:{lineno}: non-finite entry")
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise InputFormatError(
                    f"{path}:{lineno}: expected {width} columns, found {len(row)}")
            rows.append(row)
    if not rows:
        raise InputFormatError(f"{path}: no data rows")
    return np.asarray(rows, dtype=np.float64)


def write_cloud(path, X):
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    with open(path, "w", newline="") as fh:
        for row in X:
            fh.write(",".join(format_float(v) for v in row) + "\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        # JSON has no NaN/inf; use strings that float() parses back
        return v if math.isfinite(v) else str(v)
    return obj


def write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(_jsonable(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputFormatError(f"{path}:{exc.lineno}: invalid JSON ({exc.msg})") from None


def write_results_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(format_float(v) if isinstance(v, float) else str(v)
                              for v in row) + "\n")
