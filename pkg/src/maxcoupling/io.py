"""CSV/TSV/JSON readers and writers used by the command line."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .errors import EmptyMeasure, NonFinite, ParseError


def _fmt(v) -> str:
    # repr of a float round-trips exactly and is stable across runs
    return repr(float(v))


def read_table(path, columns: tuple[str, ...]) -> np.ndarray:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from exc
    rows = [r for r in csv.reader(text.splitlines()) if r and any(c.strip() for c in r)]
    if not rows:
        raise EmptyMeasure(f"{path} is empty")
    header = tuple(c.strip() for c in rows[0])
    if header != columns:
        raise ParseError(f"{path}: expected header {','.join(columns)}, got {','.join(header)}")
    body = rows[1:]
    if not body:
        raise EmptyMeasure(f"{path} has a header but no rows")
    out = np.empty((len(body), len(columns)))
    for n, r in enumerate(body, start=2):
        if len(r) != len(columns):
            raise ParseError(f"{path}:{n}: expected {len(columns)} fields, got {len(r)}")
        try:
            out[n - 2] = [float(c) for c in r]
        except ValueError as exc:
            raise ParseError(f"{path}:{n}: {exc}") from exc
    if not np.all(np.isfinite(out)):
        raise NonFinite(f"{path}: non-finite value")
    return out


def read_measure_rows(path) -> np.ndarray:
    return read_table(path, ("x", "p"))


def read_quotes(path) -> np.ndarray:
    return read_table(path, ("strike", "price"))


def read_coupling_rows(path) -> np.ndarray:
    return read_table(path, ("x", "y", "mass"))


def write_csv(path, header: tuple[str, ...], rows, sep: str = ",") -> None:
    lines = [sep.join(header)]
    for r in rows:
        lines.append(sep.join(v if isinstance(v, str) else _fmt(v) for v in r))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_measure(path, mu) -> None:
    write_csv(path, ("x", "p"), zip(mu.x, mu.p))


def write_coupling(path, pi) -> None:
    write_csv(path, ("x", "y", "mass"), zip(pi.x, pi.y, pi.mass))


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
        f = float(obj)
        if math.isnan(f):
            return None
        if math.isinf(f):
            return "inf" if f > 0 else "-inf"
        return f
    return obj


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")
