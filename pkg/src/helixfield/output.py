"""CSV snapshots and run manifests.

Numbers are written with 17 significant digits so that re-parsing gives
back the exact doubles.  Data files carry no timestamps; the manifest
holds the only one, which keeps repeated runs byte-identical.
"""
from __future__ import annotations

import csv
import datetime
import hashlib
import io
import json
import os
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from . import __version__

OUTPUT_ROOT_ENV = "HELIXFIELD_OUTPUT_ROOT"


class OutputError(OSError):
    """An output path could not be created or written."""


class Snapshot(NamedTuple):
    step: int
    time: float
    columns: Mapping[str, np.ndarray]
    meta: Mapping | None = None  # per-snapshot diagnostics for the header block


def fmt(value) -> str:
    return format(float(value), ".17g")


def resolve_output_dir(configured, default: str) -> Path:
    """``output_dir`` from the config, re-rooted under ``$HELIXFIELD_OUTPUT_ROOT`` if set."""
    path = Path(configured if configured is not None else default)
    root = os.environ.get(OUTPUT_ROOT_ENV)
    if root and not path.is_absolute():
        path = Path(root) / path
    return path


def _prepare(directory: Path) -> None:
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"cannot create output directory {directory}: {exc.strerror}") from exc


def _write(path: Path, text: str) -> None:
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror}") from exc


def _render(rows: Iterable[Sequence], header: Sequence[str], metadata: Mapping | None) -> str:
    buf = io.StringIO()
    for key, value in (metadata or {}).items():
        buf.write(f"# {key} = {json.dumps(value, sort_keys=True)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def _rows(columns: Mapping[str, np.ndarray], schema: Sequence[str], prefix=()):
    missing = [c for c in schema if c not in columns]
    extra = [c for c in columns if c not in schema]
    if missing or extra:
        raise ValueError(f"columns do not match schema (missing {missing}, unexpected {extra})")
    arrays = [np.asarray(columns[c]) for c in schema]
    n = len(arrays[0]) if arrays else 0
    if any(len(a) != n for a in arrays):
        raise ValueError("columns differ in length")
    for i in range(n):
        yield [*prefix, *(fmt(a[i]) for a in arrays)]


def emit_csv(
    series: Sequence[Snapshot],
    schema: Sequence[str],
    directory,
    stem: str,
    long_format: bool = False,
    metadata: Mapping | None = None,
) -> list[Path]:
    """Write ``series`` as one file per snapshot or a single long-format file.

    Per-snapshot files are named ``{stem}_{step:06d}.csv``.  The long
    format prepends ``step`` and ``t`` columns and is written to
    ``{stem}.csv``.  An empty series yields a header-only ``{stem}.csv``.
    """
    directory = Path(directory)
    _prepare(directory)
    schema = list(schema)
    if long_format or not series:
        header = ["step", "t", *schema] if long_format else schema
        rows = (r for s in series for r in _rows(s.columns, schema, (str(s.step), fmt(s.time))))
        path = directory / f"{stem}.csv"
        _write(path, _render(rows, header, metadata))
        return [path]
    paths = []
    for s in series:
        path = directory / f"{stem}_{s.step:06d}.csv"
        meta = {**metadata, "step": s.step, "t": float(s.time), **(s.meta or {})} if metadata is not None else None
        _write(path, _render(_rows(s.columns, schema), schema, meta))
        paths.append(path)
    return paths


def emit_table(rows: Sequence[Sequence], header: Sequence[str], path) -> Path:
    """Small mixed-type table (labels and numbers); floats get 17 digits."""
    path = Path(path)
    _prepare(path.parent)
    cells = ([fmt(v) if isinstance(v, float) else str(v) for v in row] for row in rows)
    _write(path, _render(cells, header, None))
    return path


def emit_text(text: str, path) -> Path:
    path = Path(path)
    _prepare(path.parent)
    _write(path, text)
    return path


def read_csv(path) -> tuple[dict, dict[str, np.ndarray]]:
    """Parse a file written by :func:`emit_csv` into (metadata, columns)."""
    metadata, lines = {}, []
    with open(path, newline="") as fh:
        for line in fh:
            if line.startswith("# "):
                key, value = line[2:].rstrip("\n").split(" = ", 1)
                metadata[key] = json.loads(value)
            else:
                lines.append(line)
    reader = csv.reader(lines)
    header = next(reader)
    rows = list(reader)
    cols = {}
    for i, name in enumerate(header):
        vals = [float(r[i]) for r in rows]
        cols[name] = np.array(vals, dtype=float)
    return metadata, cols


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def write_manifest(directory, config: Mapping, diagnostics: Mapping, files: Sequence[Path]) -> Path:
    directory = Path(directory)
    _prepare(directory)
    doc = {
        "tool": "helixfield",
        "version": __version__,
        "created": datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds"),
        "config": config,
        "diagnostics": diagnostics,
        "files": [{"name": p.name, "sha256": _sha256(p)} for p in files],
    }
    path = directory / "manifest.json"
    _write(path, json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n")
    return path


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, float) and not np.isfinite(obj):
        return str(obj)
    return obj
