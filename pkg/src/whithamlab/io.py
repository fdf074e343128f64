"""CSV and JSON artifacts with versioned schemas."""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

SCHEMA_VERSION = 1
PROFILE_SCHEMA = "whithamlab.profile"
KERNEL_SCHEMA = "whithamlab.kernel"
TRAJECTORY_SCHEMA = "whithamlab.trajectory"
BATCH_SCHEMA = "whithamlab.batch"


def _fmt(v) -> str:
    return repr(float(v))


def _header(schema: str, meta: dict) -> str:
    items = " ".join(f"{k}={meta[k]}" for k in sorted(meta))
    return f"# schema={schema} version={SCHEMA_VERSION} {items}".rstrip() + "\n"


def _write_rows(path, schema, meta, columns: Sequence[str], rows: Iterable):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(_header(schema, meta))
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else v for v in r])
    return path


def parse_header(line: str) -> dict:
    if not line.startswith("#"):
        raise ValueError("missing '#' schema header")
    out = {}
    for tok in line[1:].split():
        if "=" in tok:
            k, v = tok.split("=", 1)
            out[k] = v
    return out


def write_profile_csv(path, x, values, **meta):
    return _write_rows(path, PROFILE_SCHEMA, meta, ("x", "value"),
                       zip(np.asarray(x, dtype=float), np.asarray(values, dtype=float)))


def read_profile_csv(path):
    """Returns (x, values, header metadata)."""
    with open(path, newline="") as fh:
        meta = parse_header(fh.readline())
        if meta.get("schema") != PROFILE_SCHEMA:
            raise ValueError(f"{path}: expected schema {PROFILE_SCHEMA}, got {meta.get('schema')}")
        if int(meta.get("version", -1)) != SCHEMA_VERSION:
            raise ValueError(f"{path}: unsupported schema version {meta.get('version')}")
        r = csv.reader(fh)
        cols = next(r)
        if cols != ["x", "value"]:
            raise ValueError(f"{path}: unexpected columns {cols}")
        data = np.array([[float(a), float(b)] for a, b in r])
    return data[:, 0], data[:, 1], meta


def write_kernel_csv(path, table, **meta):
    x = np.asarray(table.grid.x)
    meta = {"symbol": table.symbol.name.replace(" ", ""), "L": table.grid.L, "N": table.grid.N, **meta}
    return _write_rows(path, KERNEL_SCHEMA, meta, ("x", "value", "regular_part", "singular_part"),
                       zip(x, table.values, table.regular_part, table.singular_part))


def write_trajectory_csv(path, snapshots, stride: int = 1, **meta):
    def rows():
        for t, u in snapshots:
            x = np.asarray(u.grid.x)[::stride]
            for xv, uv in zip(x, np.asarray(u.values)[::stride]):
                yield (float(t), xv, uv)
    return _write_rows(path, TRAJECTORY_SCHEMA, {"stride": stride, **meta}, ("t", "x", "u"), rows())


BATCH_COLUMNS = ("c", "sup_phi", "nu", "delta_c", "reflection_error", "crest_count")


def write_batch_csv(path, rows):
    return _write_rows(path, BATCH_SCHEMA, {}, BATCH_COLUMNS,
                       ([r[k] for k in BATCH_COLUMNS] for r in rows))


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    return obj


def write_json(path, payload: dict, kind: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = {"schema": f"whithamlab.{kind}", "schema_version": SCHEMA_VERSION, **_clean(payload)}
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")
    return path


def read_json(path) -> dict:
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"{path}: unsupported schema version {doc.get('schema_version')}")
    return doc
