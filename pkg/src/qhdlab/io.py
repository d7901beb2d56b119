"""Snapshot dumps and run manifests.

A snapshot is two files: ``<name>.bin`` holding the raw little-endian array
in C order, and ``<name>.json`` describing it::

    {"shape": [...], "dtype": "complex128", "byteorder": "little",
     "order": "C", "t": ..., "grid": {...}, ...}
"""

from __future__ import annotations

import json
import platform
import sys
import time
from pathlib import Path

import numpy as np

from .grid import SpectralGrid

_DTYPES = {"float64": "<f8", "complex128": "<c16", "float32": "<f4", "int64": "<i8"}


def write_snapshot(path_base, array: np.ndarray, grid: SpectralGrid | None = None,
                   t: float | None = None, **extra) -> tuple:
    base = Path(path_base)
    arr = np.asarray(array)
    kind = "complex128" if np.iscomplexobj(arr) else "float64"
    data = np.ascontiguousarray(arr, dtype=_DTYPES[kind])
    bin_path = base.with_suffix(".bin")
    json_path = base.with_suffix(".json")
    bin_path.write_bytes(data.tobytes(order="C"))
    header = {"shape": list(data.shape), "dtype": kind, "byteorder": "little", "order": "C",
              "t": t, "grid": grid.to_dict() if grid is not None else None, **extra}
    json_path.write_text(json.dumps(header, indent=2))
    return bin_path, json_path


def read_snapshot(path_base) -> tuple:
    base = Path(path_base)
    header = json.loads(base.with_suffix(".json").read_text())
    raw = base.with_suffix(".bin").read_bytes()
    arr = np.frombuffer(raw, dtype=_DTYPES[header["dtype"]]).reshape(header["shape"])
    return arr.astype(header["dtype"]), header


def versions() -> dict:
    import scipy

    from . import __version__

    return {"qhdlab": __version__, "python": sys.version.split()[0], "numpy": np.__version__,
            "scipy": scipy.__version__, "platform": platform.platform()}


def write_manifest(out_dir, config: dict, status: str, wall_time: float, **extra) -> Path:
    path = Path(out_dir) / "manifest.json"
    doc = {"config": config, "status": status, "wall_time_s": wall_time,
           "finished": time.strftime("%Y-%m-%dT%H:%M:%S"), "versions": versions(), **extra}
    path.write_text(json.dumps(doc, indent=2, default=_jsonable))
    return path


def write_json(path, obj) -> Path:
    p = Path(path)
    p.write_text(json.dumps(obj, indent=2, default=_jsonable))
    return p


def _jsonable(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer, np.bool_)):
        return o.item()
    if isinstance(o, Path):
        return str(o)
    raise TypeError(f"not JSON serializable: {type(o).__name__}")
