"""Language-neutral output files.

Tables are tab-separated text with ``#`` header lines carrying the scenario,
config hash and a unit tag on every column. Matrices are raw little-endian
float64 with a JSON sidecar giving shape and meaning. Every value is
written with 17 significant digits so reloading is lossless.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .. import __version__

FMT = ".17g"


def write_table(path: Path, columns: dict[str, tuple[str, np.ndarray]], header: dict) -> Path:
    """``columns`` maps name -> (unit, 1-D array)."""
    names = list(columns)
    data = [np.asarray(columns[n][1], dtype=float) for n in names]
    lengths = {len(d) for d in data}
    if len(lengths) > 1:
        raise ValueError(f"columns differ in length: {lengths}")
    lines = [f"# jcsim {__version__}"]
    lines += [f"# {k}: {v}" for k, v in header.items()]
    lines.append("# " + "\t".join(f"{n}[{columns[n][0]}]" for n in names))
    rows = zip(*data) if data else []
    for row in rows:
        lines.append("\t".join(format(x, FMT) for x in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def read_table(path) -> tuple[dict[str, np.ndarray], dict[str, str], dict[str, str]]:
    """Return (columns, units, header) from a file written by :func:`write_table`."""
    header, names, units, rows = {}, [], {}, []
    lines = Path(path).read_text().splitlines()
    comment = [ln[2:] for ln in lines if ln.startswith("# ")]
    colspec = comment[-1].split("\t")
    for item in colspec:
        name, unit = item[:-1].split("[", 1)
        names.append(name)
        units[name] = unit
    for ln in comment[1:-1]:
        k, _, v = ln.partition(": ")
        header[k] = v
    for ln in lines:
        if ln and not ln.startswith("#"):
            rows.append([float(x) for x in ln.split("\t")])
    arr = np.array(rows, dtype=float).reshape(len(rows), len(names))
    return {n: arr[:, i] for i, n in enumerate(names)}, units, header


def write_matrix(path: Path, m: np.ndarray, meta: dict) -> Path:
    """Complex matrix as interleaved (re, im) float64 plus ``<name>.json`` sidecar."""
    m = np.asarray(m, dtype=complex)
    raw = np.stack([m.real, m.imag], axis=-1).astype("<f8")
    path.write_bytes(raw.tobytes())
    side = {"file": path.name, "dtype": "<f8", "shape": list(m.shape),
            "layout": "row-major, trailing axis (re, im)"} | meta
    path.with_suffix(".json").write_text(json.dumps(side, indent=2, sort_keys=True) + "\n")
    return path


def read_matrix(path) -> tuple[np.ndarray, dict]:
    path = Path(path)
    meta = json.loads(path.with_suffix(".json").read_text())
    raw = np.frombuffer(path.read_bytes(), dtype=meta["dtype"])
    raw = raw.reshape(tuple(meta["shape"]) + (2,))
    return raw[..., 0] + 1j * raw[..., 1], meta


def write_json(path: Path, obj: dict) -> Path:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, default=_jsonable) + "\n")
    return path


def _jsonable(x):
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, complex):
        return [x.real, x.imag]
    raise TypeError(f"not JSON serializable: {type(x).__name__}")
