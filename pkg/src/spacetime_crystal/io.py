"""Field dumps and plot-ready CSV tables.

A field dump is two files: ``<stem>.bin`` holding little-endian float64
``(re, im)`` pairs in row-major ``nx x nt`` order, and ``<stem>.json`` with the
grid, representation, units, flags and the SHA-256 of the binary payload.
"""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .grid import GridSpec, SpacetimeField, Units

_DTYPE = np.dtype("<c16")  # complex128 little-endian == interleaved <f8 pairs


def field_bytes(f: SpacetimeField) -> bytes:
    return np.ascontiguousarray(f.values, dtype=_DTYPE).tobytes(order="C")


def sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def save_field(f: SpacetimeField, stem: str | Path) -> tuple[Path, Path]:
    """Write ``stem.bin`` and ``stem.json``; return both paths."""
    stem = Path(stem)
    payload = field_bytes(f)
    bin_path = stem.with_suffix(".bin")
    meta_path = stem.with_suffix(".json")
    bin_path.write_bytes(payload)
    meta = {
        "format": "complex128-le-interleaved",
        "order": "row-major",
        "shape": [f.grid.nx, f.grid.nt],
        "grid": f.grid.to_dict(),
        "representation": f.representation,
        "units": {"hbar": f.units.hbar, "c": f.units.c, "m": f.units.m},
        "flags": list(f.flags),
        "sha256": sha256(payload),
    }
    meta_path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return bin_path, meta_path


def load_field(stem: str | Path) -> SpacetimeField:
    """Read a dump written by :func:`save_field`, verifying the checksum."""
    stem = Path(stem)
    meta = json.loads(stem.with_suffix(".json").read_text())
    payload = stem.with_suffix(".bin").read_bytes()
    if sha256(payload) != meta["sha256"]:
        raise ValueError(f"checksum mismatch for {stem}")
    grid = GridSpec(**meta["grid"])
    vals = np.frombuffer(payload, dtype=_DTYPE).reshape(grid.shape)
    return SpacetimeField(
        grid,
        vals,
        meta["representation"],
        Units(**meta["units"]),
        tuple(meta.get("flags", ())),
    )


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(
    path: str | Path,
    header: Sequence[str],
    rows: Iterable[Sequence],
    comments: Sequence[str] = (),
) -> Path:
    """Write a CSV with optional leading ``# comment`` lines.

    Floats are written with ``repr`` so values round-trip exactly and repeated
    runs produce byte-identical files.
    """
    path = Path(path)
    with path.open("w", newline="") as fh:
        for line in comments:
            fh.write(f"# {line}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def read_csv(path: str | Path) -> tuple[list[str], list[str], np.ndarray]:
    """Return ``(comments, header, data)`` for a numeric CSV from :func:`write_csv`."""
    comments, lines = [], []
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            comments.append(line[1:].strip())
        elif line:
            lines.append(line)
    header = lines[0].split(",")
    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    return comments, header, data.reshape(-1, len(header))


def density_csv(f: SpacetimeField, path: str | Path) -> Path:
    """``(x, t, |psi|^2)`` rows of the position representation for plotting."""
    pos = f.position
    X, T = f.grid.mesh()
    dens = np.abs(pos.values) ** 2
    rows = zip(X.ravel(), T.ravel(), dens.ravel())
    return write_csv(path, ["x", "t", "density"], rows)
