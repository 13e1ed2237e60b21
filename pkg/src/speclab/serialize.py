"""Flat binary field container and CSV export.

Binary layout (all little-endian):

    bytes 0..3    magic b"SPLF"
    bytes 4..7    uint32 format version (currently 1)
    bytes 8..11   uint32 dimension d (1 or 2)
    bytes 12..15  uint32 samples per axis n
    bytes 16..23  float64 period length L
    bytes 24..27  uint32 layout tag (0 = physical samples, row-major)
    bytes 28..    n**d float64 samples, C order

CSV export writes RFC-4180 rows `x,value` (1D) or `x,y,value` (2D) with a
header line; floats use repr-shortest formatting via %.17g so round-trips are
exact.
"""

from __future__ import annotations

import csv
import struct
from pathlib import Path

import numpy as np

from .grid import Field, Grid

__all__ = ["write_field", "read_field", "field_to_csv"]

_MAGIC = b"SPLF"
_VERSION = 1
_LAYOUT_PHYSICAL = 0
_HEADER = struct.Struct("<4sIIIdI")


def write_field(f: Field, path: str | Path) -> None:
    g = f.grid
    payload = np.ascontiguousarray(f.values, dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(_MAGIC, _VERSION, g.dim, g.n, g.length, _LAYOUT_PHYSICAL))
        fh.write(payload.tobytes())


def read_field(path: str | Path) -> Field:
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) != _HEADER.size:
            raise ValueError(f"{path}: truncated header")
        magic, version, dim, n, length, layout = _HEADER.unpack(head)
        if magic != _MAGIC:
            raise ValueError(f"{path}: not a field container (bad magic {magic!r})")
        if version != _VERSION:
            raise ValueError(f"{path}: unsupported container version {version}")
        if layout != _LAYOUT_PHYSICAL:
            raise ValueError(f"{path}: unsupported layout tag {layout}")
        grid = Grid(n=int(n), length=float(length), dim=int(dim))
        raw = fh.read(8 * n**dim)
        if len(raw) != 8 * n**dim:
            raise ValueError(f"{path}: truncated payload")
    values = np.frombuffer(raw, dtype="<f8").reshape(grid.shape)
    return Field.from_values(grid, values)


def field_to_csv(f: Field, path: str | Path) -> None:
    g = f.grid
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        if g.dim == 1:
            w.writerow(["x", "value"])
            for x, v in zip(g.x_nodes, f.values):
                w.writerow([f"{x:.17g}", f"{v:.17g}"])
        else:
            w.writerow(["x", "y", "value"])
            x = g.x_nodes
            vals = f.values
            for i in range(g.n):
                for j in range(g.n):
                    w.writerow([f"{x[i]:.17g}", f"{x[j]:.17g}", f"{vals[i, j]:.17g}"])
