"""CSV and PGM parsing for the experiment artifacts.

The plotting side reads only the documented interchange formats; no science
is recomputed here beyond the deviation and slope statistics documented in
stats.py.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass
from pathlib import Path
from typing import List

import numpy as np

EXACT_COLUMNS = {"bin", "index", "delta", "phi", "exact", "l1_error", "iterations", "wall_seconds", "flags"}
CONV_COLUMNS = {"image_id", "delta_noise", "alpha", "l1_error", "iterations"}


@dataclass(frozen=True)
class FigureSpec:
    """Inputs, output path and figure kind for one rendering job."""

    inputs: tuple
    output: str
    kind: str  # bars | rate | grid

    def __post_init__(self):
        if self.kind not in ("bars", "rate", "grid"):
            raise ValueError(f"unknown figure kind {self.kind!r}")
        for p in self.inputs:
            if not Path(p).exists():
                raise FileNotFoundError(p)


def _as_bool(text: str) -> bool:
    return text.strip().lower() in ("1", "true", "yes")


def read_exact_csv(path) -> List[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if not EXACT_COLUMNS.issubset(reader.fieldnames or ()):
            raise ValueError(f"{path}: expected exact-recovery columns, got {reader.fieldnames}")
        rows = [
            {
                "bin": int(r["bin"]),
                "index": int(r["index"]),
                "delta": float(r["delta"]),
                "phi": int(r["phi"]),
                "exact": _as_bool(r["exact"]),
                "l1_error": float(r["l1_error"]),
            }
            for r in reader
        ]
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return rows


def read_conv_csv(path) -> List[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if not CONV_COLUMNS.issubset(reader.fieldnames or ()):
            raise ValueError(f"{path}: expected convergence columns, got {reader.fieldnames}")
        rows = [
            {
                "image_id": int(r["image_id"]),
                "delta_noise": float(r["delta_noise"]),
                "alpha": float(r["alpha"]),
                "l1_error": float(r["l1_error"]),
            }
            for r in reader
        ]
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return rows


def read_pgm(path) -> np.ndarray:
    """Minimal P2/P5 reader returning floats in [0, 1]."""
    data = Path(path).read_bytes()
    if data[:2] not in (b"P2", b"P5"):
        raise ValueError(f"not a PGM file: {path}")
    binary = data[:2] == b"P5"
    pos = 2
    tokens = []
    while len(tokens) < 3:
        m = re.match(rb"\s*(?:#[^\n]*\n)*\s*(\S+)", data[pos:])
        if not m:
            raise ValueError(f"truncated PGM header: {path}")
        tokens.append(m.group(1))
        pos += m.end()
    width, height, maxval = (int(t) for t in tokens)
    if binary:
        pos += 1
        dtype = np.dtype(">u2") if maxval > 255 else np.uint8
        img = np.frombuffer(data, dtype=dtype, count=width * height, offset=pos).reshape(height, width)
        return img.astype(float) / maxval
    values = np.array(data[pos:].split(), dtype=float)
    return values.reshape(height, width) / maxval
