"""Plain PGM (P2 ascii / P5 binary) grayscale image files."""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np

__all__ = ["read_pgm", "write_pgm"]


def read_pgm(path) -> np.ndarray:
    """Read a P2/P5 file into a float array scaled to [0, 1]."""
    data = Path(path).read_bytes()
    if data[:2] not in (b"P2", b"P5"):
        raise ValueError(f"not a PGM file: magic {data[:2]!r}")
    binary = data[:2] == b"P5"
    # strip comments, then parse header tokens: magic, width, height, maxval
    pos = 2
    tokens = []
    while len(tokens) < 3:
        m = re.match(rb"\s*(?:#[^\n]*\n)*\s*(\S+)", data[pos:])
        if not m:
            raise ValueError("truncated PGM header")
        tokens.append(m.group(1))
        pos += m.end()
    width, height, maxval = (int(t) for t in tokens)
    if binary:
        pos += 1  # single whitespace after maxval
        count = width * height
        dtype = np.dtype(">u2") if maxval > 255 else np.uint8
        raw = np.frombuffer(data, dtype=dtype, count=count, offset=pos)
        img = raw.reshape(height, width).astype(float)
    else:
        values = np.array(data[pos:].split(), dtype=float)
        if values.size != width * height:
            raise ValueError("pixel count does not match header")
        img = values.reshape(height, width)
    return img / maxval


def write_pgm(path, values: np.ndarray, maxval: int = 255, binary: bool = True) -> None:
    """Write a [0, 1]-scaled array as P5 (or P2) with the given maxval."""
    v = np.clip(np.asarray(values, dtype=float), 0.0, 1.0)
    q = np.rint(v * maxval).astype(np.uint16 if maxval > 255 else np.uint8)
    header = f"P5 {v.shape[1]} {v.shape[0]} {maxval}\n" if binary else f"P2 {v.shape[1]} {v.shape[0]} {maxval}\n"
    with open(path, "wb") as fh:
        fh.write(header.encode())
        if binary:
            fh.write(q.astype(">u2" if maxval > 255 else np.uint8).tobytes())
        else:
            body = "\n".join(" ".join(str(int(x)) for x in row) for row in q)
            fh.write(body.encode() + b"\n")
