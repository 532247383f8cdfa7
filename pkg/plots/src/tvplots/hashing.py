"""Structural figure hashes: downsampled, quantized, renderer-tolerant."""

from __future__ import annotations

import numpy as np
from matplotlib.image import imread

CELLS = 16
LEVELS = 8


def structural_signature(path) -> np.ndarray:
    """16×16 grid of 8-level gray cells; small per-cell codes, not raw bytes."""
    img = imread(path)
    if img.ndim == 3:
        img = img[..., :3].mean(axis=2)
    h, w = img.shape
    ys = np.linspace(0, h, CELLS + 1).astype(int)
    xs = np.linspace(0, w, CELLS + 1).astype(int)
    cells = np.empty((CELLS, CELLS))
    for i in range(CELLS):
        for j in range(CELLS):
            block = img[ys[i]:max(ys[i + 1], ys[i] + 1), xs[j]:max(xs[j + 1], xs[j] + 1)]
            cells[i, j] = block.mean()
    lo, hi = cells.min(), cells.max()
    span = hi - lo if hi > lo else 1.0
    return np.clip(((cells - lo) / span * LEVELS).astype(int), 0, LEVELS - 1)


def signature_distance(a: np.ndarray, b: np.ndarray) -> int:
    """Number of grid cells whose quantized level differs."""
    return int(np.sum(a != b))
