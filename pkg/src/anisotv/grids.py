"""Periodic grids, pixel images and piecewise-constant block images on the unit torus.

Conventions used throughout the package:

* the torus is [0,1)², all coordinate arithmetic wraps modulo 1;
* pixel (i, j) of an n×n grid sits at (i/n, j/n), so values[i, j] samples
  u(i/n, j/n) with the first axis along x and the second along y;
* block images follow the half-open convention [x_m, x_{m+1}) × [y_n, y_{n+1});
* jump coordinates are stored as integer indices on a coarse jump grid
  (grid_points divisions of [0,1)) so separations are exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

__all__ = [
    "TorusGrid",
    "Image",
    "BlockImage",
    "LineSet",
    "GridAlignmentError",
    "rasterize",
    "min_separation",
    "check_assumption_1",
    "cyclic_dist",
]


class GridAlignmentError(ValueError):
    """A jump coordinate does not coincide with a pixel grid line."""


def cyclic_dist(a, b):
    """Periodic distance on R/Z, elementwise."""
    d = np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)) % 1.0
    return np.minimum(d, 1.0 - d)


@dataclass(frozen=True)
class TorusGrid:
    """Uniform n×n pixel grid on the torus."""

    n_pixels: int

    def __post_init__(self):
        if self.n_pixels < 2:
            raise ValueError(f"n_pixels must be >= 2, got {self.n_pixels}")

    @property
    def spacing(self) -> float:
        return 1.0 / self.n_pixels

    def coords(self) -> np.ndarray:
        """Pixel coordinates i/n along one axis."""
        return np.arange(self.n_pixels) / self.n_pixels


@dataclass
class Image:
    """Real pixel field on a TorusGrid; addressing is periodic in both axes."""

    grid: TorusGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        n = self.grid.n_pixels
        if v.shape != (n, n):
            raise ValueError(f"values must be {n}x{n}, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("image contains non-finite entries")
        self.values = v

    def at(self, i: int, j: int) -> float:
        n = self.grid.n_pixels
        return float(self.values[i % n, j % n])


def _line_sign(jumps: np.ndarray) -> Optional[int]:
    """Common sign of the jumps across one line: ±1, 0 (no jump), None (mixed)."""
    pos = bool(np.any(jumps > 0))
    neg = bool(np.any(jumps < 0))
    if pos and neg:
        return None
    if pos:
        return 1
    if neg:
        return -1
    return 0


@dataclass
class BlockImage:
    """Piecewise-constant image with axis-aligned jumps on a coarse jump grid.

    values[m, n] is the gray level of the block [x_m, x_{m+1}) × [y_n, y_{n+1}).
    sign_v[m] / sign_h[n] hold the common jump sign across each line
    (None where the jumps change sign, i.e. the consistency assumption fails).
    """

    xs_idx: tuple
    ys_idx: tuple
    grid_points: int
    values: np.ndarray
    sign_v: tuple = field(init=False)
    sign_h: tuple = field(init=False)

    def __post_init__(self):
        self.xs_idx = tuple(int(i) for i in self.xs_idx)
        self.ys_idx = tuple(int(i) for i in self.ys_idx)
        if not self.xs_idx or not self.ys_idx:
            raise ValueError("block image needs at least one jump line per axis")
        if list(self.xs_idx) != sorted(set(self.xs_idx)) or list(self.ys_idx) != sorted(set(self.ys_idx)):
            raise ValueError("jump indices must be sorted and distinct")
        gp = self.grid_points
        if any(not (0 <= i < gp) for i in self.xs_idx + self.ys_idx):
            raise ValueError("jump indices must lie in [0, grid_points)")
        v = np.asarray(self.values, dtype=float)
        if v.shape != (len(self.xs_idx), len(self.ys_idx)):
            raise ValueError(f"values must be {len(self.xs_idx)}x{len(self.ys_idx)}, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("block values contain non-finite entries")
        self.values = v
        jx = v - np.roll(v, 1, axis=0)  # jump across x-line m: values[m] - values[m-1]
        jy = v - np.roll(v, 1, axis=1)
        self.sign_v = tuple(_line_sign(jx[m, :]) for m in range(v.shape[0]))
        self.sign_h = tuple(_line_sign(jy[:, n]) for n in range(v.shape[1]))

    @property
    def xs(self) -> np.ndarray:
        return np.asarray(self.xs_idx, dtype=float) / self.grid_points

    @property
    def ys(self) -> np.ndarray:
        return np.asarray(self.ys_idx, dtype=float) / self.grid_points

    @property
    def shape(self):
        return self.values.shape

    def delta(self) -> float:
        """Minimum cyclic gap, exact via the integer jump grid."""
        gp = self.grid_points
        gaps = []
        for idx in (self.xs_idx, self.ys_idx):
            a = np.asarray(idx)
            if len(a) == 1:
                gaps.append(gp)
            else:
                d = np.diff(np.r_[a, a[0] + gp])
                gaps.append(int(d.min()))
        return min(gaps) / gp

    # Line-oriented text format: "M N grid_points", index rows, value rows,
    # then the derived sign rows ("x" marks a sign-inconsistent line).
    def to_text(self) -> str:
        M, N = self.shape
        lines = [f"{M} {N} {self.grid_points}"]
        lines.append(" ".join(str(i) for i in self.xs_idx))
        lines.append(" ".join(str(i) for i in self.ys_idx))
        for m in range(M):
            lines.append(" ".join(repr(float(x)) for x in self.values[m]))
        lines.append(" ".join("x" if s is None else str(s) for s in self.sign_v))
        lines.append(" ".join("x" if s is None else str(s) for s in self.sign_h))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "BlockImage":
        rows = [r for r in (line.strip() for line in text.splitlines()) if r]
        M, N, gp = (int(t) for t in rows[0].split())
        xs_idx = tuple(int(t) for t in rows[1].split())
        ys_idx = tuple(int(t) for t in rows[2].split())
        if len(xs_idx) != M or len(ys_idx) != N:
            raise ValueError("index row length does not match header")
        values = np.array([[float(t) for t in rows[3 + m].split()] for m in range(M)])
        block = cls(xs_idx=xs_idx, ys_idx=ys_idx, grid_points=gp, values=values)
        # sign rows are derived data; validate if present
        if len(rows) >= 5 + M:
            stored_v = rows[3 + M].split()
            stored_h = rows[4 + M].split()
            derived_v = ["x" if s is None else str(s) for s in block.sign_v]
            derived_h = ["x" if s is None else str(s) for s in block.sign_h]
            if stored_v != derived_v or stored_h != derived_h:
                raise ValueError("stored sign rows disagree with values")
        return block

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_text())

    @classmethod
    def load(cls, path) -> "BlockImage":
        with open(path) as fh:
            return cls.from_text(fh.read())


@dataclass(frozen=True)
class LineSet:
    """Finite unions of vertical lines {x_m}×T and horizontal lines T×{y_n}."""

    vertical: tuple = ()
    horizontal: tuple = ()
    radius: float = 0.0

    def __post_init__(self):
        for c in tuple(self.vertical) + tuple(self.horizontal):
            if not (0.0 <= c < 1.0):
                raise ValueError(f"line coordinate {c} outside [0,1)")
        if self.radius < 0:
            raise ValueError("radius must be >= 0")
        object.__setattr__(self, "vertical", tuple(float(c) for c in self.vertical))
        object.__setattr__(self, "horizontal", tuple(float(c) for c in self.horizontal))

    @classmethod
    def from_block(cls, block: BlockImage, radius: float = 0.0) -> "LineSet":
        return cls(vertical=tuple(block.xs), horizontal=tuple(block.ys), radius=radius)

    def dist(self, x, y) -> np.ndarray:
        """Periodic distance of points (x, y) to the union of lines."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        d = np.full(np.broadcast(x, y).shape, np.inf)
        if self.vertical:
            dv = np.min([cyclic_dist(x, c) for c in self.vertical], axis=0)
            d = np.minimum(d, np.broadcast_to(dv, d.shape))
        if self.horizontal:
            dh = np.min([cyclic_dist(y, c) for c in self.horizontal], axis=0)
            d = np.minimum(d, np.broadcast_to(dh, d.shape))
        return d

    def contains(self, x, y) -> np.ndarray:
        """Membership test for the open radius-R neighbourhood, periodic."""
        return self.dist(x, y) < self.radius


def min_separation(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Minimum cyclic gap within xs and within ys (not across the two lists).

    A single-point list has gap 1 by the wrap-around convention.
    """
    gaps = []
    for pts in (xs, ys):
        a = np.sort(np.asarray(list(pts), dtype=float))
        if a.size == 0:
            raise ValueError("point list must be nonempty")
        if np.any(a < 0) or np.any(a >= 1):
            raise ValueError("points must lie in [0,1)")
        if a.size == 1:
            gaps.append(1.0)
        else:
            d = np.diff(np.r_[a, a[0] + 1.0])
            gaps.append(float(d.min()))
    return min(gaps)


def rasterize(block: BlockImage, grid: TorusGrid) -> Image:
    """Sample a block image on a pixel grid; every jump must sit on a grid line."""
    n = grid.n_pixels
    gp = block.grid_points
    xpix = [i * n / gp for i in block.xs_idx]
    ypix = [i * n / gp for i in block.ys_idx]
    for p in xpix + ypix:
        if p != int(p):
            raise GridAlignmentError(
                f"jump coordinate {p * grid.spacing} is not aligned with the {n}-grid"
            )
    xpix = np.asarray([int(p) for p in xpix])
    ypix = np.asarray([int(p) for p in ypix])
    # pixel i belongs to the block whose left edge is the last jump <= i/n (cyclically)
    bx = np.searchsorted(xpix, np.arange(n), side="right") - 1
    by = np.searchsorted(ypix, np.arange(n), side="right") - 1
    bx[bx < 0] = len(xpix) - 1
    by[by < 0] = len(ypix) - 1
    return Image(grid=grid, values=block.values[np.ix_(bx, by)])


def check_assumption_1(block: BlockImage):
    """Check the consistent-jump-direction assumption.

    Returns (ok, violations); each violation is (axis, line_index, segment_index)
    with axis "v" for a vertical line x_m and "h" for a horizontal line y_n.
    """
    v = block.values
    jx = v - np.roll(v, 1, axis=0)
    jy = v - np.roll(v, 1, axis=1)
    violations = []
    for m in range(v.shape[0]):
        if _line_sign(jx[m, :]) is None:
            s = np.sign(jx[m, :])
            ref = s[np.nonzero(s)[0][0]]
            violations.extend(("v", m, int(n)) for n in np.nonzero(s == -ref)[0])
    for n in range(v.shape[1]):
        if _line_sign(jy[:, n]) is None:
            s = np.sign(jy[:, n])
            ref = s[np.nonzero(s)[0][0]]
            violations.extend(("h", int(n), int(m)) for m in np.nonzero(s == -ref)[0])
    return (not violations), violations
