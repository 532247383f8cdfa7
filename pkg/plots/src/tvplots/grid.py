"""Tiled montage of cutoff-sweep reconstructions with cutoff labels."""

from __future__ import annotations

import argparse
import math
import re
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .io import read_pgm

MAX_COLUMNS = 6


def _label_for(path) -> str:
    m = re.search(r"phi(\d+)", Path(path).stem)
    return f"cutoff {int(m.group(1))}" if m else Path(path).stem


def render_grid(image_paths, out_path):
    """Row-major tiling, at most six columns (12 images make a 2×6 grid)."""
    if not image_paths:
        raise ValueError("need at least one image")
    images = [read_pgm(p) for p in image_paths]
    shape = images[0].shape
    for p, img in zip(image_paths, images):
        if img.shape != shape:
            raise ValueError(f"size mismatch: {p} is {img.shape}, expected {shape}")
    n = len(images)
    cols = min(n, MAX_COLUMNS)
    rows = math.ceil(n / cols)
    fig, axes = plt.subplots(rows, cols, figsize=(2.0 * cols, 2.2 * rows), squeeze=False)
    for k, ax in enumerate(axes.ravel()):
        ax.set_axis_off()
        if k < n:
            ax.imshow(images[k].T, cmap="gray", vmin=0, vmax=1, origin="lower")
            ax.set_title(_label_for(image_paths[k]), fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, dpi=110)
    plt.close(fig)
    return rows, cols


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="plot_grid", description=__doc__)
    parser.add_argument("images", nargs="+")
    parser.add_argument("out")
    args = parser.parse_args(argv)
    try:
        rows, cols = render_grid(args.images, args.out)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out} ({rows}x{cols} grid)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
