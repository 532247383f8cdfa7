#!/usr/bin/env python3
"""Write a synthetic grayscale test image (blocks plus a disc and a diagonal
band, so the cutoff sweep shows both exactly-recoverable and curved content)."""

import sys

import numpy as np

sys.path.insert(0, "src")
from anisotv.pgm import write_pgm  # noqa: E402


def demo_image(n=120):
    vals = np.full((n, n), 0.25)
    vals[10:45, 15:70] = 0.75
    vals[60:100, 40:65] = 0.5
    x, y = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    vals[(x - 85) ** 2 + (y - 90) ** 2 < 14**2] = 0.95
    vals[np.abs((x + y) - 130) < 4] = 0.05
    return vals


if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "demo.pgm"
    write_pgm(out, demo_image())
    print(f"wrote {out}")
