import csv

import numpy as np
import pytest


@pytest.fixture
def exact_csv(tmp_path):
    """Synthetic exact-recovery CSV matching the harness schema."""
    path = tmp_path / "exact.csv"
    rows = []
    rng = np.random.default_rng(0)
    for b in range(1, 11):
        for i in range(5):
            exact = b >= 4 or i % 2 == 0
            rows.append(
                {
                    "bin": b, "index": i, "delta": 0.01 * b, "phi": 18,
                    "exact": exact,
                    "l1_error": 10 ** (-8 if exact else -4) * (1 + rng.random()),
                    "iterations": 1000, "wall_seconds": 1.0, "flags": "",
                }
            )
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
        writer.writeheader()
        writer.writerows(rows)
    return path


@pytest.fixture
def conv_csv(tmp_path):
    path = tmp_path / "conv.csv"
    rows = []
    deltas = 10.0 ** np.linspace(-3, 3, 10)
    for img in range(3):
        for d in deltas:
            rows.append(
                {
                    "image_id": img, "delta_noise": d, "alpha": 35.7 * np.sqrt(d),
                    "l1_error": 0.03 * d**0.5 * (1 + 0.1 * img), "iterations": 2000,
                }
            )
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
        writer.writeheader()
        writer.writerows(rows)
    return path


def write_tiny_pgm(path, values):
    v = np.clip(np.asarray(values, float), 0, 1)
    q = np.rint(v * 255).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(f"P5 {v.shape[1]} {v.shape[0]} 255\n".encode())
        fh.write(q.tobytes())


@pytest.fixture
def sweep_images(tmp_path):
    paths = []
    rng = np.random.default_rng(1)
    for k, phi in enumerate([3, 6, 9, 12, 15, 18, 21, 24, 27, 30, 33, 36]):
        vals = np.zeros((20, 20))
        vals[2 : 4 + k, 3 : 6 + k % 5] = 0.9
        p = tmp_path / f"recon_phi{phi:03d}.pgm"
        write_tiny_pgm(p, vals)
        paths.append(p)
    return paths
