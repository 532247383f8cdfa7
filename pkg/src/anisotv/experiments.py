"""Experiment drivers: exact recovery sweeps, noise-convergence runs, image
sweeps and certificate reports, all emitting CSV artifacts.

Every record is reproducible from (master seed, instance id, Φ, δ): noise
seeds are derived with SeedSequence and runs iterate in deterministic
(instance, parameter) order.
"""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .certificates import (
    CertificateError,
    SeparationError,
    build_certificate_I,
    build_certificate_II,
    build_certificate_III,
)
from .datagen import load_dataset
from .fourier import NoiseSpec, add_noise, forward
from .grids import BlockImage, Image, TorusGrid, rasterize
from .pgm import read_pgm, write_pgm
from .solver import SolverConfig, exact_recovery_check, solve
from .tv import aniso_tv, l1_error

__all__ = [
    "ExperimentRecord",
    "EXACT_FIELDS",
    "CONV_FIELDS",
    "run_exact_recovery",
    "run_convergence",
    "fit_rate_slope",
    "run_image_sweep",
    "run_certify",
    "SLOPE_FIT_RANGE",
]

# central fit window for the log-log rate slope; the extremes of the
# 1e-3..1e3 sweep saturate (solver tolerance / trivial reconstruction)
SLOPE_FIT_RANGE = (1e-2, 1e2)

EXACT_FIELDS = ["bin", "index", "delta", "phi", "exact", "l1_error", "iterations", "wall_seconds", "flags"]
CONV_FIELDS = ["image_id", "delta_noise", "alpha", "l1_error", "iterations"]


@dataclass
class ExperimentRecord:
    """One run: noiseless runs carry noise_delta = 0 and the solver's alpha."""

    bin_index: int
    delta_min: float
    phi: int
    noise_delta: float
    alpha: float
    exact: bool
    l1_error: float
    iterations: int
    wall_seconds: float

    def __post_init__(self):
        if self.l1_error < 0:
            raise ValueError("l1_error must be >= 0")

    def sane(self, tol: float = 1e-4) -> bool:
        """Exact records must sit near the solver floor: l1 <= 10·tol·area."""
        return not self.exact or self.l1_error <= 10.0 * tol


def _write_csv(path, fieldnames, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        writer.writerows(rows)


def _exact_recovery_task(args):
    """One (instance, Φ) solve; module-level so worker processes can pickle it."""
    meta, block_text, phi, grid_n, tol, cfg_fields = args
    block = BlockImage.from_text(block_text)
    grid = TorusGrid(grid_n)
    cfg = SolverConfig(**cfg_fields)
    truth = rasterize(block, grid)
    f = forward(truth, phi)
    t0 = time.perf_counter()
    u, report = solve(f, grid, cfg)
    wall = time.perf_counter() - t0
    record = ExperimentRecord(
        bin_index=int(meta["bin"]),
        delta_min=float(meta["delta"]),
        phi=phi,
        noise_delta=0.0,
        alpha=cfg.alpha,
        exact=exact_recovery_check(u, block, tol=tol),
        l1_error=l1_error(u, truth),
        iterations=report.iterations,
        wall_seconds=round(wall, 4),
    )
    flags = []
    if report.iterations >= cfg.max_iters:
        flags.append("maxiter")
    if not record.sane(tol):
        flags.append("l1-sanity")
    return {
        "bin": record.bin_index,
        "index": int(meta["index"]),
        "delta": record.delta_min,
        "phi": record.phi,
        "exact": record.exact,
        "l1_error": record.l1_error,
        "iterations": record.iterations,
        "wall_seconds": record.wall_seconds,
        "flags": ";".join(flags),
    }


def run_exact_recovery(
    dataset_dir,
    subset: str,
    phis: Sequence[int],
    out_csv,
    grid_n: int = 120,
    tol: float = 1e-4,
    solver: Optional[SolverConfig] = None,
    threads: int = 1,
    log=None,
) -> List[dict]:
    """Solve the α=0 problem for every (instance, Φ) and score exact recovery.

    threads > 1 fans the (instance, Φ) pairs over a process pool; rows are
    gathered in deterministic instance order regardless of completion order.
    """
    manifest, blocks = load_dataset(dataset_dir, subset)
    base = solver or SolverConfig(alpha=0.0, max_iters=8000, step_ratio=8.0)
    cfg_fields = {
        "alpha": base.alpha, "max_iters": base.max_iters, "tau": base.tau,
        "sigma": base.sigma, "tol": base.tol, "check_every": base.check_every,
        "step_ratio": base.step_ratio,
    }
    tasks = [
        (meta, block.to_text(), phi, grid_n, tol, cfg_fields)
        for meta, block in zip(manifest, blocks)
        for phi in phis
    ]
    if threads > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(_exact_recovery_task, tasks))
    else:
        rows = []
        for task in tasks:
            rows.append(_exact_recovery_task(task))
            if log:
                log(rows[-1])
    if out_csv:
        _write_csv(out_csv, EXACT_FIELDS, rows)
    return rows


def noise_levels(count: int = 10, lo_exp: float = -3.0, hi_exp: float = 3.0) -> np.ndarray:
    return 10.0 ** np.linspace(lo_exp, hi_exp, count)


def run_convergence(
    blocks: Sequence[BlockImage],
    phi: int,
    deltas: Sequence[float],
    out_csv,
    c_alpha: float = 1.0 / 0.028,
    grid_n: int = 120,
    seed: int = 0,
    solver: Optional[SolverConfig] = None,
    log=None,
) -> Tuple[List[dict], float]:
    """Noisy reconstructions with α = C·√δ; returns (rows, fitted slope)."""
    grid = TorusGrid(grid_n)
    rows = []
    for img_id, block in enumerate(blocks):
        truth = rasterize(block, grid)
        f = forward(truth, phi)
        for j, delta in enumerate(deltas):
            noise_seed = int(np.random.SeedSequence([seed, img_id, j]).generate_state(1)[0])
            fd = add_noise(f, NoiseSpec(delta=float(delta), seed=noise_seed))
            alpha = c_alpha * math.sqrt(delta)
            cfg = solver or SolverConfig(alpha=alpha, max_iters=4000, tol=1e-8, step_ratio=8.0)
            if cfg.alpha != alpha:
                cfg = SolverConfig(
                    alpha=alpha, max_iters=cfg.max_iters, tau=cfg.tau, sigma=cfg.sigma,
                    tol=cfg.tol, check_every=cfg.check_every, step_ratio=cfg.step_ratio,
                )
            u, report = solve(fd, grid, cfg)
            rows.append(
                {
                    "image_id": img_id,
                    "delta_noise": float(delta),
                    "alpha": alpha,
                    "l1_error": l1_error(u, truth),
                    "iterations": report.iterations,
                }
            )
            if log:
                log(rows[-1])
    slope = fit_rate_slope(rows)
    if out_csv:
        _write_csv(out_csv, CONV_FIELDS, rows)
    return rows, slope


def fit_rate_slope(rows: Sequence[dict], fit_range: Tuple[float, float] = SLOPE_FIT_RANGE) -> float:
    """Least-squares slope of log mean-L¹-error against log δ on the central range."""
    by_delta = {}
    for r in rows:
        by_delta.setdefault(float(r["delta_noise"]), []).append(float(r["l1_error"]))
    pts = [
        (math.log10(d), math.log10(np.mean(errs)))
        for d, errs in sorted(by_delta.items())
        if fit_range[0] <= d <= fit_range[1] and np.mean(errs) > 0
    ]
    if len(pts) < 2:
        raise ValueError("need at least two noise levels inside the fit range")
    x = np.array([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    return float(np.polyfit(x, y, 1)[0])


def run_image_sweep(
    image_path,
    phis: Sequence[int],
    out_dir,
    solver: Optional[SolverConfig] = None,
    log=None,
) -> List[dict]:
    """Hard-constrained reconstructions of a grayscale image per cutoff."""
    pixels = read_pgm(image_path)
    if pixels.shape[0] != pixels.shape[1]:
        raise ValueError(f"input must be square, got {pixels.shape}")
    n = pixels.shape[0]
    grid = TorusGrid(n)
    img = Image(grid=grid, values=pixels)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    base = solver or SolverConfig(alpha=0.0, max_iters=8000, step_ratio=8.0)
    rows = []
    for phi in phis:
        f = forward(img, phi)
        u, report = solve(f, grid, base)
        name = f"recon_phi{phi:03d}.pgm"
        write_pgm(out / name, u.values)
        rows.append(
            {
                "phi": phi,
                "tv": aniso_tv(u),
                "data_residual": report.constraint_residual,
                "iterations": report.iterations,
                "l1_to_input": l1_error(u, img),
                "file": name,
            }
        )
        if log:
            log(rows[-1])
    _write_csv(out / "sweep.csv", ["phi", "tv", "data_residual", "iterations", "l1_to_input", "file"], rows)
    return rows


def run_certify(block: BlockImage, phi: int, n_sign_patterns: int = 16, seed: int = 0):
    """Build and verify all three certificate families for one block.

    Returns (report_text, ok).  Separation and bound failures are reported in
    the text and flip ok to False rather than raising.
    """
    rng = np.random.default_rng(seed)
    M, N = block.shape
    sections = []
    ok = True

    def kv_block(title, pairs):
        body = "\n".join(f"  {k} = {v}" for k, v in pairs)
        sections.append(f"[{title}]\n{body}")

    try:
        b1 = build_certificate_I(block, phi)
        pairs = [("valid", b1.valid), ("kappa", f"{b1.kappa:.6g}"), ("eta", f"{b1.eta:.6g}"),
                 ("R", f"{b1.R:.6g}")]
        pairs += [(f"margin.{k}", f"{v:.3e}") for k, v in sorted(b1.margins.items())]
        kv_block("certificate-I", pairs)
        ok &= b1.valid
    except (SeparationError, CertificateError, ValueError) as exc:
        kv_block("certificate-I", [("error", str(exc))])
        ok = False

    try:
        worst = np.inf
        all_pos = True
        for _ in range(n_sign_patterns):
            signs = rng.choice([-1.0, 1.0], size=(M, N))
            rep = build_certificate_II(block, signs, phi)
            worst = min(worst, rep.min_signed_normalized)
            all_pos &= rep.passed
        kv_block(
            "certificate-II",
            [("patterns", n_sign_patterns), ("all_integrals_positive", all_pos),
             ("min_normalized_integral", f"{worst:.6g}"),
             ("reference_constant", f"{build_certificate_II(block, np.ones((M, N)), phi).reference:.6g}")],
        )
        ok &= all_pos
    except SeparationError as exc:
        kv_block("certificate-II", [("error", str(exc)), ("margin", f"{exc.margin:.3e}")])
        ok = False

    try:
        worst = np.inf
        flags: List[str] = []
        valid = True
        for _ in range(n_sign_patterns):
            signs = rng.choice([-1.0, 1.0], size=(M, N))
            b3 = build_certificate_III(block, signs, phi, direction="v")
            worst = min(worst, b3.margins["min_segment_integral"])
            flags.extend(b3.flags)
            valid &= b3.valid
        kv_block(
            "certificate-III",
            [("patterns", n_sign_patterns), ("valid", valid),
             ("min_segment_integral", f"{worst:.6g}"),
             ("reference", "0.3"), ("flags", "; ".join(flags) if flags else "none")],
        )
        ok &= valid
    except (SeparationError, CertificateError) as exc:
        kv_block("certificate-III", [("error", str(exc))])
        ok = False

    return "\n\n".join(sections) + "\n", ok
