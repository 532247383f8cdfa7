"""Command-line harness: gen / exact / converge / sweep / certify.

Exit codes: 0 success, 2 configuration error, 3 dataset or IO error,
4 certificate failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .certificates import CertificateError, SeparationError
from .datagen import DatasetSpec, default_bins, generate_dataset, load_dataset, select_conv_subset
from .experiments import (
    noise_levels,
    run_certify,
    run_convergence,
    run_exact_recovery,
    run_image_sweep,
)
from .grids import BlockImage
from .solver import SolverConfig

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_CERT = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="anisotv", description=__doc__)
    parser.add_argument("--seed", type=int, default=0, help="master seed")
    parser.add_argument("--out", type=Path, default=Path("results"), help="output directory")
    parser.add_argument("--grid", type=int, default=120, help="reconstruction grid resolution")
    parser.add_argument("--threads", type=int, default=1, help="worker processes for instance-level parallelism")
    parser.add_argument("--tol", type=float, default=1e-4, help="exact-recovery tolerance")
    parser.add_argument("--paper-scale", action="store_true", help="use the full experiment sizes")
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", help="generate valid/invalid block-image datasets")
    p_gen.add_argument("--per-bin", type=int, default=None, help="instances per separation bin")
    p_gen.add_argument("--no-invalid", action="store_true")

    p_exact = sub.add_parser("exact", help="run the exact-recovery experiment")
    p_exact.add_argument("--subset", choices=["valid", "invalid"], default="valid")
    p_exact.add_argument("--phi", type=int, nargs="+", default=[12, 18])
    p_exact.add_argument("--dataset", type=Path, default=None, help="dataset dir (default <out>/dataset)")

    p_conv = sub.add_parser("converge", help="run the noise-convergence experiment")
    p_conv.add_argument("--phi", type=int, default=18)
    p_conv.add_argument("--levels", type=int, default=None, help="number of noise levels")
    p_conv.add_argument("--per-bin", type=int, default=None, help="conv images per bin")
    p_conv.add_argument("--c-alpha", type=float, default=1.0 / 0.028)
    p_conv.add_argument("--dataset", type=Path, default=None)
    p_conv.add_argument("--exact-csv", type=Path, default=None, help="exact results used for selection")

    p_sweep = sub.add_parser("sweep", help="cutoff sweep on a grayscale PGM image")
    p_sweep.add_argument("image", type=Path)
    p_sweep.add_argument("--phi", type=int, nargs="+", default=[3, 6, 9, 12, 15, 18, 21, 24, 27, 30, 33])

    p_cert = sub.add_parser("certify", help="build and verify certificates for a block file")
    p_cert.add_argument("block", type=Path)
    p_cert.add_argument("--phi", type=int, default=18)
    p_cert.add_argument("--patterns", type=int, default=16)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except (ValueError, SeparationError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, KeyError) as exc:
        print(f"dataset/io error: {exc}", file=sys.stderr)
        return EXIT_DATA


def _dispatch(args) -> int:
    args.out.mkdir(parents=True, exist_ok=True)
    log = lambda row: print(row, flush=True)  # noqa: E731

    if args.command == "gen":
        per_bin = args.per_bin or (100 if args.paper_scale else 20)
        spec = DatasetSpec(bins=tuple(default_bins()), per_bin=per_bin, grid_points=args.grid, seed=args.seed)
        generate_dataset(spec, args.out / "dataset", invalid=not args.no_invalid)
        print(f"dataset written to {args.out / 'dataset'}")
        return EXIT_OK

    if args.command == "exact":
        dataset = args.dataset or (args.out / "dataset")
        out_csv = args.out / f"exact_{args.subset}.csv"
        rows = run_exact_recovery(
            dataset, args.subset, args.phi, out_csv, grid_n=args.grid, tol=args.tol,
            threads=args.threads, log=log if args.threads == 1 else None,
        )
        frac = sum(r["exact"] for r in rows) / max(len(rows), 1)
        print(f"{len(rows)} runs, exact fraction {frac:.3f}; wrote {out_csv}")
        return EXIT_OK

    if args.command == "converge":
        dataset = args.dataset or (args.out / "dataset")
        exact_csv = args.exact_csv or (args.out / "exact_valid.csv")
        import csv as _csv

        with open(exact_csv, newline="") as fh:
            exact_rows = list(_csv.DictReader(fh))
        per_bin = args.per_bin or (5 if args.paper_scale else 2)
        chosen = select_conv_subset(exact_rows, per_bin)
        if not chosen:
            print("no exactly-recovered instances to build the conv dataset", file=sys.stderr)
            return EXIT_DATA
        manifest, blocks = load_dataset(dataset, "valid")
        by_key = {(int(m["bin"]), int(m["index"])): b for m, b in zip(manifest, blocks)}
        conv_blocks = [by_key[(int(r["bin"]), int(r["index"]))] for r in chosen]
        levels = args.levels or (20 if args.paper_scale else 10)
        out_csv = args.out / "convergence.csv"
        rows, slope = run_convergence(
            conv_blocks,
            args.phi,
            noise_levels(levels),
            out_csv,
            c_alpha=args.c_alpha,
            grid_n=args.grid,
            seed=args.seed,
            log=log,
        )
        print(f"{len(rows)} runs over {len(conv_blocks)} images, fitted slope {slope:.3f}; wrote {out_csv}")
        return EXIT_OK

    if args.command == "sweep":
        rows = run_image_sweep(args.image, args.phi, args.out / "sweep", log=log)
        print(f"wrote {len(rows)} reconstructions to {args.out / 'sweep'}")
        return EXIT_OK

    if args.command == "certify":
        block = BlockImage.load(args.block)
        try:
            report, ok = run_certify(block, args.phi, n_sign_patterns=args.patterns, seed=args.seed)
        except (SeparationError, CertificateError) as exc:
            print(f"certificate failure: {exc}", file=sys.stderr)
            return EXIT_CERT
        report_path = args.out / "certificate_report.txt"
        report_path.write_text(report)
        print(report)
        print(f"wrote {report_path}")
        return EXIT_OK if ok else EXIT_CERT

    raise ValueError(f"unknown command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
