"""Per-bin exact-recovery bars with the L¹ error line on a log scale."""

from __future__ import annotations

import argparse
import sys
import warnings

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .io import read_exact_csv
from .stats import bin_summaries


def render_bars(rows, out_path, title=None):
    """Blue bars: exact %; red line: mean L¹ with asymmetric deviations."""
    phis = sorted({r["phi"] for r in rows})
    fig, axes = plt.subplots(len(phis), 1, figsize=(7, 3.6 * len(phis)), squeeze=False)
    for ax, phi in zip(axes[:, 0], phis):
        sub = [r for r in rows if r["phi"] == phi]
        bins = bin_summaries(sub)
        present = sorted(bins)
        missing = [b for b in range(present[0], present[-1] + 1) if b not in bins]
        if missing:
            warnings.warn(f"empty bins omitted: {missing}")
        centers = [0.01 * b for b in bins]
        ax.bar(centers, [bins[b]["exact_percent"] for b in bins], width=0.006,
               color="tab:blue", label="exact reconstructions [%]")
        ax.set_ylim(0, 105)
        ax.set_xlabel("minimum separation bin")
        ax.set_ylabel("exact [%]", color="tab:blue")
        ax2 = ax.twinx()
        means = [bins[b]["l1_mean"] for b in bins]
        lowers = [bins[b]["l1_lower"] for b in bins]
        uppers = [bins[b]["l1_upper"] for b in bins]
        ax2.errorbar(centers, means, yerr=[lowers, uppers], color="tab:red",
                     marker="o", capsize=3, label="mean L1 error")
        ax2.set_yscale("log")
        ax2.set_ylabel("L1 error", color="tab:red")
        ax.set_title(title or f"cutoff {phi}")
    fig.tight_layout()
    fig.savefig(out_path, dpi=110)
    plt.close(fig)
    return out_path


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="plot_bars", description=__doc__)
    parser.add_argument("csv")
    parser.add_argument("out")
    parser.add_argument("--title", default=None)
    args = parser.parse_args(argv)
    try:
        rows = read_exact_csv(args.csv)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    render_bars(rows, args.out, title=args.title)
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
