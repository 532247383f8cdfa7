"""Double-logarithmic noise-convergence plot with reference rate curves."""

from __future__ import annotations

import argparse
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .io import read_conv_csv
from .stats import fit_slope, mean_errors_by_delta


def render_rate(rows, out_path):
    """Mean L¹ error vs δ with δ^(1/4) and δ^(1/2) curves anchored at the
    largest-δ data point, plus the fitted-slope annotation."""
    deltas, means = mean_errors_by_delta(rows)
    slope = fit_slope(deltas, means)
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.loglog(deltas, means, "o-", color="tab:blue", label="mean L1 error")
    anchor = means[-1]
    ax.loglog(deltas, anchor * (deltas / deltas[-1]) ** 0.25, "--", color="tab:orange",
              label=r"$\delta^{1/4}$ reference")
    ax.loglog(deltas, anchor * (deltas / deltas[-1]) ** 0.5, ":", color="tab:green",
              label=r"$\delta^{1/2}$ reference")
    ax.set_xlabel(r"noise level $\delta$")
    ax.set_ylabel("L1 error")
    ax.annotate(f"fitted slope {slope:.3f}", xy=(0.05, 0.9), xycoords="axes fraction")
    ax.legend(loc="lower right")
    fig.tight_layout()
    fig.savefig(out_path, dpi=110)
    plt.close(fig)
    return slope


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="plot_rate", description=__doc__)
    parser.add_argument("csv")
    parser.add_argument("out")
    args = parser.parse_args(argv)
    try:
        rows = read_conv_csv(args.csv)
        slope = render_rate(rows, args.out)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out} (fitted slope {slope:.3f})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
