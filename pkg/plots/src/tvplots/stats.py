"""The two statistics the plotting side computes itself.

Everything else is taken verbatim from the CSVs.
"""

from __future__ import annotations

import math
from typing import Dict, List, Sequence, Tuple

import numpy as np

# central fit window for the rate slope; mirrors the experiment harness
SLOPE_FIT_RANGE = (1e-2, 1e2)


def asymmetric_deviation(values: Sequence[float]) -> Tuple[float, float, float]:
    """(mean, lower, upper): one-sided mean deviations from the mean.

    upper is the mean of (x − m) over values above the mean, lower the mean of
    (m − x) over values below it; a side without values contributes 0.
    """
    v = np.asarray(list(values), dtype=float)
    m = float(v.mean())
    above = v[v > m]
    below = v[v < m]
    upper = float((above - m).mean()) if above.size else 0.0
    lower = float((m - below).mean()) if below.size else 0.0
    return m, lower, upper


def bin_summaries(rows: List[dict]) -> Dict[int, dict]:
    """Per-bin exact percentage and L¹ mean with asymmetric deviations."""
    bins: Dict[int, dict] = {}
    for b in sorted({r["bin"] for r in rows}):
        sub = [r for r in rows if r["bin"] == b]
        errors = [r["l1_error"] for r in sub]
        mean, lower, upper = asymmetric_deviation(errors)
        bins[b] = {
            "exact_percent": 100.0 * sum(r["exact"] for r in sub) / len(sub),
            "l1_mean": mean,
            "l1_lower": lower,
            "l1_upper": upper,
            "count": len(sub),
        }
    return bins


def mean_errors_by_delta(rows: List[dict]) -> Tuple[np.ndarray, np.ndarray]:
    by_delta: Dict[float, list] = {}
    for r in rows:
        by_delta.setdefault(r["delta_noise"], []).append(r["l1_error"])
    deltas = np.array(sorted(by_delta))
    means = np.array([np.mean(by_delta[d]) for d in deltas])
    return deltas, means


def fit_slope(deltas: np.ndarray, means: np.ndarray, fit_range=SLOPE_FIT_RANGE) -> float:
    """Least-squares slope of log10(mean error) vs log10(δ) on the central window."""
    mask = (deltas >= fit_range[0]) & (deltas <= fit_range[1]) & (means > 0)
    if mask.sum() < 2:
        raise ValueError("need at least two noise levels inside the fit window")
    return float(np.polyfit(np.log10(deltas[mask]), np.log10(means[mask]), 1)[0])
