"""Random ground-truth generation: binned jump points, greedy consistent values,
and sign-violating counterparts.

Jump points are rejection-sampled on a coarse integer grid until the minimum
cyclic gap falls into the requested bin.  Values are assigned greedily in
random order inside the running admissible range so every generated image has
consistent jump signs along each line; a bounded correction step resamples
the most recently fixed conflicting neighbour when a range degenerates.
"""

from __future__ import annotations

import csv
import hashlib
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .grids import BlockImage, check_assumption_1

__all__ = [
    "DatasetSpec",
    "InfeasibleBinError",
    "GenerationError",
    "default_bins",
    "sample_jump_points",
    "assign_values_greedy",
    "make_invalid",
    "select_conv_subset",
    "generate_dataset",
    "load_dataset",
    "dataset_digest",
]


class InfeasibleBinError(RuntimeError):
    """Rejection sampling exhausted its attempt budget for a bin."""


class GenerationError(RuntimeError):
    """Greedy value assignment ran out of correction budget."""


def default_bins(count: int = 10) -> List[Tuple[float, float]]:
    """Half-open separation bins [k·0.01 − 0.005, k·0.01 + 0.005), k = 1..count."""
    return [(k * 0.01 - 0.005, k * 0.01 + 0.005) for k in range(1, count + 1)]


@dataclass(frozen=True)
class DatasetSpec:
    bins: tuple = tuple(default_bins())
    per_bin: int = 20
    grid_points: int = 120
    seed: int = 0

    def __post_init__(self):
        if self.per_bin < 1:
            raise ValueError("per_bin must be >= 1")
        spans = sorted(self.bins)
        for (lo1, hi1), (lo2, _) in zip(spans, spans[1:]):
            if lo2 < hi1 - 1e-12:
                raise ValueError("bins must be disjoint")
        object.__setattr__(self, "bins", tuple((float(lo), float(hi)) for lo, hi in self.bins))


def _min_gap_idx(idx: np.ndarray, gp: int) -> int:
    if idx.size == 1:
        return gp
    return int(np.diff(np.r_[idx, idx[0] + gp]).min())


def sample_jump_points(
    bin_interval: Tuple[float, float],
    grid_points: int,
    rng: np.random.Generator,
    max_attempts: int = 10**6,
):
    """Draw grid-aligned jump points with min separation inside the bin.

    Resamples M, N ∈ {2,…,20} and fresh point sets until acceptance.
    Returns (xs_idx, ys_idx) integer tuples.
    """
    lo, hi = bin_interval
    # feasible iff some achievable separation k/grid_points (1 <= k <= gp/2,
    # two points on a circle cannot be farther than half the circumference)
    # lies inside [lo, hi)
    achievable = [k for k in range(1, grid_points // 2 + 1) if lo <= k / grid_points < hi]
    if not achievable:
        raise InfeasibleBinError(
            f"bin [{lo}, {hi}) contains no achievable separation on a {grid_points}-grid"
        )
    for _ in range(max_attempts):
        M = int(rng.integers(2, 21))
        N = int(rng.integers(2, 21))
        xs = np.sort(rng.choice(grid_points, size=M, replace=False))
        ys = np.sort(rng.choice(grid_points, size=N, replace=False))
        delta = min(_min_gap_idx(xs, grid_points), _min_gap_idx(ys, grid_points)) / grid_points
        if lo <= delta < hi:
            return tuple(int(i) for i in xs), tuple(int(i) for i in ys)
    raise InfeasibleBinError(
        f"no sample with separation in [{lo}, {hi}) after {max_attempts} attempts"
    )


def _neighbors(m: int, n: int, M: int, N: int):
    """Cell neighbours with the line separating them: (cell, axis, line index)."""
    return [
        ((m, (n + 1) % N), "h", (n + 1) % N),
        ((m, (n - 1) % N), "h", n),
        (((m + 1) % M, n), "v", (m + 1) % M),
        (((m - 1) % M, n), "v", m),
    ]


def _admissible_range(cell, values, known, line_sign, M, N, lo=0.0, hi=1.0):
    """Intersect [lo,hi] with the inequalities from set neighbours on signed lines."""
    m, n = cell
    for (nb, axis, line) in _neighbors(m, n, M, N):
        if not known[nb]:
            continue
        s = line_sign[axis][line]
        if s is None or s == 0:
            continue
        v = values[nb]
        # jump across a "v" line m is values[m,:] - values[m-1,:]; the cell on
        # the +side of the line must exceed the one on the -side when s = +1
        if axis == "v":
            ours_plus = line == m  # line sits at our left edge -> we are the +side
        else:
            ours_plus = line == n
        want_ge = (s > 0) == ours_plus
        if want_ge:
            lo = max(lo, v)
        else:
            hi = min(hi, v)
    return lo, hi


def _binding_neighbors(cell, values, known, line_sign, M, N, lo, hi):
    """Set neighbours whose inequality attains the degenerate range endpoints."""
    m, n = cell
    contributors = {}
    for (nb, axis, line) in _neighbors(m, n, M, N):
        if not known[nb]:
            continue
        s = line_sign[axis][line]
        if s is None or s == 0:
            continue
        ours_plus = (line == m) if axis == "v" else (line == n)
        want_ge = (s > 0) == ours_plus
        v = values[nb]
        if want_ge and v == lo:
            contributors[nb] = "ge"
        elif not want_ge and v == hi:
            contributors[nb] = "le"
    return contributors


class _RepairBudget:
    def __init__(self, limit: int):
        self.left = limit

    def spend(self, shape):
        self.left -= 1
        if self.left < 0:
            raise GenerationError(
                f"correction budget exhausted (grid {shape[0]}x{shape[1]})"
            )


def _constraining_neighbors(cell, values, known, line_sign, M, N):
    """(neighbour, kind) pairs: kind 'ge' when the neighbour bounds us from below."""
    m, n = cell
    out = []
    for (nb, axis, line) in _neighbors(m, n, M, N):
        if not known[nb]:
            continue
        s = line_sign[axis][line]
        if s is None or s == 0:
            continue
        ours_plus = (line == m) if axis == "v" else (line == n)
        out.append((nb, "ge" if (s > 0) == ours_plus else "le"))
    return out


def _force_bound(side, root, bound, values, known, line_sign, M, N, rng, budget):
    """Move a set cell's value to the given side of `bound`, cascading into
    every set neighbour whose constraint blocks the move (worklist, no
    recursion).  Feasible because the all-equal assignment satisfies every
    sign constraint; the budget guards degenerate cyclic cascades."""
    stack = [root]
    while stack:
        budget.spend((M, N))
        cell = stack[-1]
        lo, hi = _admissible_range(cell, values, known, line_sign, M, N)
        blockers = []
        for nb, kind in _constraining_neighbors(cell, values, known, line_sign, M, N):
            if side == "le" and kind == "ge" and values[nb] > bound:
                blockers.append(nb)
            elif side == "ge" and kind == "le" and values[nb] < bound:
                blockers.append(nb)
        blockers = [b for b in blockers if b not in stack]
        if blockers:
            stack.extend(blockers)
            continue
        lo, hi = _admissible_range(cell, values, known, line_sign, M, N)
        if side == "le":
            values[cell] = rng.uniform(lo, min(hi, bound)) if lo <= min(hi, bound) else lo
        else:
            values[cell] = rng.uniform(max(lo, bound), hi) if max(lo, bound) <= hi else hi
        stack.pop()


def assign_values_greedy(
    xs_idx: Sequence[int],
    ys_idx: Sequence[int],
    rng: np.random.Generator,
    grid_points: int = 120,
    max_corrections: int = 1000,
    restarts: int = 25,
) -> BlockImage:
    """Assign block values in random order under the running sign constraints.

    Degenerate ranges trigger a bounded cascade that relaxes the most recently
    fixed blocking neighbours; if a cascade exhausts its budget the whole
    assignment restarts with a fresh random order (bounded-retry policy).
    """
    last_error = None
    for _ in range(restarts):
        try:
            return _assign_once(xs_idx, ys_idx, rng, grid_points, max_corrections)
        except GenerationError as exc:
            last_error = exc
    raise GenerationError(f"greedy assignment failed after {restarts} restarts: {last_error}")


def _assign_once(
    xs_idx: Sequence[int],
    ys_idx: Sequence[int],
    rng: np.random.Generator,
    grid_points: int,
    max_corrections: int,
) -> BlockImage:
    M, N = len(xs_idx), len(ys_idx)
    values = np.zeros((M, N))
    known = np.zeros((M, N), dtype=bool)
    line_sign = {"v": [None] * M, "h": [None] * N}
    order = [(m, n) for m in range(M) for n in range(N)]
    rng.shuffle(order)
    set_order: List[tuple] = []
    corrections = 0

    def fix_signs(cell):
        m, n = cell
        for (nb, axis, line) in _neighbors(m, n, M, N):
            if not known[nb] or line_sign[axis][line] is not None:
                continue
            if axis == "v":
                plus, minus = ((m, n), nb) if line == m else (nb, (m, n))
            else:
                plus, minus = ((m, n), nb) if line == n else (nb, (m, n))
            jump = values[plus] - values[minus]
            if jump != 0.0:
                line_sign[axis][line] = 1 if jump > 0 else -1

    budget = _RepairBudget(max_corrections)
    for cell in order:
        while True:
            lo, hi = _admissible_range(cell, values, known, line_sign, M, N)
            if lo <= hi:
                break
            corrections += 1
            # relax the most recently fixed neighbour whose constraint binds,
            # cascading into its own blockers where necessary
            contributors = _binding_neighbors(cell, values, known, line_sign, M, N, lo, hi)
            binding = None
            for prev in reversed(set_order):
                if prev in contributors:
                    binding = prev
                    break
            if binding is None:
                raise GenerationError("degenerate range without a set neighbour")
            try:
                if contributors[binding] == "ge":
                    _force_bound("le", binding, hi, values, known, line_sign, M, N, rng, budget)
                else:
                    _force_bound("ge", binding, lo, values, known, line_sign, M, N, rng, budget)
            except RecursionError:
                raise GenerationError(f"correction cascade diverged (grid {M}x{N})")
        values[cell] = rng.uniform(lo, hi)
        known[cell] = True
        set_order.append(cell)
        fix_signs(cell)

    block = BlockImage(xs_idx=tuple(xs_idx), ys_idx=tuple(ys_idx), grid_points=grid_points, values=values)
    ok, violations = check_assumption_1(block)
    if not ok:
        raise GenerationError(f"generated block violates sign consistency: {violations[:3]}")
    return block


def make_invalid(block: BlockImage, rng: np.random.Generator) -> BlockImage:
    """Swap one neighbouring value pair so the sign consistency breaks."""
    ok, _ = check_assumption_1(block)
    if not ok:
        raise ValueError("input block must satisfy the sign-consistency assumption")
    M, N = block.shape
    pairs = [((m, n), ((m + 1) % M, n)) for m in range(M) for n in range(N)]
    pairs += [((m, n), (m, (n + 1) % N)) for m in range(M) for n in range(N)]
    order = rng.permutation(len(pairs))
    for k in order:
        a, b = pairs[k]
        values = block.values.copy()
        values[a], values[b] = values[b], values[a]
        if (values == block.values).all():
            continue
        candidate = BlockImage(
            xs_idx=block.xs_idx, ys_idx=block.ys_idx, grid_points=block.grid_points, values=values
        )
        still_ok, _ = check_assumption_1(candidate)
        if not still_ok:
            return candidate
    raise GenerationError("no neighbouring swap violates the sign consistency")


def select_conv_subset(valid_results: Sequence[dict], per_bin: int) -> List[dict]:
    """Up to per_bin exactly-recovered records per bin, lowest index first.

    Records need keys bin, index, exact (as written by the exact-recovery CSV)
    and are filtered to the Φ=18 runs when a phi key is present.
    """
    chosen: List[dict] = []
    bins = sorted({int(r["bin"]) for r in valid_results})
    for b in bins:
        hits = [
            r
            for r in valid_results
            if int(r["bin"]) == b
            and _as_bool(r["exact"])
            and ("phi" not in r or int(r["phi"]) == 18)
        ]
        hits.sort(key=lambda r: int(r["index"]))
        chosen.extend(hits[:per_bin])
    return chosen


def _as_bool(x) -> bool:
    if isinstance(x, str):
        return x.strip().lower() in ("1", "true", "yes")
    return bool(x)


def _instance_rng(seed: int, bin_index: int, index: int, salt: int = 0) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, bin_index, index, salt]))


def generate_dataset(spec: DatasetSpec, out_dir, invalid: bool = True):
    """Write valid (and optionally invalid) block images plus manifest CSVs.

    Layout: <out>/valid/bin<k>_<i>.block and <out>/invalid/..., with a
    manifest.csv per subset (columns bin,index,delta,M,N,file).
    """
    out = Path(out_dir)
    subsets = ["valid"] + (["invalid"] if invalid else [])
    for sub in subsets:
        (out / sub).mkdir(parents=True, exist_ok=True)
    manifests = {sub: [] for sub in subsets}
    for b, interval in enumerate(spec.bins, start=1):
        for i in range(spec.per_bin):
            rng = _instance_rng(spec.seed, b, i)
            xs, ys = sample_jump_points(interval, spec.grid_points, rng)
            attempt = 0
            while True:
                try:
                    block = assign_values_greedy(xs, ys, rng, grid_points=spec.grid_points)
                    break
                except GenerationError:
                    attempt += 1
                    if attempt > 50:
                        raise
                    rng = _instance_rng(spec.seed, b, i, salt=attempt)
            rows = {"valid": block}
            if invalid:
                rows["invalid"] = make_invalid(block, rng)
            for sub, blk in rows.items():
                name = f"bin{b:02d}_{i:03d}.block"
                blk.save(out / sub / name)
                M, N = blk.shape
                manifests[sub].append(
                    {"bin": b, "index": i, "delta": blk.delta(), "M": M, "N": N, "file": f"{sub}/{name}"}
                )
    for sub in subsets:
        with open(out / sub / "manifest.csv", "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=["bin", "index", "delta", "M", "N", "file"])
            writer.writeheader()
            writer.writerows(manifests[sub])
    return manifests


def load_dataset(out_dir, subset: str = "valid"):
    """Read back (manifest rows, BlockImage list) for one subset."""
    out = Path(out_dir)
    rows = []
    blocks = []
    with open(out / subset / "manifest.csv", newline="") as fh:
        for row in csv.DictReader(fh):
            rows.append(row)
            blocks.append(BlockImage.load(out / row["file"]))
    return rows, blocks


def dataset_digest(out_dir, subset: str = "valid") -> str:
    """Stable content hash of all serialized instances of a subset."""
    out = Path(out_dir) / subset
    h = hashlib.sha256()
    for path in sorted(out.glob("*.block")):
        h.update(path.name.encode())
        h.update(path.read_bytes())
    return h.hexdigest()
