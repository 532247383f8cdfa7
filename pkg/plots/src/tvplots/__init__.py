"""Figure generation for the TV-reconstruction experiment CSV artifacts."""

from .io import FigureSpec, read_conv_csv, read_exact_csv, read_pgm
from .stats import asymmetric_deviation, bin_summaries, fit_slope, mean_errors_by_delta
from .bars import render_bars
from .rate import render_rate
from .grid import render_grid

__version__ = "0.1.0"
