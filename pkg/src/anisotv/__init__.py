"""Anisotropic-TV reconstruction of piecewise-constant torus images from
finitely many Fourier coefficients, with dual-certificate verification."""

from .grids import BlockImage, Image, LineSet, TorusGrid, check_assumption_1, min_separation, rasterize
from .fourier import NoiseSpec, SpectralData, add_noise, adjoint, forward
from .tv import GradientField, aniso_tv, div, grad, l1_error, levelset_sym_diff, weighted_tv
from .solver import SolveReport, SolverConfig, exact_recovery_check, solve
from .kernels import ApproxChar, approx_char, dirichlet, fejer
from .certificates import (
    CertificateBundle,
    CoefficientSystem,
    build_certificate_I,
    build_certificate_II,
    build_certificate_III,
    solve_sign_interpolation,
    verify_polynomial_bounds,
)
from .datagen import DatasetSpec, assign_values_greedy, make_invalid, sample_jump_points, select_conv_subset

__version__ = "0.1.0"
