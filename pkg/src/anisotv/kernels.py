"""Fejér and Dirichlet kernels and Fejér-smoothed interval indicators.

All evaluations go through the finite Fourier representation, which has no
removable singularities; the sin-ratio closed forms only appear in tests as
cross-checks away from the lattice points.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "fejer",
    "fejer_weights",
    "dirichlet",
    "interval_length",
    "ApproxChar",
    "approx_char",
]

MAX_DERIVATIVE = 4


def fejer_weights(phi: int) -> np.ndarray:
    """Triangular coefficient profile 1 − |k|/(Φ+1) for k = −Φ..Φ."""
    k = np.arange(-phi, phi + 1)
    return 1.0 - np.abs(k) / (phi + 1)


def fejer(t, phi: int, order: int = 0):
    """j-th derivative of the Fejér kernel via Σ_k (1−|k|/(Φ+1))(2πik)^j e^{2πikt}."""
    if not 0 <= order <= MAX_DERIVATIVE:
        raise ValueError(f"derivative order must be in 0..{MAX_DERIVATIVE}, got {order}")
    t = np.asarray(t, dtype=float)
    k = np.arange(-phi, phi + 1)
    w = fejer_weights(phi) * (2j * np.pi * k) ** order
    vals = np.real(np.exp(2j * np.pi * np.multiply.outer(t, k)) @ w)
    return vals if vals.ndim else float(vals)


def dirichlet(t, k: int):
    """Dirichlet kernel Σ_{j=−k}^{k} e^{2πijt}; equals 2k+1 at t = 0."""
    if k < 0:
        raise ValueError("k must be >= 0")
    t = np.asarray(t, dtype=float)
    j = np.arange(-k, k + 1)
    vals = np.real(np.exp(2j * np.pi * np.multiply.outer(t, j)).sum(axis=-1))
    return vals if vals.ndim else float(vals)


def interval_length(a: float, b: float) -> float:
    """Length of the periodic interval [a,b] ([a,1]∪[0,b] when b < a)."""
    return (b - a) % 1.0 if a != b else 0.0


def _indicator_coeffs(a: float, length: float, phi: int) -> np.ndarray:
    """Fourier coefficients of χ_{[a, a+length]} for k = −Φ..Φ."""
    k = np.arange(-phi, phi + 1)
    c = np.empty(2 * phi + 1, dtype=complex)
    nz = k != 0
    kk = k[nz]
    c[nz] = np.exp(-2j * np.pi * kk * a) * (1.0 - np.exp(-2j * np.pi * kk * length)) / (2j * np.pi * kk)
    c[~nz] = length
    return c


@dataclass
class ApproxChar:
    """Fejér-smoothed indicator of a periodic interval, a degree-Φ polynomial.

    Coefficients are (Fejér weight) × (indicator coefficient), i.e. the
    convolution of the interval indicator with the Fejér kernel.
    """

    a: float
    length: float
    phi: int
    coeffs: np.ndarray

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        k = np.arange(-self.phi, self.phi + 1)
        vals = np.real(np.exp(2j * np.pi * np.multiply.outer(t, k)) @ self.coeffs)
        return vals if vals.ndim else float(vals)

    def integral(self, c: float, d: float) -> float:
        """Exact ∫_c^d of the polynomial over a periodic interval (via coefficients)."""
        if c == d:
            return 0.0
        ln = 1.0 if (d - c) % 1.0 == 0.0 else interval_length(c, d)
        k = np.arange(-self.phi, self.phi + 1)
        weights = np.empty(2 * self.phi + 1, dtype=complex)
        nz = k != 0
        kk = k[nz]
        weights[nz] = np.exp(2j * np.pi * kk * c) * (np.exp(2j * np.pi * kk * ln) - 1.0) / (2j * np.pi * kk)
        weights[~nz] = ln
        return float(np.real(self.coeffs @ weights))


def approx_char(a: float, b: float, phi: int) -> ApproxChar:
    """Approximate characteristic function of [a,b] at cutoff Φ.

    Full-circle intervals (length 1, e.g. b = a on the torus describing the
    whole circle) yield the constant 1.
    """
    a = a % 1.0
    length = 1.0 if (b - a) % 1.0 == 0.0 and b != a else interval_length(a, b)
    if b == a:
        length = 0.0
    # degenerate cases: empty interval -> 0 polynomial, full circle -> constant 1
    coeffs = fejer_weights(phi).astype(complex) * _indicator_coeffs(a, length, phi)
    return ApproxChar(a=a, length=length, phi=phi, coeffs=coeffs)
