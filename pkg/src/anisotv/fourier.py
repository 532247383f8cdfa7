"""Truncated Fourier measurement operator, its adjoint, and noise injection.

Coefficients are normalized so that coeffs(0,0) equals the image mean:
forward uses (1/n²)·Σ_p u(p)·exp(−2πi p·k/n) and the adjoint synthesizes
Σ_k w_k·exp(+2πi p·k/n) without normalization.  With the image-space inner
product ⟨u,v⟩ = spacing²·Σ u·v and the plain ℓ² product on coefficients the
pair is exactly adjoint.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .grids import Image, TorusGrid

__all__ = [
    "SpectralData",
    "NoiseSpec",
    "AliasingError",
    "forward",
    "adjoint",
    "add_noise",
    "data_inner",
    "image_inner",
]


class AliasingError(ValueError):
    """Cutoff too large for the pixel grid (2Φ+1 > n_pixels)."""


def freq_range(phi: int) -> np.ndarray:
    """Frequencies −Φ..Φ in centered order."""
    return np.arange(-phi, phi + 1)


@dataclass
class SpectralData:
    """Complex Fourier coefficients for |k|∞ ≤ Φ, centered storage.

    coeffs[a1, a2] holds the coefficient at k = (a1−Φ, a2−Φ).
    """

    phi: int
    coeffs: np.ndarray
    hermitian: bool = False

    def __post_init__(self):
        if self.phi < 1:
            raise ValueError("phi must be >= 1")
        c = np.asarray(self.coeffs, dtype=complex)
        m = 2 * self.phi + 1
        if c.shape != (m, m):
            raise ValueError(f"coeffs must be {m}x{m}, got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients contain non-finite entries")
        self.coeffs = c
        if self.hermitian:
            dev = hermitian_deviation(self)
            if dev > 1e-12:
                raise ValueError(f"hermitian flag set but symmetry deviation {dev:.2e} > 1e-12")

    def coef(self, k1: int, k2: int) -> complex:
        return complex(self.coeffs[k1 + self.phi, k2 + self.phi])

    def copy(self) -> "SpectralData":
        return SpectralData(self.phi, self.coeffs.copy(), self.hermitian)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# phi={self.phi}\n")
        buf.write("k1,k2,re,im\n")
        for a1, k1 in enumerate(freq_range(self.phi)):
            for a2, k2 in enumerate(freq_range(self.phi)):
                c = self.coeffs[a1, a2]
                buf.write(f"{k1},{k2},{float(c.real)!r},{float(c.imag)!r}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "SpectralData":
        lines = [line.strip() for line in text.splitlines() if line.strip()]
        if not lines[0].startswith("# phi="):
            raise ValueError("missing '# phi=' header")
        phi = int(lines[0].split("=", 1)[1])
        m = 2 * phi + 1
        coeffs = np.zeros((m, m), dtype=complex)
        for line in lines[2:]:
            k1s, k2s, res, ims = line.split(",")
            coeffs[int(k1s) + phi, int(k2s) + phi] = float(res) + 1j * float(ims)
        out = cls(phi=phi, coeffs=coeffs)
        out.hermitian = hermitian_deviation(out) <= 1e-12
        return out


def hermitian_deviation(f: SpectralData) -> float:
    """Relative deviation from coeffs(−k) = conj(coeffs(k))."""
    c = f.coeffs
    mirrored = np.conj(c[::-1, ::-1])
    scale = max(float(np.max(np.abs(c))), 1e-300)
    return float(np.max(np.abs(c - mirrored))) / scale


@dataclass(frozen=True)
class NoiseSpec:
    """Noise energy calibration: E[½|f^δ − f|₂²] = delta."""

    delta: float
    seed: int = 0

    def __post_init__(self):
        if not np.isfinite(self.delta):
            raise ValueError("delta must be finite")
        if self.delta < 0:
            raise ValueError("delta must be >= 0")


def forward(u: Image, phi: int) -> SpectralData:
    """Normalized Fourier coefficients of an image, restricted to |k|∞ ≤ Φ."""
    n = u.grid.n_pixels
    if 2 * phi + 1 > n:
        raise AliasingError(f"2*phi+1 = {2*phi+1} exceeds n_pixels = {n}")
    full = np.fft.fft2(u.values) / n**2
    # fft order -> centered order: index a = (k mod n) rolled by phi
    idx = np.r_[n - phi:n, 0:phi + 1]
    coeffs = full[np.ix_(idx, idx)]
    return SpectralData(phi=phi, coeffs=coeffs, hermitian=True)


def adjoint(f: SpectralData, grid: TorusGrid, imag_warn: float = 1e-10):
    """Sample Σ_k w_k e^{2πi(x,y)·k} at pixel positions; returns (Image, imag_residual)."""
    n = grid.n_pixels
    phi = f.phi
    if 2 * phi + 1 > n:
        raise AliasingError(f"2*phi+1 = {2*phi+1} exceeds n_pixels = {n}")
    full = np.zeros((n, n), dtype=complex)
    idx = np.r_[n - phi:n, 0:phi + 1]
    full[np.ix_(idx, idx)] = f.coeffs
    field = np.fft.ifft2(full) * n**2
    imag_residual = float(np.max(np.abs(field.imag)))
    if f.hermitian and imag_residual > imag_warn:
        raise ValueError(f"imaginary residual {imag_residual:.2e} on hermitian input")
    return Image(grid=grid, values=field.real), imag_residual


def data_inner(f: SpectralData, g: SpectralData) -> complex:
    """Plain ℓ² inner product on coefficients, ⟨f,g⟩ = Σ f_k conj(g_k)."""
    return complex(np.sum(f.coeffs * np.conj(g.coeffs)))


def image_inner(u: Image, v: Image) -> float:
    """Discrete L²(Ω) inner product, spacing²·Σ u·v."""
    return float(u.grid.spacing**2 * np.sum(u.values * v.values))


def add_noise(f: SpectralData, spec: NoiseSpec) -> SpectralData:
    """Add hermitian complex Gaussian noise with E[½|noise|₂²] = delta.

    The noise is drawn on the closed upper half of the frequency lattice and
    mirrored, which makes the energy calibration exact in expectation.
    """
    if not f.hermitian:
        raise ValueError("add_noise requires hermitian input")
    if spec.delta == 0.0:
        return f.copy()
    phi = f.phi
    m = 2 * phi + 1
    total = m * m
    sigma2 = 2.0 * spec.delta / total  # per-coefficient variance E|n_k|²
    rng = np.random.default_rng(spec.seed)
    noise = np.zeros((m, m), dtype=complex)
    k1, k2 = np.meshgrid(freq_range(phi), freq_range(phi), indexing="ij")
    upper = (k2 > 0) | ((k2 == 0) & (k1 > 0))
    nu = int(np.sum(upper))
    re = rng.normal(0.0, np.sqrt(sigma2 / 2.0), size=nu)
    im = rng.normal(0.0, np.sqrt(sigma2 / 2.0), size=nu)
    noise[upper] = re + 1j * im
    noise[::-1, ::-1][upper] = re - 1j * im  # mirror: n(−k) = conj(n(k))
    noise[phi, phi] = rng.normal(0.0, np.sqrt(sigma2))  # k = 0 stays real
    return SpectralData(phi=phi, coeffs=f.coeffs + noise, hermitian=True)
