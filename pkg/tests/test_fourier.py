import numpy as np
import pytest

from anisotv.fourier import (
    AliasingError,
    NoiseSpec,
    SpectralData,
    add_noise,
    adjoint,
    data_inner,
    forward,
    hermitian_deviation,
    image_inner,
)
from anisotv.grids import BlockImage, Image, TorusGrid, rasterize


def forward_oracle(values: np.ndarray, phi: int) -> np.ndarray:
    """Naive O(N²·(2Φ+1)²) double sum."""
    n = values.shape[0]
    out = np.zeros((2 * phi + 1, 2 * phi + 1), dtype=complex)
    for a1, k1 in enumerate(range(-phi, phi + 1)):
        for a2, k2 in enumerate(range(-phi, phi + 1)):
            s = 0.0 + 0.0j
            for p in range(n):
                for q in range(n):
                    s += values[p, q] * np.exp(-2j * np.pi * (p * k1 + q * k2) / n)
            out[a1, a2] = s / n**2
    return out


class TestForward:
    def test_constant_image(self):
        grid = TorusGrid(16)
        f = forward(Image(grid=grid, values=np.full((16, 16), 3.25)), phi=4)
        assert f.coef(0, 0) == pytest.approx(3.25, abs=1e-12)
        c = f.coeffs.copy()
        c[f.phi, f.phi] = 0
        assert np.max(np.abs(c)) < 1e-12

    def test_single_cosine_mode(self):
        grid = TorusGrid(32)
        x = grid.coords()
        vals = np.cos(2 * np.pi * x)[:, None] * np.ones((1, 32))
        f = forward(Image(grid=grid, values=vals), phi=3)
        assert f.coef(1, 0) == pytest.approx(0.5, abs=1e-12)
        assert f.coef(-1, 0) == pytest.approx(0.5, abs=1e-12)
        others = f.coeffs.copy()
        others[f.phi + 1, f.phi] = 0
        others[f.phi - 1, f.phi] = 0
        assert np.max(np.abs(others)) < 1e-12

    def test_matches_naive_double_sum(self):
        rng = np.random.default_rng(0)
        grid = TorusGrid(8)
        vals = rng.uniform(-1, 1, (8, 8))
        f = forward(Image(grid=grid, values=vals), phi=2)
        assert np.allclose(f.coeffs, forward_oracle(vals, 2), atol=1e-12)

    def test_aliasing_guard(self):
        with pytest.raises(AliasingError):
            forward(Image(grid=TorusGrid(8), values=np.zeros((8, 8))), phi=4)

    def test_linearity(self):
        rng = np.random.default_rng(1)
        grid = TorusGrid(24)
        u = Image(grid=grid, values=rng.normal(size=(24, 24)))
        v = Image(grid=grid, values=rng.normal(size=(24, 24)))
        a, b = 1.7, -0.4
        lhs = forward(Image(grid=grid, values=a * u.values + b * v.values), 5).coeffs
        rhs = a * forward(u, 5).coeffs + b * forward(v, 5).coeffs
        assert np.max(np.abs(lhs - rhs)) < 1e-12

    def test_constant_block_single_coefficient(self):
        b = BlockImage(xs_idx=(0, 30), ys_idx=(0, 45), grid_points=120, values=np.full((2, 2), 1.5))
        f = forward(rasterize(b, TorusGrid(120)), phi=6)
        nonzero = np.abs(f.coeffs) > 1e-13
        assert nonzero.sum() == 1 and nonzero[f.phi, f.phi]


class TestAdjoint:
    def test_zero(self):
        f = SpectralData(phi=2, coeffs=np.zeros((5, 5), dtype=complex), hermitian=True)
        img, resid = adjoint(f, TorusGrid(8))
        assert np.all(img.values == 0) and resid == 0

    def test_dc_only(self):
        c = np.zeros((5, 5), dtype=complex)
        c[2, 2] = 1.0
        img, _ = adjoint(SpectralData(phi=2, coeffs=c, hermitian=True), TorusGrid(9))
        assert np.allclose(img.values, 1.0, atol=1e-13)

    def test_adjointness_identity(self):
        rng = np.random.default_rng(7)
        grid = TorusGrid(40)
        for _ in range(20):
            phi = int(rng.integers(1, 12))
            u = Image(grid=grid, values=rng.normal(size=(40, 40)))
            m = 2 * phi + 1
            c = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
            f = SpectralData(phi=phi, coeffs=c)
            Ku = forward(u, phi)
            Kf, _ = adjoint_no_check(f, grid)
            lhs = data_inner(Ku, f)
            rhs = complex(image_inner_cplx(u, Kf))
            scale = np.linalg.norm(Ku.coeffs) * np.linalg.norm(c) + 1e-30
            assert abs(lhs - rhs) / scale < 1e-12


def adjoint_no_check(f, grid):
    """Adjoint synthesis keeping the complex field (for non-hermitian test data)."""
    n = grid.n_pixels
    full = np.zeros((n, n), dtype=complex)
    idx = np.r_[n - f.phi:n, 0:f.phi + 1]
    full[np.ix_(idx, idx)] = f.coeffs
    return np.fft.ifft2(full) * n**2, 0.0


def image_inner_cplx(u, field):
    return u.grid.spacing**2 * np.sum(u.values * np.conj(field))


class TestNoise:
    def test_zero_delta_bit_exact(self):
        grid = TorusGrid(16)
        f = forward(Image(grid=grid, values=np.random.default_rng(0).normal(size=(16, 16))), 3)
        out = add_noise(f, NoiseSpec(delta=0.0, seed=5))
        assert np.array_equal(out.coeffs, f.coeffs)

    def test_energy_calibration_monte_carlo(self):
        grid = TorusGrid(16)
        f = forward(Image(grid=grid, values=np.zeros((16, 16))), 4)
        n_trials = 4000
        acc = 0.0
        for seed in range(n_trials):
            fd = add_noise(f, NoiseSpec(delta=1.0, seed=seed))
            acc += 0.5 * np.sum(np.abs(fd.coeffs - f.coeffs) ** 2)
        assert 0.95 <= acc / n_trials <= 1.05

    def test_output_hermitian(self):
        grid = TorusGrid(16)
        f = forward(Image(grid=grid, values=np.random.default_rng(1).normal(size=(16, 16))), 4)
        fd = add_noise(f, NoiseSpec(delta=2.5, seed=3))
        assert fd.hermitian and hermitian_deviation(fd) <= 1e-12

    def test_deterministic_per_seed(self):
        grid = TorusGrid(16)
        f = forward(Image(grid=grid, values=np.ones((16, 16))), 4)
        a = add_noise(f, NoiseSpec(delta=0.7, seed=9))
        b = add_noise(f, NoiseSpec(delta=0.7, seed=9))
        assert np.array_equal(a.coeffs, b.coeffs)

    def test_negative_delta_rejected(self):
        with pytest.raises(ValueError):
            NoiseSpec(delta=-1.0)


class TestSpectralCsv:
    def test_roundtrip(self):
        rng = np.random.default_rng(2)
        grid = TorusGrid(16)
        f = forward(Image(grid=grid, values=rng.normal(size=(16, 16))), 3)
        g = SpectralData.from_csv(f.to_csv())
        assert g.phi == f.phi
        assert np.array_equal(g.coeffs, f.coeffs)
        assert g.hermitian

    def test_header_and_order(self):
        c = np.zeros((3, 3), dtype=complex)
        f = SpectralData(phi=1, coeffs=c)
        lines = f.to_csv().splitlines()
        assert lines[0] == "# phi=1"
        assert lines[1] == "k1,k2,re,im"
        assert lines[2].startswith("-1,-1,")
