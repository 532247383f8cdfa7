import numpy as np
import pytest
from scipy.special import sici

from anisotv.kernels import ApproxChar, approx_char, dirichlet, fejer, fejer_weights, interval_length


def fejer_closed_form(t, phi):
    """Sin-ratio closed form, valid away from integers."""
    return (np.sin((phi + 1) * np.pi * t) / np.sin(np.pi * t)) ** 2 / (phi + 1)


def second_derivative_at_zero(phi):
    """Σ_k −4π²k²(1−|k|/(Φ+1)) in closed form: −(2/3)π²Φ(Φ+1)(Φ+2)."""
    return -(2.0 / 3.0) * np.pi**2 * phi * (phi + 1) * (phi + 2)


class TestFejer:
    @pytest.mark.parametrize("phi", [3, 8, 12, 18])
    def test_peak_value(self, phi):
        assert fejer(0.0, phi, 0) == pytest.approx(phi + 1, abs=1e-9)

    @pytest.mark.parametrize("phi", [3, 8, 18])
    def test_first_derivative_vanishes_at_zero(self, phi):
        assert abs(fejer(0.0, phi, 1)) < 1e-10

    @pytest.mark.parametrize("phi", [4, 9, 18])
    def test_second_derivative_at_zero(self, phi):
        # numeric cross-check of the closed form via the raw sum
        k = np.arange(-phi, phi + 1)
        raw = float(np.sum(-4 * np.pi**2 * k**2 * (1 - np.abs(k) / (phi + 1))))
        assert raw == pytest.approx(second_derivative_at_zero(phi), rel=1e-12)
        assert fejer(0.0, phi, 2) == pytest.approx(second_derivative_at_zero(phi), rel=1e-10)

    @pytest.mark.parametrize("phi", [5, 12])
    def test_matches_closed_form_away_from_zero(self, phi):
        t = np.linspace(0.05, 0.95, 37)
        assert np.allclose(fejer(t, phi, 0), fejer_closed_form(t, phi), atol=1e-9)

    @pytest.mark.parametrize("phi", [8, 12, 18])
    def test_nonnegative_and_unit_mean(self, phi):
        t = np.arange(64 * (phi + 1)) / (64 * (phi + 1))
        vals = fejer(t, phi, 0)
        assert vals.min() >= -1e-12
        assert vals.mean() == pytest.approx(1.0, abs=1e-10)

    def test_derivative_order_guard(self):
        with pytest.raises(ValueError):
            fejer(0.1, 8, 5)

    @pytest.mark.parametrize("phi", [8, 12, 18])
    def test_derivative_envelope(self, phi):
        # |F^(j)| ≤ C·(2π)^j·min((Φ+1)^{j+1}, (Φ+1)^{j−1}/sin²(πt)), C ≤ 10
        t = np.arange(64 * (phi + 1)) / (64 * (phi + 1))
        s2 = np.sin(np.pi * t) ** 2
        measured = 0.0
        for j in range(5):
            vals = np.abs(fejer(t, phi, j))
            with np.errstate(divide="ignore"):
                env = (2 * np.pi) ** j * np.minimum(
                    (phi + 1.0) ** (j + 1),
                    np.where(s2 > 0, (phi + 1.0) ** (j - 1) / np.where(s2 > 0, s2, 1.0), np.inf),
                )
            measured = max(measured, float(np.max(vals / env)))
        assert np.isfinite(measured)
        assert measured <= 10.0

    def test_derivatives_by_finite_differences(self):
        phi = 7
        eps = 1e-5
        for j in range(1, 5):
            for t0 in (0.13, 0.31, 0.49):
                fd = (fejer(t0 + eps, phi, j - 1) - fejer(t0 - eps, phi, j - 1)) / (2 * eps)
                assert fejer(t0, phi, j) == pytest.approx(fd, rel=1e-4, abs=1e-3)


class TestDirichlet:
    def test_peak(self):
        for k in (0, 3, 9):
            assert dirichlet(0.0, k) == pytest.approx(2 * k + 1, abs=1e-10)

    def test_half_point_k0(self):
        assert dirichlet(0.5, 0) == pytest.approx(1.0)

    def test_matches_cosine_sum(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            t = float(rng.uniform(0, 1))
            k = int(rng.integers(0, 12))
            want = 1 + 2 * sum(np.cos(2 * np.pi * j * t) for j in range(1, k + 1))
            assert dirichlet(t, k) == pytest.approx(want, abs=1e-10)

    def test_fejer_is_dirichlet_average(self):
        phi = 6
        t = np.linspace(0, 1, 23, endpoint=False)
        avg = np.mean([dirichlet(t, k) for k in range(phi + 1)], axis=0)
        assert np.allclose(fejer(t, phi, 0), avg, atol=1e-10)


class TestApproxChar:
    def test_full_interval_is_one(self):
        ch = approx_char(0.0, 1.0, 8)
        t = np.linspace(0, 1, 101, endpoint=False)
        assert np.allclose(ch(t), 1.0, atol=1e-12)

    def test_range_bounds(self):
        for (a, b) in ((0.0, 0.3), (0.7, 0.2), (0.45, 0.55)):
            ch = approx_char(a, b, 12)
            t = np.arange(2048) / 2048
            vals = ch(t)
            assert vals.min() >= -1e-10 and vals.max() <= 1 + 1e-10

    def test_mean_preservation(self):
        # the k=0 coefficient equals the interval length exactly
        for (a, b) in ((0.2, 0.5), (0.9, 0.1)):
            ch = approx_char(a, b, 9)
            assert ch.integral(0.0, 1.0) == pytest.approx(interval_length(a, b), abs=1e-14)

    def test_complement_identity(self):
        a, b, phi = 0.25, 0.65, 10
        ch = approx_char(a, b, phi)
        co = approx_char(b, a, phi)
        t = np.linspace(0, 1, 211, endpoint=False)
        assert np.allclose(ch(t) + co(t), 1.0, atol=1e-12)

    def test_matches_convolution_quadrature(self):
        # the polynomial equals ∫_a^b F(t−x) dx; check by fine quadrature
        a, b, phi = 0.3, 0.62, 6
        ch = approx_char(a, b, phi)
        xs = np.linspace(a, b, 4001)
        for t0 in (0.1, 0.45, 0.8):
            conv = np.trapezoid(fejer(t0 - xs, phi, 0), xs)
            assert ch(t0) == pytest.approx(conv, abs=1e-6)

    def test_integral_against_quadrature(self):
        ch = approx_char(0.2, 0.7, 7)
        t = np.arange(200000) / 200000
        mask = (t >= 0.35) & (t < 0.6)
        quad = ch(t[mask]).sum() / 200000
        assert ch.integral(0.35, 0.6) == pytest.approx(quad, abs=1e-5)

    @pytest.mark.parametrize("phi,length", [(8, 1 / 9), (12, 0.2), (18, 3 / 19), (18, 0.5)])
    def test_own_interval_lower_bound(self, phi, length):
        # for length ≥ 1/(Φ+1) the self-integral exceeds (13/20)·length
        a = 0.1
        ch = approx_char(a, a + length, phi)
        val = ch.integral(a, a + length)
        assert val > (13 / 20) * length
        assert val < length

    @pytest.mark.parametrize("phi,length", [(8, 0.2), (18, 0.3)])
    def test_self_integral_closed_form(self, phi, length):
        # ∫ of the smoothed indicator over its own interval is (2a/π)·f(2π(Φ+1)a)
        # with f(r) = Si(r) + (cos r − Cin(r) − 1)/r, Cin(r) = γ + log r − Ci(r)
        ch = approx_char(0.0, length, phi)
        r = 2 * np.pi * (phi + 1) * length
        si, ci = sici(r)
        gamma = 0.5772156649015329
        cin = gamma + np.log(r) - ci
        f = si + (np.cos(r) - cin - 1.0) / r
        # the closed form integrates the sinc² minorant, hence a lower bound
        assert ch.integral(0.0, length) >= (2 * length / np.pi) * f - 1e-12
