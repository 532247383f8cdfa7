import numpy as np
import pytest

from tvplots.stats import asymmetric_deviation, bin_summaries, fit_slope, mean_errors_by_delta


class TestAsymmetricDeviation:
    def test_hand_computed(self):
        mean, lower, upper = asymmetric_deviation([1.0, 2.0, 6.0])
        assert mean == pytest.approx(3.0)
        assert upper == pytest.approx(3.0)  # only 6 is above: 6-3
        assert lower == pytest.approx(1.5)  # (3-1 + 3-2)/2

    def test_symmetric_case(self):
        mean, lower, upper = asymmetric_deviation([0.0, 2.0])
        assert mean == 1.0 and lower == 1.0 and upper == 1.0

    def test_constant_values(self):
        mean, lower, upper = asymmetric_deviation([5.0, 5.0, 5.0])
        assert (mean, lower, upper) == (5.0, 0.0, 0.0)


class TestBinSummaries:
    def test_exact_percent_and_count(self):
        rows = [
            {"bin": 2, "exact": True, "l1_error": 1.0},
            {"bin": 2, "exact": False, "l1_error": 2.0},
            {"bin": 2, "exact": True, "l1_error": 6.0},
            {"bin": 3, "exact": True, "l1_error": 1e-9},
        ]
        bins = bin_summaries(rows)
        assert bins[2]["exact_percent"] == pytest.approx(100 * 2 / 3)
        assert bins[2]["l1_mean"] == pytest.approx(3.0)
        assert bins[2]["l1_upper"] == pytest.approx(3.0)
        assert bins[2]["l1_lower"] == pytest.approx(1.5)
        assert bins[3]["exact_percent"] == 100.0


class TestSlope:
    def test_exact_half_slope(self):
        rows = [
            {"delta_noise": 1e-2, "l1_error": 2e-3},
            {"delta_noise": 1e0, "l1_error": 2e-2},
            {"delta_noise": 1e2, "l1_error": 2e-1},
        ]
        deltas, means = mean_errors_by_delta(rows)
        assert fit_slope(deltas, means) == pytest.approx(0.5, abs=1e-12)

    def test_window_excludes_saturated_ends(self):
        rows = [
            {"delta_noise": 1e-3, "l1_error": 1.0},
            {"delta_noise": 1e-1, "l1_error": 1e-2},
            {"delta_noise": 1e1, "l1_error": 1e-1},
            {"delta_noise": 1e3, "l1_error": 1e-1},
        ]
        deltas, means = mean_errors_by_delta(rows)
        assert fit_slope(deltas, means) == pytest.approx(0.5, abs=1e-12)

    def test_too_few_points_raises(self):
        with pytest.raises(ValueError):
            fit_slope(np.array([1e-3]), np.array([1.0]))
