import math

import numpy as np
import pytest

from alphaprobe.reference import REFERENCE_DELTA_MU_HZ, REFERENCE_SIGMA_HZ
from alphaprobe.spectra import (
    LIGHT_SPEED,
    FrequencyGrid,
    GaussianSpectrum,
    UnequalWidthsError,
    classical_alpha_fidelity,
    discretize,
    discretize_pair,
    gaussian_alpha_fidelity,
    kappa,
)

MU0 = 3.7e14  # optical scale, Hz


def reference_pair():
    s1 = GaussianSpectrum(mu=MU0, sigma=REFERENCE_SIGMA_HZ)
    s2 = GaussianSpectrum(mu=MU0 + REFERENCE_DELTA_MU_HZ, sigma=REFERENCE_SIGMA_HZ)
    return s1, s2


class TestGaussianSpectrum:
    def test_from_wavelength_formulas(self):
        s = GaussianSpectrum.from_wavelength(810.0, 1.73)
        lam = 810e-9
        assert s.mu == pytest.approx(LIGHT_SPEED / lam, rel=1e-12)
        assert s.sigma == pytest.approx(LIGHT_SPEED * 1.73e-9 / lam**2, rel=1e-12)

    def test_wavelength_separation_maps_to_control_shift(self):
        # a 1.73 nm line separation at 810 nm is the demonstration's control
        # shift of 7.95e11 Hz, up to the first-order conversion
        s = GaussianSpectrum.from_wavelength(810.0, 1.73)
        assert s.sigma == pytest.approx(REFERENCE_DELTA_MU_HZ, rel=0.01)

    def test_positivity_enforced(self):
        with pytest.raises(ValueError, match="positive"):
            GaussianSpectrum(mu=-1.0, sigma=1.0)
        with pytest.raises(ValueError, match="positive"):
            GaussianSpectrum(mu=1.0, sigma=0.0)
        with pytest.raises(ValueError, match="positive"):
            GaussianSpectrum.from_wavelength(810.0, -1.0)
        with pytest.raises(ValueError, match="positive"):
            GaussianSpectrum.from_wavelength(0.0, 1.0)

    def test_density_normalized_and_centered(self):
        s = GaussianSpectrum(mu=MU0, sigma=REFERENCE_SIGMA_HZ)
        pts = np.linspace(s.mu - 8 * s.sigma, s.mu + 8 * s.sigma, 20001)
        total = np.trapezoid(s.density(pts), pts)
        assert total == pytest.approx(1.0, abs=1e-9)
        assert pts[np.argmax(s.density(pts))] == pytest.approx(s.mu, abs=pts[1] - pts[0])


class TestGaussianAlphaFidelity:
    def test_identical_lines_give_one(self):
        s1, _ = reference_pair()
        for a in (0.5, 0.8, 0.9999):
            assert gaussian_alpha_fidelity(s1, s1, a) == 1.0

    def test_reference_shift_value(self):
        s1, s2 = reference_pair()
        ratio = REFERENCE_DELTA_MU_HZ / REFERENCE_SIGMA_HZ
        want = math.exp(-(ratio**2) / 8.0)
        got = gaussian_alpha_fidelity(s1, s2, 0.5)
        assert got == pytest.approx(want, rel=1e-12)
        assert got == pytest.approx(0.7828, abs=5e-4)

    def test_closed_form_matches_discretized_oracle(self):
        s1, s2 = reference_pair()
        g1, g2 = discretize_pair(s1, s2)
        for a in (0.5, 0.7, 0.9, 0.9999):
            closed = gaussian_alpha_fidelity(s1, s2, a)
            discrete = classical_alpha_fidelity(g1, g2, a)
            assert discrete == pytest.approx(closed, abs=1e-8)

    def test_monotonicity(self):
        sig = REFERENCE_SIGMA_HZ
        shifts = np.linspace(0.0, 3.0, 7) * sig
        vals = [
            gaussian_alpha_fidelity(
                GaussianSpectrum(MU0, sig), GaussianSpectrum(MU0 + d, sig), 0.7
            )
            for d in shifts
        ]
        assert all(b < a for a, b in zip(vals, vals[1:]))

        # wider lines overlap more
        widths = np.linspace(0.5, 3.0, 6) * sig
        vals = [
            gaussian_alpha_fidelity(
                GaussianSpectrum(MU0, w), GaussianSpectrum(MU0 + sig, w), 0.7
            )
            for w in widths
        ]
        assert all(b > a for a, b in zip(vals, vals[1:]))

        # alpha (1 - alpha) shrinks towards alpha = 1
        s1, s2 = reference_pair()
        vals = [gaussian_alpha_fidelity(s1, s2, a) for a in (0.5, 0.6, 0.8, 0.9999)]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_symmetric_in_line_order(self):
        s1, s2 = reference_pair()
        for a in (0.5, 0.9):
            assert gaussian_alpha_fidelity(s1, s2, a) == gaussian_alpha_fidelity(s2, s1, a)

    def test_unequal_widths_point_to_classical_route(self):
        s1 = GaussianSpectrum(mu=MU0, sigma=1e11)
        s2 = GaussianSpectrum(mu=MU0, sigma=2e11)
        with pytest.raises(UnequalWidthsError, match="classical_alpha_fidelity"):
            gaussian_alpha_fidelity(s1, s2, 0.5)


class TestKappa:
    def test_zero_delay(self):
        s1, _ = reference_pair()
        assert kappa(s1, 0.0) == 1.0 + 0.0j

    def test_damping_scale(self):
        s1, _ = reference_pair()
        tau = 1.0 / (2.0 * math.pi * s1.sigma)
        assert abs(kappa(s1, tau)) == pytest.approx(math.exp(-0.5), rel=1e-12)

    def test_matches_quadrature_oracle(self):
        s1, _ = reference_pair()
        grid = discretize(s1, span_sigmas=8.0, n=4001)
        for x_mm in (1.0, 5.0, 10.0):
            tau = 0.00925 * x_mm * 1e-3 / LIGHT_SPEED
            want = np.sum(grid.weights * np.exp(2j * math.pi * grid.points * tau))
            assert kappa(s1, tau) == pytest.approx(complex(want), abs=1e-6)

    def test_magnitude_decreases_with_delay(self):
        s1, _ = reference_pair()
        taus = np.linspace(0.0, 5.0, 11) / (2.0 * math.pi * s1.sigma)
        mags = [abs(kappa(s1, t)) for t in taus]
        assert all(b < a for a, b in zip(mags, mags[1:]))


class TestFrequencyGrid:
    def test_weights_renormalized(self):
        g = FrequencyGrid(points=np.array([1.0, 2.0]), weights=np.array([1.0, 3.0]))
        assert g.weights.sum() == pytest.approx(1.0, abs=1e-15)
        assert g.weights[1] == pytest.approx(0.75)

    def test_rejects_descending_points(self):
        with pytest.raises(ValueError, match="ascending"):
            FrequencyGrid(points=np.array([2.0, 1.0]), weights=np.array([0.5, 0.5]))

    def test_rejects_negative_weights(self):
        with pytest.raises(ValueError, match="nonnegative"):
            FrequencyGrid(points=np.array([1.0, 2.0]), weights=np.array([1.5, -0.5]))

    def test_rejects_zero_total_weight(self):
        with pytest.raises(ValueError, match="zero"):
            FrequencyGrid(points=np.array([1.0, 2.0]), weights=np.array([0.0, 0.0]))

    def test_rejects_shape_mismatch(self):
        with pytest.raises(ValueError, match="matching"):
            FrequencyGrid(points=np.array([1.0, 2.0]), weights=np.array([1.0]))


class TestDiscretize:
    def test_moments(self):
        s1, _ = reference_pair()
        g = discretize(s1)
        assert g.weights.sum() == pytest.approx(1.0, abs=1e-12)
        assert g.points[np.argmax(g.weights)] == pytest.approx(s1.mu, abs=1e-3)
        mean = float(np.sum(g.weights * g.points))
        assert abs(mean - s1.mu) <= 1e-9 * s1.sigma

    def test_shape_validation(self):
        s1, _ = reference_pair()
        with pytest.raises(ValueError, match="odd"):
            discretize(s1, n=2000)
        with pytest.raises(ValueError, match="odd"):
            discretize(s1, n=1)
        with pytest.raises(ValueError, match="span"):
            discretize(s1, span_sigmas=0.0)

    def test_pair_shares_points(self):
        s1, s2 = reference_pair()
        g1, g2 = discretize_pair(s1, s2)
        assert np.array_equal(g1.points, g2.points)
        assert g1.points[0] <= s1.mu - 7.9 * s1.sigma
        assert g1.points[-1] >= s2.mu + 7.9 * s2.sigma
        assert g1.weights.sum() == pytest.approx(1.0, abs=1e-12)
        assert g2.weights.sum() == pytest.approx(1.0, abs=1e-12)


class TestClassicalAlphaFidelity:
    def test_identical_grids_give_one(self):
        s1, _ = reference_pair()
        g = discretize(s1)
        assert classical_alpha_fidelity(g, g, 0.7) == pytest.approx(1.0, abs=1e-12)

    def test_mismatched_points_rejected(self):
        s1, s2 = reference_pair()
        with pytest.raises(ValueError, match="identical frequency points"):
            classical_alpha_fidelity(discretize(s1), discretize(s2), 0.5)

    def test_unequal_widths_route(self):
        # the fallback the closed form points to: shared grid, direct sum
        s1 = GaussianSpectrum(mu=MU0, sigma=1e11)
        s2 = GaussianSpectrum(mu=MU0 + 1e11, sigma=2e11)
        g1, g2 = discretize_pair(s1, s2)
        a = 0.5
        got = classical_alpha_fidelity(g1, g2, a)
        # equal-width Bhattacharyya-like overlap generalizes to
        # sqrt(2 s1 s2 / (s1^2 + s2^2)) * exp(-dmu^2 / (4 (s1^2 + s2^2)))
        pref = math.sqrt(2 * s1.sigma * s2.sigma / (s1.sigma**2 + s2.sigma**2))
        want = pref * math.exp(-((s2.mu - s1.mu) ** 2) / (4 * (s1.sigma**2 + s2.sigma**2)))
        assert got == pytest.approx(want, abs=1e-8)
