"""Gaussian frequency spectra, their discretizations, and classical fidelities.

An environment spectrum is modeled as a Gaussian line |g(omega)|^2 with center
mu and width sigma (both in Hz). For two lines of equal width the classical
alpha-fidelity has the closed form

    F_alpha(xi1, xi2) = exp(-(1 - alpha) * alpha * dmu^2 / (2 sigma^2)),

which is what the analytic width bounds invert. Unequal widths fall back to
the discretized classical fidelity on a shared frequency grid.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fidelity import check_alpha

LIGHT_SPEED = 299_792_458.0  # m/s


class UnequalWidthsError(ValueError):
    """Closed form requires equal widths; use the discretized classical route."""


@dataclass(frozen=True)
class GaussianSpectrum:
    """Gaussian spectral line: center mu and standard deviation sigma, in Hz."""

    mu: float
    sigma: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.mu) and self.mu > 0.0):
            raise ValueError(f"spectrum center must be positive, got {self.mu}")
        if not (math.isfinite(self.sigma) and self.sigma > 0.0):
            raise ValueError(f"spectrum width must be positive, got {self.sigma}")

    @classmethod
    def from_wavelength(cls, center_nm: float, width_nm: float) -> "GaussianSpectrum":
        """Convert a wavelength description (nm) to frequency (Hz).

        Uses nu = c / lambda and the first-order width mapping
        sigma_nu = c * sigma_lambda / lambda^2.
        """
        if center_nm <= 0.0 or width_nm <= 0.0:
            raise ValueError(
                f"wavelength description must be positive, got center {center_nm} nm, "
                f"width {width_nm} nm"
            )
        lam = center_nm * 1e-9
        dlam = width_nm * 1e-9
        return cls(mu=LIGHT_SPEED / lam, sigma=LIGHT_SPEED * dlam / lam**2)

    def density(self, omega) -> np.ndarray:
        """Normalized probability density |g(omega)|^2."""
        w = np.asarray(omega, dtype=float)
        z = (w - self.mu) / self.sigma
        return np.exp(-0.5 * z * z) / (self.sigma * math.sqrt(2.0 * math.pi))


def gaussian_alpha_fidelity(
    s1: GaussianSpectrum, s2: GaussianSpectrum, alpha: float
) -> float:
    """Closed-form classical alpha-fidelity of two equal-width Gaussian lines."""
    a = check_alpha(alpha)
    if not math.isclose(s1.sigma, s2.sigma, rel_tol=1e-12, abs_tol=0.0):
        raise UnequalWidthsError(
            f"closed form needs equal widths, got {s1.sigma} vs {s2.sigma} Hz; "
            "discretize both spectra on a shared grid and use "
            "classical_alpha_fidelity instead"
        )
    dmu = s1.mu - s2.mu
    return math.exp(-(1.0 - a) * a * dmu * dmu / (2.0 * s1.sigma**2))


def kappa(spectrum: GaussianSpectrum, tau: float) -> complex:
    """Characteristic function of the line at delay tau (s).

    kappa(tau) = exp(2 pi i tau mu - (2 pi tau sigma)^2 / 2). A delay channel
    multiplies the probe's upper off-diagonal by conj(kappa).
    """
    phase = 2.0 * math.pi * tau * spectrum.mu
    damp = (2.0 * math.pi * tau * spectrum.sigma) ** 2 / 2.0
    return complex(math.exp(-damp) * math.cos(phase), math.exp(-damp) * math.sin(phase))


@dataclass(frozen=True)
class FrequencyGrid:
    """Discrete frequency support: ascending points with probability weights."""

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=float)
        wts = np.asarray(self.weights, dtype=float)
        if pts.ndim != 1 or pts.size < 1 or pts.shape != wts.shape:
            raise ValueError(
                f"grid needs matching 1-d points/weights, got {pts.shape} and {wts.shape}"
            )
        if pts.size > 1 and not np.all(np.diff(pts) > 0.0):
            raise ValueError("grid points must be strictly ascending")
        if wts.min() < 0.0:
            raise ValueError(f"grid weights must be nonnegative, min is {wts.min()}")
        total = float(wts.sum())
        if total <= 0.0:
            raise ValueError("grid weights sum to zero; nothing to normalize")
        pts = pts.copy()
        wts = wts / total
        pts.setflags(write=False)
        wts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", wts)

    @property
    def size(self) -> int:
        return int(self.points.size)


def _check_grid_shape(span_sigmas: float, n: int) -> None:
    if span_sigmas <= 0.0:
        raise ValueError(f"grid span must be positive, got {span_sigmas} sigmas")
    if n < 3 or n % 2 == 0:
        raise ValueError(f"grid size must be odd and at least 3, got {n}")


def discretize(
    spectrum: GaussianSpectrum, span_sigmas: float = 6.0, n: int = 2001
) -> FrequencyGrid:
    """Sample the line on a symmetric grid of n points within +/- span_sigmas."""
    _check_grid_shape(span_sigmas, n)
    pts = np.linspace(
        spectrum.mu - span_sigmas * spectrum.sigma,
        spectrum.mu + span_sigmas * spectrum.sigma,
        n,
    )
    return FrequencyGrid(points=pts, weights=spectrum.density(pts))


def discretize_pair(
    s1: GaussianSpectrum,
    s2: GaussianSpectrum,
    span_sigmas: float = 8.0,
    n: int = 3001,
) -> tuple[FrequencyGrid, FrequencyGrid]:
    """Discretize two lines on one shared grid of points.

    The span covers [min mu - span * sigma_max, max mu + span * sigma_max], so
    both discretizations live on identical support. Channels built from a
    shared grid are induced by the same joint unitary, which keeps the
    data-processing inequality exact in the discretized world.
    """
    _check_grid_shape(span_sigmas, n)
    sig = max(s1.sigma, s2.sigma)
    lo = min(s1.mu, s2.mu) - span_sigmas * sig
    hi = max(s1.mu, s2.mu) + span_sigmas * sig
    pts = np.linspace(lo, hi, n)
    return (
        FrequencyGrid(points=pts, weights=s1.density(pts)),
        FrequencyGrid(points=pts, weights=s2.density(pts)),
    )


def classical_alpha_fidelity(g1: FrequencyGrid, g2: FrequencyGrid, alpha: float) -> float:
    """Discretized classical alpha-fidelity sum_k w1_k^alpha * w2_k^(1-alpha).

    Both grids must share identical points: matching sizes with different
    supports would silently compare unrelated frequency bins.
    """
    a = check_alpha(alpha)
    if g1.size != g2.size or not np.array_equal(g1.points, g2.points):
        raise ValueError("grids must share identical frequency points")
    return float(np.sum(g1.weights**a * g2.weights ** (1.0 - a)))
