"""Birefringent wave-plate stacks acting on a polarization qubit.

A stack of plates with thicknesses x_i and in-plane orientations theta_i
applies, at optical frequency omega, the Jones unitary

    V(omega) = J_k(omega) ... J_1(omega),
    J_i(omega) = R(theta_i) diag(1, e^{2 pi i omega dn x_i / c}) R(theta_i)^T,

with the first plate acting first. Averaging V rho V^dagger over the photon's
frequency distribution gives the dephasing channel; the environment here is
the photon's own spectral degree of freedom.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import DensityMatrix, as_matrix, partial_trace_env
from .spectra import LIGHT_SPEED, FrequencyGrid, GaussianSpectrum, discretize

QUARTZ_BIREFRINGENCE = 0.00925  # quartz near 810 nm

ORACLE_MAX_ENV = 256


@dataclass(frozen=True)
class WavePlate:
    """One birefringent plate: thickness in meters, fast-axis angle in radians."""

    thickness: float
    orientation: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.thickness) and self.thickness > 0.0):
            raise ValueError(f"plate thickness must be positive, got {self.thickness}")
        if not math.isfinite(self.orientation):
            raise ValueError(f"plate orientation must be finite, got {self.orientation}")


@dataclass(frozen=True)
class WavePlateStack:
    """Ordered plates sharing one birefringence dn; plates[0] acts first."""

    plates: tuple[WavePlate, ...]
    birefringence: float = QUARTZ_BIREFRINGENCE

    def __post_init__(self) -> None:
        plates = tuple(self.plates)
        if not plates:
            raise ValueError("stack needs at least one plate")
        if not (math.isfinite(self.birefringence) and self.birefringence != 0.0):
            raise ValueError(
                f"birefringence must be finite and nonzero, got {self.birefringence}"
            )
        object.__setattr__(self, "plates", plates)

    @property
    def total_thickness(self) -> float:
        return sum(p.thickness for p in self.plates)

    def delays(self) -> np.ndarray:
        """Per-plate group delays tau_i = dn * x_i / c, in seconds."""
        return np.array(
            [self.birefringence * p.thickness / LIGHT_SPEED for p in self.plates]
        )

    def is_aligned(self, atol: float = 1e-12) -> bool:
        """True when every plate shares the first plate's orientation."""
        first = self.plates[0].orientation
        return all(abs(p.orientation - first) <= atol for p in self.plates)


def jones_at_frequencies(stack: WavePlateStack, omegas) -> np.ndarray:
    """Stack Jones unitaries at an array of frequencies, shape (n, 2, 2)."""
    w = np.atleast_1d(np.asarray(omegas, dtype=float))
    taus = stack.delays()
    out = np.broadcast_to(np.eye(2, dtype=complex), (w.size, 2, 2)).copy()
    for plate, tau in zip(stack.plates, taus):
        c = math.cos(plate.orientation)
        s = math.sin(plate.orientation)
        rot = np.array([[c, -s], [s, c]])
        phase = np.exp(2j * math.pi * w * tau)
        j = np.empty((w.size, 2, 2), dtype=complex)
        # R @ diag(1, phase) @ R.T, expanded entrywise to stay vectorized
        j[:, 0, 0] = c * c + phase * s * s
        j[:, 0, 1] = c * s - phase * s * c
        j[:, 1, 0] = j[:, 0, 1]
        j[:, 1, 1] = s * s + phase * c * c
        out = j @ out
    return out


def jones_at_frequency(stack: WavePlateStack, omega: float) -> np.ndarray:
    """Stack Jones unitary at a single frequency, shape (2, 2)."""
    return jones_at_frequencies(stack, [float(omega)])[0]


def _check_qubit(rho) -> np.ndarray:
    a = as_matrix(rho)
    if a.shape != (2, 2):
        raise ValueError(f"polarization probe must be a qubit, got shape {a.shape}")
    return a


def apply_channel(
    stack: WavePlateStack,
    spectrum: GaussianSpectrum,
    rho,
    grid: FrequencyGrid | None = None,
) -> DensityMatrix:
    """Frequency-averaged action of the stack on a polarization qubit.

    Phi(rho) = sum_k w_k V(omega_k) rho V(omega_k)^dagger over the grid
    (default: discretize(spectrum)). Pass an explicit grid to evaluate two
    channels on shared support, which keeps the data-processing inequality
    exact for the discretized pair.
    """
    a = _check_qubit(rho)
    if grid is None:
        grid = discretize(spectrum)
    v = jones_at_frequencies(stack, grid.points)
    out = np.einsum("n,nab,bc,ndc->ad", grid.weights, v, a, v.conj())
    return DensityMatrix((out + out.conj().T) / 2)


def apply_channel_oracle(
    stack: WavePlateStack,
    spectrum: GaussianSpectrum,
    rho,
    n_env: int,
) -> DensityMatrix:
    """Brute-force reference channel via an explicit joint unitary.

    Embeds the environment as an n_env-point frequency pointer (the default
    discretization of the spectrum at that size), applies the controlled
    Jones unitary U = sum_k V(omega_k) (x) |k><k| to rho (x) diag(w), and
    traces the pointer out. Exponentially sized, so n_env is capped; use
    apply_channel for production work.
    """
    if n_env > ORACLE_MAX_ENV:
        raise ValueError(
            f"oracle environment capped at {ORACLE_MAX_ENV} points, got {n_env}"
        )
    a = _check_qubit(rho)
    grid = discretize(spectrum, n=n_env)
    v = jones_at_frequencies(stack, grid.points)
    n = grid.size
    u = np.zeros((2 * n, 2 * n), dtype=complex)
    for k in range(n):
        rows = np.ix_((k, n + k), (k, n + k))
        u[rows] = v[k]
    joint = np.kron(a, np.diag(grid.weights.astype(complex)))
    evolved = u @ joint @ u.conj().T
    out = partial_trace_env(evolved, 2, n)
    return DensityMatrix((out + out.conj().T) / 2)
