"""Alpha-fidelities of density matrices and the derived Renyi divergence.

The central quantity is

    F_alpha(rho1, rho2) = tr[(rho2^w rho1 rho2^w)^alpha],  w = (1 - alpha) / (2 alpha),

defined for alpha in (0, 1). It is symmetric at alpha = 1/2 (square-root
fidelity) and generally asymmetric elsewhere. The data-processing inequality
used by the bound machinery is only guaranteed for alpha in [1/2, 1), so
values below 1/2 are accepted but flagged.
"""
from __future__ import annotations

import math
import warnings

import numpy as np

from .linalg import EIG_FLOOR, MatrixLike, as_matrix, eig_hermitian

CLAMP_EXCESS = 1e-9
DPI_ALPHA_MIN = 0.5


def default_alpha_grid(n: int = 500) -> np.ndarray:
    """Default evaluation grid, dense up to (but excluding) alpha = 1."""
    return np.linspace(0.5, 0.9999, n)


def check_alpha(alpha: float) -> float:
    """Validate a single order parameter: must lie strictly inside (0, 1)."""
    a = float(alpha)
    if not 0.0 < a < 1.0:
        raise ValueError(f"alpha must lie in the open interval (0, 1), got {alpha}")
    if a < DPI_ALPHA_MIN:
        warnings.warn(
            f"alpha = {a} is below 0.5: the data-processing inequality is not "
            "guaranteed in this range",
            stacklevel=3,
        )
    return a


def _check_alpha_grid(alphas) -> np.ndarray:
    a = np.asarray(alphas, dtype=float)
    if a.ndim != 1 or a.size == 0:
        raise ValueError("alpha grid must be a nonempty 1-d array")
    if a.min() <= 0.0 or a.max() >= 1.0:
        raise ValueError(
            f"alpha grid must lie strictly inside (0, 1), got range "
            f"[{a.min()}, {a.max()}]"
        )
    if a.min() < DPI_ALPHA_MIN:
        warnings.warn(
            "alpha grid extends below 0.5: the data-processing inequality is "
            "not guaranteed there",
            stacklevel=3,
        )
    return a


def _clamp_fidelity(raw: float) -> float:
    if raw > 1.0 + CLAMP_EXCESS:
        warnings.warn(
            f"alpha-fidelity exceeded 1 by {raw - 1.0:.3e}; clamping to 1",
            stacklevel=3,
        )
    return min(max(raw, 0.0), 1.0)


def _floor_spectrum(w: np.ndarray) -> np.ndarray:
    return np.where(w < EIG_FLOOR, 0.0, w)


def alpha_fidelity(rho1: MatrixLike, rho2: MatrixLike, alpha: float) -> float:
    """F_alpha(rho1, rho2), clamped into [0, 1].

    Both arguments must be density matrices of equal dimension. Null-space
    eigenvalues of rho2 are handled as exact zeros, so pure rho2 reduces to
    <phi|rho1|phi>^alpha.
    """
    return float(alpha_fidelity_curve(rho1, rho2, [check_alpha(alpha)])[0])


def alpha_fidelity_curve(rho1: MatrixLike, rho2: MatrixLike, alphas) -> np.ndarray:
    """F_alpha(rho1, rho2) evaluated over a grid of alpha values.

    One eigendecomposition of rho2 is shared across the grid; each alpha then
    costs a single Hermitian eigenvalue solve of the sandwiched product.
    """
    a1 = as_matrix(rho1)
    a2 = as_matrix(rho2)
    if a1.shape != a2.shape:
        raise ValueError(
            f"density matrices have mismatched shapes {a1.shape} vs {a2.shape}"
        )
    grid = _check_alpha_grid(alphas)

    w2, v2 = eig_hermitian(a2)
    w2 = _floor_spectrum(w2)
    powers = (1.0 - grid) / (2.0 * grid)
    # rho2^((1-alpha)/(2 alpha)) for every alpha at once; 0^p := 0 on the null space
    wp = np.where(w2[None, :] == 0.0, 0.0, w2[None, :] ** powers[:, None])
    half = np.einsum("ab,mb,cb->mac", v2, wp, v2.conj())
    sandwich = half @ a1 @ half
    sandwich = (sandwich + np.conj(np.swapaxes(sandwich, 1, 2))) / 2
    ws = _floor_spectrum(np.linalg.eigvalsh(sandwich))
    raw = np.sum(ws ** grid[:, None], axis=1)
    return np.array([_clamp_fidelity(float(r)) for r in raw])


def renyi_divergence(rho1: MatrixLike, rho2: MatrixLike, alpha: float) -> float:
    """Sandwiched Renyi divergence S_alpha = log F_alpha / (alpha - 1).

    Returns +inf for orthogonal states (F_alpha = 0). Satisfies
    exp((alpha - 1) * S_alpha) = F_alpha by construction.
    """
    a = check_alpha(alpha)
    f = alpha_fidelity(rho1, rho2, a)
    if f == 0.0:
        return math.inf
    return math.log(f) / (a - 1.0)


def dpi_margin(
    rho1: MatrixLike,
    rho2: MatrixLike,
    phi1_rho1: MatrixLike,
    phi2_rho2: MatrixLike,
    xi_fid: float,
    alpha: float,
) -> float:
    """Slack of the generalized data-processing inequality.

    margin = F_alpha(Phi1 rho1, Phi2 rho2) - F_alpha(rho1, rho2) * xi_fid,
    where xi_fid is the alpha-fidelity of the two environment states. The
    inequality holds (margin >= 0) for alpha in [1/2, 1) whenever both
    channels are induced by a common unitary.
    """
    a = check_alpha(alpha)
    if not 0.0 <= xi_fid <= 1.0:
        raise ValueError(f"environment fidelity must lie in [0, 1], got {xi_fid}")
    return alpha_fidelity(phi1_rho1, phi2_rho2, a) - alpha_fidelity(rho1, rho2, a) * xi_fid
