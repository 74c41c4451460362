"""Analytic bounds on an unknown Gaussian spectral width from probe states.

A probing record holds the two prepared probes, the two evolved probes, and
the known control shift dmu between the two environment lines. The
data-processing inequality combined with the closed-form Gaussian fidelity
gives, whenever the evolved-to-initial fidelity fraction f_alpha < 1,

    sigma <= B(alpha) = sqrt( alpha (alpha - 1) dmu^2 / (2 ln f_alpha) ).

Family B1 uses the forward fidelity fraction, family B2 the reversed one
(both fidelity arguments swapped); the reported bound is the minimum over an
alpha grid and both families. A fraction >= 1 carries no width information
(the inequality is satisfied by every sigma), so those grid points are
reported as absent rather than as huge bounds.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .fidelity import alpha_fidelity_curve, default_alpha_grid
from .linalg import DensityMatrix

BOUND_ORDERS = ("forward", "reversed")


class DegenerateControlError(ValueError):
    """dmu = 0 makes the bound trivial (sigma >= 0 only)."""


class NoInformationError(RuntimeError):
    """Raised when a bound was demanded but every grid point is uninformative."""


@dataclass(frozen=True)
class ProbingRecord:
    """Probes before and after the channel pair, plus the control shift dmu (Hz)."""

    rho1: DensityMatrix
    rho2: DensityMatrix
    phi1_rho1: DensityMatrix
    phi2_rho2: DensityMatrix
    delta_mu: float

    def __post_init__(self) -> None:
        states = (self.rho1, self.rho2, self.phi1_rho1, self.phi2_rho2)
        dims = {s.dim for s in states}
        if len(dims) != 1:
            raise ValueError(f"record states must share one dimension, got {sorted(dims)}")
        if not (math.isfinite(self.delta_mu) and self.delta_mu >= 0.0):
            raise ValueError(
                f"control shift must be finite and nonnegative, got {self.delta_mu}"
            )


def _check_order(order: str) -> str:
    if order not in BOUND_ORDERS:
        raise ValueError(f"order must be one of {BOUND_ORDERS}, got {order!r}")
    return order


def _check_bound_alpha(alpha: float) -> float:
    a = float(alpha)
    if not 0.5 <= a < 1.0:
        raise ValueError(
            f"width bounds require alpha in [0.5, 1), got {alpha}; the inequality "
            "is not guaranteed outside this range"
        )
    return a


def fraction_curve(record: ProbingRecord, alphas, order: str = "forward") -> np.ndarray:
    """Evolved-to-initial fidelity fraction over an alpha grid.

    forward: F_alpha(Phi1 rho1, Phi2 rho2) / F_alpha(rho1, rho2); reversed
    swaps both argument pairs. A zero denominator yields +inf.
    """
    _check_order(order)
    if order == "forward":
        num = alpha_fidelity_curve(record.phi1_rho1, record.phi2_rho2, alphas)
        den = alpha_fidelity_curve(record.rho1, record.rho2, alphas)
    else:
        num = alpha_fidelity_curve(record.phi2_rho2, record.phi1_rho1, alphas)
        den = alpha_fidelity_curve(record.rho2, record.rho1, alphas)
    with np.errstate(divide="ignore"):
        return np.where(den == 0.0, math.inf, num / np.where(den == 0.0, 1.0, den))


def fraction(record: ProbingRecord, alpha: float, order: str = "forward") -> float:
    return float(fraction_curve(record, [float(alpha)], order)[0])


def _bounds_from_fractions(
    fractions: np.ndarray, alphas: np.ndarray, delta_mu: float
) -> np.ndarray:
    """Map fidelity fractions to width bounds; NaN marks no-information points.

    Any fraction >= 1 is uninformative, including values a rounding error
    above 1: those come from channels that cannot separate the probes, not
    from a near-infinite width.
    """
    out = np.full(fractions.shape, math.nan)
    informative = fractions < 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        logs = np.log(fractions, where=informative, out=np.full_like(out, math.nan))
        radicand = alphas * (alphas - 1.0) * delta_mu**2 / (2.0 * logs)
        out[informative] = np.sqrt(radicand[informative])
    # a fraction of exactly 0 gives log -inf and a bound of 0, which is the
    # correct limit; only non-finite leftovers are reclassified as absent
    out[~np.isfinite(out)] = math.nan
    return out


def _require_usable(record: ProbingRecord, alpha: float) -> float:
    a = _check_bound_alpha(alpha)
    if record.delta_mu == 0.0:
        raise DegenerateControlError(
            "control shift is zero: the inequality only yields the trivial "
            "condition sigma >= 0"
        )
    return a


def bound_b1(record: ProbingRecord, alpha: float) -> float | None:
    """Family-B1 width bound at one alpha; None when uninformative."""
    a = _require_usable(record, alpha)
    f = fraction(record, a, "forward")
    b = _bounds_from_fractions(np.array([f]), np.array([a]), record.delta_mu)[0]
    return None if math.isnan(b) else float(b)


def bound_b2(record: ProbingRecord, alpha: float) -> float | None:
    """Family-B2 width bound at one alpha; None when uninformative."""
    a = _require_usable(record, alpha)
    f = fraction(record, a, "reversed")
    b = _bounds_from_fractions(np.array([f]), np.array([a]), record.delta_mu)[0]
    return None if math.isnan(b) else float(b)


@dataclass(frozen=True)
class BoundOptimum:
    """Tightest bound over the grid: value (Hz), its alpha, and the family."""

    value: float
    alpha: float
    family: str


@dataclass(frozen=True)
class BoundCurve:
    """Both bound families over an alpha grid; NaN entries are uninformative."""

    alphas: np.ndarray
    b1: np.ndarray
    b2: np.ndarray
    optimum: BoundOptimum | None

    @property
    def valid1(self) -> np.ndarray:
        return ~np.isnan(self.b1)

    @property
    def valid2(self) -> np.ndarray:
        return ~np.isnan(self.b2)

    @property
    def no_information(self) -> bool:
        return self.optimum is None


def tightest_bound(record: ProbingRecord, alpha_grid=None) -> BoundCurve:
    """Evaluate both families over the grid and locate the minimum bound."""
    if record.delta_mu == 0.0:
        raise DegenerateControlError(
            "control shift is zero: the inequality only yields the trivial "
            "condition sigma >= 0"
        )
    alphas = default_alpha_grid() if alpha_grid is None else np.asarray(alpha_grid, float)
    if alphas.ndim != 1 or alphas.size == 0:
        raise ValueError("alpha grid must be a nonempty 1-d array")
    if alphas.min() < 0.5 or alphas.max() >= 1.0:
        raise ValueError(
            f"bound grid must lie in [0.5, 1), got [{alphas.min()}, {alphas.max()}]"
        )
    f1 = fraction_curve(record, alphas, "forward")
    f2 = fraction_curve(record, alphas, "reversed")
    b1 = _bounds_from_fractions(f1, alphas, record.delta_mu)
    b2 = _bounds_from_fractions(f2, alphas, record.delta_mu)

    optimum = None
    best = math.inf
    for family, values in (("B1", b1), ("B2", b2)):
        finite = np.where(np.isnan(values), math.inf, values)
        k = int(np.argmin(finite))
        if finite[k] < best:
            best = float(finite[k])
            optimum = BoundOptimum(value=best, alpha=float(alphas[k]), family=family)
    return BoundCurve(alphas=alphas, b1=b1, b2=b2, optimum=optimum)


def _dual_from_fraction(f: float, alpha: float) -> float | None:
    if f >= 1.0:
        return None
    return math.sqrt(2.0 * math.log(f) / (alpha * (alpha - 1.0)))


def ratio_lower_bound(record: ProbingRecord, alpha: float) -> float | None:
    """Lower bound on dmu / sigma at one alpha (independent of both scales).

    Uses the better (larger) of the two families; None when neither fraction
    is informative.
    """
    a = _check_bound_alpha(alpha)
    candidates = [
        _dual_from_fraction(fraction(record, a, order), a) for order in BOUND_ORDERS
    ]
    present = [c for c in candidates if c is not None]
    return max(present) if present else None


def lower_bound_delta_mu(
    record: ProbingRecord, sigma_known: float, alpha: float
) -> float | None:
    """Lower bound on the control shift when the width is known instead."""
    if not (math.isfinite(sigma_known) and sigma_known > 0.0):
        raise ValueError(f"known width must be positive, got {sigma_known}")
    ratio = ratio_lower_bound(record, alpha)
    return None if ratio is None else sigma_known * ratio


def bound_summary(curve: BoundCurve, sigma_reference: float | None = None) -> dict:
    """JSON-ready summary of a bound curve's optimum."""
    if curve.optimum is None:
        summary: dict = {
            "no_information": True,
            "b_inf_hz": None,
            "alpha_star": None,
            "family": None,
        }
    else:
        summary = {
            "no_information": False,
            "b_inf_hz": curve.optimum.value,
            "alpha_star": curve.optimum.alpha,
            "family": curve.optimum.family,
        }
    if sigma_reference is not None and curve.optimum is not None:
        summary["b_inf_over_sigma"] = curve.optimum.value / sigma_reference
    return summary


def write_bound_curve_csv(curve: BoundCurve, path) -> None:
    """CSV export: alpha,b1_hz,b2_hz,valid1,valid2 (empty cells where invalid)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["alpha", "b1_hz", "b2_hz", "valid1", "valid2"])
        for i in range(curve.alphas.size):
            v1 = not math.isnan(curve.b1[i])
            v2 = not math.isnan(curve.b2[i])
            writer.writerow(
                [
                    f"{curve.alphas[i]:.12e}",
                    f"{curve.b1[i]:.12e}" if v1 else "",
                    f"{curve.b2[i]:.12e}" if v2 else "",
                    "true" if v1 else "false",
                    "true" if v2 else "false",
                ]
            )
