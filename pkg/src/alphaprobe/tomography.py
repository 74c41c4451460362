"""Shot-noise qubit tomography and Monte-Carlo error bars for width bounds.

Measurement model: each of three mutually unbiased polarization bases is
integrated for a fixed time at a fixed pair-detection rate; the two outcome
counts are independent Poisson draws with means rate * time * p_outcome.
Linear inversion of the count asymmetries gives a Bloch-vector estimate that
is repaired into a physical state. Monte-Carlo replicas repeat the full
four-state tomography with independent counter-derived streams and propagate
each replica through the bound pipeline.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bounds import NoInformationError, ProbingRecord, tightest_bound
from .linalg import DensityMatrix, as_matrix, project_to_state

_SQ2 = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class MeasurementBasis:
    """Projective qubit basis given by its two outcome kets."""

    name: str
    plus: np.ndarray
    minus: np.ndarray

    def __post_init__(self) -> None:
        plus = np.asarray(self.plus, dtype=complex).reshape(2)
        minus = np.asarray(self.minus, dtype=complex).reshape(2)
        for label, ket in (("plus", plus), ("minus", minus)):
            norm = np.linalg.norm(ket)
            if abs(norm - 1.0) > 1e-12:
                raise ValueError(f"{self.name}/{label} ket is not normalized: |k| = {norm}")
        overlap = abs(np.vdot(plus, minus))
        if overlap > 1e-12:
            raise ValueError(f"{self.name} outcome kets are not orthogonal: {overlap:.3e}")
        plus.setflags(write=False)
        minus.setflags(write=False)
        object.__setattr__(self, "plus", plus)
        object.__setattr__(self, "minus", minus)

    @property
    def observable(self) -> np.ndarray:
        """Traceless +/-1 observable P_plus - P_minus."""
        return np.outer(self.plus, self.plus.conj()) - np.outer(self.minus, self.minus.conj())


HV_BASIS = MeasurementBasis("hv", (1.0, 0.0), (0.0, 1.0))
DIAG_BASIS = MeasurementBasis("diag", (_SQ2, _SQ2), (_SQ2, -_SQ2))
CIRC_BASIS = MeasurementBasis("circ", (_SQ2, _SQ2 * 1j), (_SQ2, -_SQ2 * 1j))

MUB_BASES = (HV_BASIS, DIAG_BASIS, CIRC_BASIS)


@dataclass(frozen=True)
class TomographySettings:
    """Acquisition parameters shared by every basis of a tomography run."""

    integration_time: float  # s
    count_rate: float  # detected pairs per second
    seed: int
    bases: tuple[MeasurementBasis, ...] = MUB_BASES

    def __post_init__(self) -> None:
        if not (math.isfinite(self.integration_time) and self.integration_time > 0.0):
            raise ValueError(
                f"integration time must be positive, got {self.integration_time}"
            )
        if not (math.isfinite(self.count_rate) and self.count_rate > 0.0):
            raise ValueError(f"count rate must be positive, got {self.count_rate}")
        if int(self.seed) != self.seed or self.seed < 0:
            raise ValueError(f"seed must be a nonnegative integer, got {self.seed}")
        bases = tuple(self.bases)
        if len(bases) != 3:
            raise ValueError(f"tomography needs exactly 3 bases, got {len(bases)}")
        names = {b.name for b in bases}
        if len(names) != 3:
            raise ValueError("basis names must be distinct")
        # linear inversion assumes the observables form an orthogonal Bloch triple
        obs = [b.observable for b in bases]
        for i in range(3):
            for j in range(i, 3):
                want = 2.0 if i == j else 0.0
                got = float(np.trace(obs[i] @ obs[j]).real)
                if abs(got - want) > 1e-9:
                    raise ValueError(
                        f"bases {bases[i].name}/{bases[j].name} are not Bloch-orthogonal: "
                        f"tr(P_i P_j) = {got}"
                    )
        object.__setattr__(self, "bases", bases)

    @property
    def expected_pairs(self) -> float:
        return self.count_rate * self.integration_time


@dataclass(frozen=True)
class CountRecord:
    """Outcome counts per basis: name -> (n_plus, n_minus)."""

    counts: dict[str, tuple[int, int]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        clean: dict[str, tuple[int, int]] = {}
        for name, pair in self.counts.items():
            n_plus, n_minus = pair
            for n in (n_plus, n_minus):
                if int(n) != n or n < 0:
                    raise ValueError(
                        f"counts must be nonnegative integers, got {pair} in {name!r}"
                    )
            clean[str(name)] = (int(n_plus), int(n_minus))
        object.__setattr__(self, "counts", clean)

    def to_json(self) -> dict:
        return {name: list(pair) for name, pair in self.counts.items()}

    @classmethod
    def from_json(cls, payload: dict) -> "CountRecord":
        return cls({name: (int(p[0]), int(p[1])) for name, p in payload.items()})


def born_probabilities(rho, basis: MeasurementBasis) -> tuple[float, float]:
    """Outcome probabilities (p_plus, p_minus) of the basis on a qubit state."""
    a = as_matrix(rho)
    if a.shape != (2, 2):
        raise ValueError(f"tomography acts on qubits, got shape {a.shape}")
    p_plus = float(np.real(basis.plus.conj() @ a @ basis.plus))
    p_minus = float(np.real(basis.minus.conj() @ a @ basis.minus))
    # clip floating-point residue; the pair sums to tr(rho) = 1
    return (min(max(p_plus, 0.0), 1.0), min(max(p_minus, 0.0), 1.0))


def rng_stream(seed: int, spawn_key: tuple[int, ...]) -> np.random.Generator:
    """Counter-derived independent stream for (seed, spawn_key).

    Streams with different spawn keys are statistically independent and
    reproducible regardless of creation or consumption order.
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in spawn_key))
    return np.random.Generator(np.random.Philox(ss))


def sample_counts(
    probabilities: dict[str, tuple[float, float]],
    settings: TomographySettings,
    stream: np.random.Generator,
) -> CountRecord:
    """Poisson-sample counts for precomputed per-basis outcome probabilities."""
    pairs = settings.expected_pairs
    counts: dict[str, tuple[int, int]] = {}
    for basis in settings.bases:
        p_plus, p_minus = probabilities[basis.name]
        n_plus = int(stream.poisson(pairs * p_plus))
        n_minus = int(stream.poisson(pairs * p_minus))
        counts[basis.name] = (n_plus, n_minus)
    return CountRecord(counts)


def simulate_counts(
    rho, settings: TomographySettings, stream: np.random.Generator
) -> CountRecord:
    """Born probabilities plus Poisson sampling in one step."""
    probs = {b.name: born_probabilities(rho, b) for b in settings.bases}
    return sample_counts(probs, settings, stream)


def expected_counts(rho, settings: TomographySettings) -> CountRecord:
    """Noiseless counts: expected values rounded to integers."""
    pairs = settings.expected_pairs
    counts: dict[str, tuple[int, int]] = {}
    for basis in settings.bases:
        p_plus, p_minus = born_probabilities(rho, basis)
        counts[basis.name] = (round(pairs * p_plus), round(pairs * p_minus))
    return CountRecord(counts)


def reconstruct(
    counts: CountRecord, bases: tuple[MeasurementBasis, ...] = MUB_BASES
) -> DensityMatrix:
    """Linear-inversion estimate from count asymmetries, repaired to a state.

    rho_hat = (I + sum_k <P_k> P_k) / 2 with <P_k> = (n_plus - n_minus) / N_k,
    then projected onto the physical set (Hermitize, clip, renormalize).
    """
    estimate = np.eye(2, dtype=complex)
    for basis in bases:
        if basis.name not in counts.counts:
            raise ValueError(f"count record is missing basis {basis.name!r}")
        n_plus, n_minus = counts.counts[basis.name]
        total = n_plus + n_minus
        if total == 0:
            raise ValueError(
                f"basis {basis.name!r} collected zero counts; asymmetry is undefined"
            )
        estimate += ((n_plus - n_minus) / total) * basis.observable
    return project_to_state(estimate / 2.0)


@dataclass(frozen=True)
class MonteCarloReport:
    """Aggregated bound statistics over tomography replicas.

    values holds one entry per replica in replica order; None marks a replica
    whose reconstructed record was uninformative at every grid point.
    """

    mean_b_inf: float
    std_b_inf: float
    no_info_fraction: float
    replicas: int
    seed: int
    values: tuple[float | None, ...]

    def to_json(self) -> dict:
        return {
            "mean_b_inf_hz": self.mean_b_inf,
            "std_b_inf_hz": self.std_b_inf,
            "no_info_fraction": self.no_info_fraction,
            "replicas": self.replicas,
            "seed": self.seed,
        }


def monte_carlo_bounds(
    truth: ProbingRecord,
    settings: TomographySettings,
    replicas: int,
    alpha_grid=None,
    noiseless: bool = False,
    replica_order=None,
) -> MonteCarloReport:
    """Propagate tomography shot noise through the bound pipeline.

    Each replica redoes the four-state tomography with its own streams
    (spawn keys (replica, state_index)) and reports the tightest bound of the
    reconstructed record. replica_order may permute the evaluation order
    (e.g. for chunked execution); results are aggregated order-independently,
    so any permutation yields the identical report.
    """
    if int(replicas) != replicas or replicas < 2:
        raise ValueError(
            f"aggregation needs at least 2 replicas, got {replicas}; use a single "
            "reconstruction directly for one-shot runs"
        )
    replicas = int(replicas)
    order = list(range(replicas)) if replica_order is None else [int(r) for r in replica_order]
    if sorted(order) != list(range(replicas)):
        raise ValueError("replica_order must be a permutation of range(replicas)")

    truth_states = (truth.rho1, truth.rho2, truth.phi1_rho1, truth.phi2_rho2)
    probs = [
        {b.name: born_probabilities(s, b) for b in settings.bases} for s in truth_states
    ]

    results: dict[int, float | None] = {}
    for replica in order:
        estimates = []
        for state_idx, state_probs in enumerate(probs):
            if noiseless:
                counts = expected_counts(truth_states[state_idx], settings)
            else:
                stream = rng_stream(settings.seed, (replica, state_idx))
                counts = sample_counts(state_probs, settings, stream)
            estimates.append(reconstruct(counts, settings.bases))
        record = ProbingRecord(
            rho1=estimates[0],
            rho2=estimates[1],
            phi1_rho1=estimates[2],
            phi2_rho2=estimates[3],
            delta_mu=truth.delta_mu,
        )
        curve = tightest_bound(record, alpha_grid)
        results[replica] = None if curve.optimum is None else curve.optimum.value

    # order-independent aggregation: replica index order, compensated sums
    values = tuple(results[r] for r in range(replicas))
    informative = [v for v in values if v is not None]
    misses = replicas - len(informative)
    if not informative:
        raise NoInformationError(
            f"all {replicas} replicas were uninformative (no_info_fraction = 1.0)"
        )
    mean = math.fsum(informative) / len(informative)
    if len(informative) > 1:
        var = math.fsum((v - mean) ** 2 for v in informative) / (len(informative) - 1)
        std = math.sqrt(var)
    else:
        std = 0.0
    return MonteCarloReport(
        mean_b_inf=mean,
        std_b_inf=std,
        no_info_fraction=misses / replicas,
        replicas=replicas,
        seed=settings.seed,
        values=values,
    )
