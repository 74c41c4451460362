"""Dense Hermitian linear algebra for small quantum states.

Everything downstream (fidelities, channels, tomography) funnels through the
handful of primitives here, so the numerical tolerances live in one place:
Hermiticity and positivity are enforced at 1e-9, and eigenvalues below
EIG_FLOOR are treated as exact zeros when taking fractional matrix powers.
"""
from __future__ import annotations

import json
from typing import Union

import numpy as np

HERMITICITY_ATOL = 1e-9
PSD_ATOL = 1e-9
TRACE_ATOL = 1e-9
TRACE_IMAG_ATOL = 1e-12
EIG_FLOOR = 1e-12


class NotHermitianError(ValueError):
    """Input matrix is further from Hermitian than the tolerance allows."""


class NotPositiveError(ValueError):
    """Input matrix has an eigenvalue below the positivity tolerance."""


class StateRepairError(ValueError):
    """Matrix cannot be repaired into a state (no positive part left)."""


def hermitian_defect(m: np.ndarray) -> float:
    """Largest entrywise deviation |m - m^dagger|."""
    m = np.asarray(m)
    return float(np.abs(m - m.conj().T).max())


def _as_square(m, name: str = "matrix") -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square, got shape {a.shape}")
    return a


def eig_hermitian(m, atol: float = HERMITICITY_ATOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns (w, V) with eigenvalues w ascending and orthonormal eigenvector
    columns V, so that m = V @ diag(w) @ V^dagger. Raises NotHermitianError
    if the input deviates from Hermitian by more than atol.
    """
    a = _as_square(m)
    defect = hermitian_defect(a)
    if defect > atol:
        raise NotHermitianError(
            f"matrix is not Hermitian: max |m - m^dagger| = {defect:.3e} > {atol:.1e}"
        )
    w, v = np.linalg.eigh((a + a.conj().T) / 2)
    return w, v


def mat_pow_psd(m, p: float, atol: float = PSD_ATOL) -> np.ndarray:
    """Fractional power m^p of a positive semidefinite matrix.

    Eigenvalues below EIG_FLOOR are treated as exact zeros (0^p := 0, including
    p = 0, so m^0 is the projector onto the support). Eigenvalues below -atol
    raise NotPositiveError.
    """
    if p < 0:
        raise ValueError(f"power must be nonnegative, got {p}")
    w, v = eig_hermitian(m)
    if w.min() < -atol:
        raise NotPositiveError(
            f"matrix is not positive semidefinite: min eigenvalue {w.min():.3e} < -{atol:.1e}"
        )
    w = np.where(w < EIG_FLOOR, 0.0, w)
    wp = np.where(w == 0.0, 0.0, w ** p)
    return (v * wp) @ v.conj().T


def partial_trace_env(joint, dim_probe: int, dim_env: int) -> np.ndarray:
    """Trace out the environment of a probe (x) environment operator.

    The joint index is probe-major: row index = p * dim_env + e.
    """
    a = _as_square(joint, "joint operator")
    d = dim_probe * dim_env
    if a.shape[0] != d:
        raise ValueError(
            f"joint operator has dimension {a.shape[0]}, expected "
            f"{dim_probe} * {dim_env} = {d}"
        )
    return np.einsum("peqe->pq", a.reshape(dim_probe, dim_env, dim_probe, dim_env))


class DensityMatrix:
    """Validated density matrix: Hermitian, positive semidefinite, unit trace.

    Wraps a read-only complex array. Construction raises if any invariant is
    violated beyond the module tolerances; use project_to_state to repair a
    noisy estimate first.
    """

    __slots__ = ("_mat",)

    def __init__(self, matrix) -> None:
        a = _as_square(matrix, "density matrix")
        defect = hermitian_defect(a)
        if defect > HERMITICITY_ATOL:
            raise NotHermitianError(
                f"density matrix is not Hermitian: max |m - m^dagger| = {defect:.3e}"
            )
        a = (a + a.conj().T) / 2
        wmin = float(np.linalg.eigvalsh(a).min())
        if wmin < -PSD_ATOL:
            raise NotPositiveError(
                f"density matrix has negative eigenvalue {wmin:.3e}"
            )
        tr = complex(np.trace(a))
        if abs(tr.imag) > TRACE_IMAG_ATOL or abs(tr.real - 1.0) > TRACE_ATOL:
            raise ValueError(f"density matrix trace is {tr}, expected 1")
        a.setflags(write=False)
        self._mat = a

    @property
    def matrix(self) -> np.ndarray:
        return self._mat

    @property
    def dim(self) -> int:
        return self._mat.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is not None:
            return self._mat.astype(dtype)
        return self._mat

    def __repr__(self) -> str:
        return f"DensityMatrix(dim={self.dim})"

    def to_json(self) -> dict:
        return matrix_to_json(self._mat)

    @classmethod
    def from_json(cls, payload: dict) -> "DensityMatrix":
        return cls(matrix_from_json(payload))


MatrixLike = Union[DensityMatrix, np.ndarray]


def as_matrix(m: MatrixLike) -> np.ndarray:
    """Accept either a DensityMatrix or a raw array and return the array."""
    if isinstance(m, DensityMatrix):
        return m.matrix
    return np.asarray(m, dtype=complex)


def project_to_state(m) -> DensityMatrix:
    """Repair an approximate state into a valid DensityMatrix.

    Hermitizes via (m + m^dagger)/2, clips negative eigenvalues to zero, and
    renormalizes the trace. Raises StateRepairError if nothing positive
    survives the clip. Inputs are expected to be nearly Hermitian already
    (tomographic estimates are built from Hermitian observables).
    """
    a = _as_square(m, "state estimate")
    a = (a + a.conj().T) / 2
    w, v = np.linalg.eigh(a)
    w = np.clip(w, 0.0, None)
    total = float(w.sum())
    if total <= 0.0:
        raise StateRepairError(
            "state estimate has no positive spectral part; cannot renormalize"
        )
    w = w / total
    return DensityMatrix((v * w) @ v.conj().T)


def matrix_to_json(m) -> dict:
    """Serialize a complex matrix as {"dim": n, "re": [[...]], "im": [[...]]}."""
    a = _as_square(m)
    return {
        "dim": int(a.shape[0]),
        "re": a.real.tolist(),
        "im": a.imag.tolist(),
    }


def matrix_from_json(payload: dict) -> np.ndarray:
    """Inverse of matrix_to_json, with shape validation."""
    try:
        dim = int(payload["dim"])
        re = np.asarray(payload["re"], dtype=float)
        im = np.asarray(payload["im"], dtype=float)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"matrix payload missing field: {exc}") from exc
    if re.shape != (dim, dim) or im.shape != (dim, dim):
        raise ValueError(
            f"matrix payload shape mismatch: dim={dim}, re {re.shape}, im {im.shape}"
        )
    return re + 1j * im


def load_matrix(path) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        return matrix_from_json(json.load(fh))


def save_matrix(path, m) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(matrix_to_json(m), fh, indent=2, sort_keys=True)
        fh.write("\n")
