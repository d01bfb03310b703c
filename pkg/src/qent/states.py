"""Two-qubit density matrices and the maps used on them.

Basis ordering is |00>, |01>, |10>, |11> throughout, with qubit A the
left tensor factor.  The Bell vectors are stored as the columns of
``BELL_BASIS`` in the order Phi+, Phi-, Psi+, Psi-.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import (
    DimensionMismatch,
    InvalidDensityMatrix,
    InvalidWeights,
    NonOrthonormalFrame,
    OutOfRange,
)

TRACE_TOL = 1e-10
PSD_TOL = 1e-10
WEIGHT_TOL = 1e-12
FRAME_TOL = 1e-12

_S = 1.0 / np.sqrt(2.0)
BELL_BASIS = np.array(
    [
        [_S, _S, 0, 0],
        [0, 0, _S, _S],
        [0, 0, _S, -_S],
        [_S, -_S, 0, 0],
    ],
    dtype=complex,
)
PHI_PLUS = BELL_BASIS[:, 0].copy()


class Subsystem(str, enum.Enum):
    A = "A"
    B = "B"


def clamp_spectrum(w: np.ndarray, tol: float = PSD_TOL) -> np.ndarray:
    """Zero eigenvalues in ``[-tol, 0)``; anything more negative is an error."""
    w = np.asarray(w, dtype=float)
    if np.any(w < -tol):
        raise InvalidDensityMatrix(f"eigenvalue {float(np.min(w)):.3e} below -{tol}")
    return np.clip(w, 0.0, None)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated 4x4 two-qubit density matrix."""

    matrix: np.ndarray
    _eig: tuple = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        m = linalg.as_matrix(self.matrix, dims=(4,))
        herm = float(linalg.hermiticity_error(m))
        if herm > linalg.HERMITIAN_TOL:
            raise InvalidDensityMatrix(f"not Hermitian (error {herm:.3e})")
        tr = np.trace(m)
        if abs(tr - 1.0) > TRACE_TOL:
            raise InvalidDensityMatrix(f"trace {tr} differs from 1")
        w, v = linalg.eigh(m)
        clamp_spectrum(w)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "_eig", (w, v))

    @property
    def eigenvalues(self) -> np.ndarray:
        """Raw eigenvalues, descending (may carry roundoff below zero)."""
        return self._eig[0]

    @property
    def eigenvectors(self) -> np.ndarray:
        return self._eig[1]

    def spectral_form(self) -> "SpectralForm":
        w = clamp_spectrum(self._eig[0])
        return SpectralForm(w / w.sum(), self._eig[1])

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)


@dataclass(frozen=True, eq=False)
class SpectralForm:
    """Weights and an orthonormal frame; ``frame[:, i]`` spans the projector ``P_i``."""

    weights: np.ndarray
    frame: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        f = np.asarray(self.frame, dtype=complex)
        if w.shape != (4,) or f.shape != (4, 4):
            raise DimensionMismatch("spectral form needs 4 weights and a 4x4 frame")
        _check_simplex(w)
        gram_err = np.max(np.abs(f.conj().T @ f - np.eye(4)))
        if gram_err > FRAME_TOL:
            raise NonOrthonormalFrame(f"frame Gram matrix off identity by {gram_err:.3e}")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "frame", f)


@dataclass(frozen=True, eq=False)
class ReducedDensityMatrix:
    matrix: np.ndarray

    def __post_init__(self):
        m = linalg.as_matrix(self.matrix, dims=(2,))
        if abs(np.trace(m) - 1.0) > TRACE_TOL:
            raise InvalidDensityMatrix("reduced state does not have unit trace")
        object.__setattr__(self, "matrix", m)

    @property
    def eigenvalues(self) -> np.ndarray:
        return linalg.eigvalsh(self.matrix)

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)


def _check_simplex(w: np.ndarray) -> None:
    if np.any(~np.isfinite(w)) or np.any(w < 0.0):
        raise InvalidWeights(f"weights must be non-negative: {w}")
    if abs(w.sum() - 1.0) > WEIGHT_TOL:
        raise InvalidWeights(f"weights sum to {w.sum()!r}, not 1")


def _matrix_of(rho) -> np.ndarray:
    if isinstance(rho, (DensityMatrix, ReducedDensityMatrix)):
        return rho.matrix
    return np.asarray(rho, dtype=complex)


def mix_frame(weights: np.ndarray, frame: np.ndarray) -> np.ndarray:
    """``sum_i w_i |f_i><f_i|`` for a stack of weights/frames (no validation)."""
    return np.einsum("...ik,...k,...jk->...ij", frame, weights, np.conj(frame))


def from_spectral(s: SpectralForm) -> DensityMatrix:
    return DensityMatrix(mix_frame(s.weights, s.frame))


def pure_state(psi) -> DensityMatrix:
    psi = np.asarray(psi, dtype=complex).reshape(4)
    psi = psi / np.linalg.norm(psi)
    return DensityMatrix(np.outer(psi, psi.conj()))


def product_state(rho_a, rho_b) -> DensityMatrix:
    return DensityMatrix(linalg.kron(_matrix_of(rho_a), _matrix_of(rho_b)))


def maximally_mixed() -> DensityMatrix:
    return DensityMatrix(np.eye(4, dtype=complex) / 4)


def bell_state() -> DensityMatrix:
    return pure_state(PHI_PLUS)


def werner(p: float) -> DensityMatrix:
    """``p |Phi+><Phi+| + (1 - p) I/4``."""
    if not 0.0 <= p <= 1.0:
        raise OutOfRange(f"Werner parameter {p} outside [0, 1]")
    return DensityMatrix(p * np.outer(PHI_PLUS, PHI_PLUS.conj()) + (1.0 - p) * np.eye(4) / 4)


def bell_diagonal(weights) -> DensityMatrix:
    w = np.asarray(weights, dtype=float)
    if w.shape != (4,):
        raise DimensionMismatch("Bell-diagonal state needs exactly 4 weights")
    _check_simplex(w)
    return DensityMatrix(mix_frame(w, BELL_BASIS))


def partial_trace_array(m: np.ndarray, keep) -> np.ndarray:
    """Reduced 2x2 matrices of a stack of 4x4 matrices."""
    keep = Subsystem(keep)
    t = np.asarray(m).reshape(m.shape[:-2] + (2, 2, 2, 2))
    if keep is Subsystem.A:
        return np.einsum("...ajbj->...ab", t)
    return np.einsum("...iaib->...ab", t)


def partial_transpose_array(m: np.ndarray) -> np.ndarray:
    """Transpose over subsystem B for a stack of 4x4 matrices."""
    t = np.asarray(m).reshape(m.shape[:-2] + (2, 2, 2, 2))
    return np.swapaxes(t, -3, -1).reshape(m.shape)


def partial_trace(rho, keep="A") -> ReducedDensityMatrix:
    m = _matrix_of(rho)
    if m.shape != (4, 4):
        raise DimensionMismatch(f"partial trace needs a 4x4 matrix, got {m.shape}")
    return ReducedDensityMatrix(partial_trace_array(m, keep))


def partial_transpose(rho) -> np.ndarray:
    m = _matrix_of(rho)
    if m.shape != (4, 4):
        raise DimensionMismatch(f"partial transpose needs a 4x4 matrix, got {m.shape}")
    return partial_transpose_array(m)
