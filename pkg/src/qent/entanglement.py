"""Wootters concurrence, entanglement of formation and the PPT test.

The eigenvalues of the non-Hermitian product ``rho @ rho_tilde`` are read
off the Hermitian matrix ``sqrt(rho) @ rho_tilde @ sqrt(rho)``, which has
the same spectrum, so the Jacobi kernel is all that is needed.  Square
roots of tiny surrogate eigenvalues amplify rounding noise to about
``sqrt(eps)``, so matrices with a small root are redone from the singular
values of ``sqrt(rho) YY sqrt(rho)*``, read off an 8x8 Hermitian dilation.

Entanglement of formation is in bits.  The q-entropies in
:mod:`qent.entropy` are in nats.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import NegativeEigenvalueBeyondTolerance
from .states import PSD_TOL, clamp_spectrum, partial_transpose_array

SURROGATE_TOL = 1e-8
SMALL_ROOT = 1e-6
SPIN_FLIP = np.real(np.kron(linalg.SIGMA_Y, linalg.SIGMA_Y))


@dataclass(frozen=True)
class ConcurrenceDecomposition:
    roots: np.ndarray
    concurrence: float


def _matrix_of(rho) -> np.ndarray:
    return np.asarray(getattr(rho, "matrix", rho), dtype=complex)


def spin_flip(m: np.ndarray) -> np.ndarray:
    """``(sigma_y x sigma_y) rho* (sigma_y x sigma_y)`` for a stack of matrices."""
    return SPIN_FLIP @ np.conj(m) @ SPIN_FLIP


def wootters_roots(m: np.ndarray, spectral=None) -> np.ndarray:
    """Descending square roots of the eigenvalues of ``rho rho_tilde``.

    ``spectral`` may carry a known ``(weights, frames)`` decomposition of
    ``m`` to skip one eigensolve.
    """
    m = np.asarray(m, dtype=complex)
    if spectral is None:
        w, v = linalg.eigh(m)
        w = clamp_spectrum(w)
    else:
        w, v = spectral
    sqrt_rho = linalg.hermitian_function(w, v, np.sqrt)
    surrogate = sqrt_rho @ spin_flip(m) @ sqrt_rho
    mu = linalg.eigvalsh(surrogate, check=False)
    if np.any(mu < -SURROGATE_TOL):
        raise NegativeEigenvalueBeyondTolerance(
            f"surrogate eigenvalue {float(np.min(mu)):.3e} below -{SURROGATE_TOL}"
        )
    roots = np.sqrt(np.clip(mu, 0.0, None))
    redo = np.min(roots, axis=-1) < SMALL_ROOT
    if np.any(redo):
        roots[redo] = _roots_by_dilation(sqrt_rho[redo])
    return roots


def _roots_by_dilation(sqrt_rho: np.ndarray) -> np.ndarray:
    # singular values of M are the top half of the spectrum of [[0, M], [M^H, 0]]
    m = sqrt_rho @ SPIN_FLIP @ np.conj(sqrt_rho)
    n = m.shape[0]
    big = np.zeros((n, 8, 8), dtype=complex)
    big[:, :4, 4:] = m
    big[:, 4:, :4] = np.conj(np.swapaxes(m, -1, -2))
    return np.clip(linalg.eigvalsh(big, check=False)[:, :4], 0.0, None)


def concurrence_from_roots(roots: np.ndarray) -> np.ndarray:
    c = roots[..., 0] - roots[..., 1] - roots[..., 2] - roots[..., 3]
    return np.clip(c, 0.0, 1.0)


def concurrence_array(m: np.ndarray, spectral=None) -> np.ndarray:
    return concurrence_from_roots(wootters_roots(m, spectral))


def concurrence(rho) -> ConcurrenceDecomposition:
    m = _matrix_of(rho)
    spectral = None
    if hasattr(rho, "eigenvalues"):
        spectral = (clamp_spectrum(rho.eigenvalues), rho.eigenvectors)
    roots = wootters_roots(m, spectral)
    return ConcurrenceDecomposition(roots=roots, concurrence=float(concurrence_from_roots(roots)))


def binary_entropy(x) -> np.ndarray:
    """``-x log2 x - (1-x) log2 (1-x)`` with ``0 log 0 = 0``."""
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        a = np.where(x > 0.0, -x * np.log2(x), 0.0)
        b = np.where(x < 1.0, -(1.0 - x) * np.log2(1.0 - x), 0.0)
    return a + b


def eof_from_concurrence(c) -> np.ndarray:
    c = np.clip(np.asarray(c, dtype=float), 0.0, 1.0)
    return binary_entropy(0.5 * (1.0 + np.sqrt(1.0 - c * c)))


def entanglement_of_formation(rho) -> float:
    """Entanglement of formation in bits."""
    return float(eof_from_concurrence(concurrence(rho).concurrence))


def min_pt_eigenvalue(m: np.ndarray) -> np.ndarray:
    return linalg.eigvalsh(partial_transpose_array(np.asarray(m, dtype=complex)))[..., -1]


def is_ppt(rho) -> tuple[bool, float]:
    """Peres test: ``(positive partial transpose?, smallest PT eigenvalue)``."""
    lam = float(min_pt_eigenvalue(_matrix_of(rho)))
    return lam >= -PSD_TOL, lam
