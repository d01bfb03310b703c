"""Small dense complex matrix kernel for one- and two-qubit operators.

Everything here works on numpy arrays.  The eigensolver is a cyclic
Jacobi method for Hermitian matrices and is vectorised over leading batch
axes, so a stack of ``(n, 4, 4)`` density matrices is diagonalised in one
call without a Python loop over the stack.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NoConvergence, NotHermitian

HERMITIAN_TOL = 1e-10
OFFDIAG_TOL = 1e-14
MAX_SWEEPS = 100

I2 = np.eye(2, dtype=complex)
I4 = np.eye(4, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True)
class EigenSystem:
    """Eigenvalues (descending) and matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_matrix(a, dims=(2, 4)) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] not in dims:
        raise DimensionMismatch(f"expected a square matrix of size {dims}, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def kron(a, b) -> np.ndarray:
    """Tensor product of two 2x2 operators in the |00>,|01>,|10>,|11> ordering."""
    a = as_matrix(a, dims=(2,))
    b = as_matrix(b, dims=(2,))
    return np.kron(a, b)


def _conformable(a, b):
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} are not conformable")
    return a, b


def matmul(a, b) -> np.ndarray:
    a, b = _conformable(a, b)
    return a @ b


def adjoint(a) -> np.ndarray:
    return as_matrix(a).conj().T


def conjugate(a) -> np.ndarray:
    return as_matrix(a).conj()


def trace(a) -> complex:
    return complex(np.trace(as_matrix(a)))


def hermiticity_error(a: np.ndarray) -> np.ndarray:
    """Largest entrywise deviation from Hermiticity, per matrix in the stack."""
    return np.max(np.abs(a - np.swapaxes(a, -1, -2).conj()), axis=(-2, -1))


def _offdiag_norm(a: np.ndarray) -> np.ndarray:
    d = a.shape[-1]
    mask = ~np.eye(d, dtype=bool)
    return np.sqrt(np.sum(np.abs(a[..., mask]) ** 2, axis=-1))


def eigh(m, *, check: bool = True, tol: float = OFFDIAG_TOL, max_sweeps: int = MAX_SWEEPS, vectors: bool = True):
    """Batched Hermitian eigendecomposition by cyclic complex Jacobi rotations.

    Parameters
    ----------
    m : array_like, shape (..., d, d)
        Hermitian matrices.
    check : bool
        Reject input whose Hermiticity error exceeds ``HERMITIAN_TOL``.
    vectors : bool
        Accumulate eigenvectors.  When false ``v`` is returned as None.

    Returns
    -------
    w : ndarray, shape (..., d)
        Real eigenvalues sorted in descending order.
    v : ndarray, shape (..., d, d)
        Orthonormal eigenvectors stored as columns, ``v[..., :, k]`` pairs
        with ``w[..., k]``.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim < 2 or m.shape[-1] != m.shape[-2]:
        raise DimensionMismatch(f"expected square matrices, got shape {m.shape}")
    if check:
        err = hermiticity_error(m)
        if np.any(err > HERMITIAN_TOL):
            raise NotHermitian(f"hermiticity error {float(np.max(err)):.3e} exceeds {HERMITIAN_TOL}")

    batch_shape = m.shape[:-2]
    d = m.shape[-1]
    # symmetrise so the rotations act on an exactly Hermitian matrix
    a = 0.5 * (m + np.swapaxes(m, -1, -2).conj())
    a = a.reshape((-1, d, d)).copy()
    v = np.broadcast_to(np.eye(d, dtype=complex), a.shape).copy() if vectors else None
    _jacobi(a, v, tol, max_sweeps)

    w = np.real(np.diagonal(a, axis1=-2, axis2=-1)).copy()
    order = np.argsort(-w, axis=-1, kind="stable")
    w = np.take_along_axis(w, order, axis=-1).reshape(batch_shape + (d,))
    if not vectors:
        return w, None
    v = np.take_along_axis(v, order[:, None, :], axis=-1)
    return w, v.reshape(batch_shape + (d, d))


def eigvalsh(m, **kwargs) -> np.ndarray:
    return eigh(m, vectors=False, **kwargs)[0]


def _jacobi(a: np.ndarray, v: np.ndarray, tol: float, max_sweeps: int) -> int:
    # Each matrix stops rotating once its own off-diagonal norm is small, so
    # the result for one matrix does not depend on the rest of the batch.
    d = a.shape[-1]
    pairs = [(p, q) for p in range(d) for q in range(p + 1, d)]
    scale = np.maximum(1.0, np.sqrt(np.sum(np.abs(a) ** 2, axis=(-2, -1))))
    for sweep in range(max_sweeps + 1):
        pending = _offdiag_norm(a) >= tol * scale
        if not np.any(pending):
            return sweep
        if sweep == max_sweeps:
            break
        for p, q in pairs:
            apq = a[:, p, q]
            mag = np.abs(apq)
            active = pending & (mag > 0.0)
            safe = np.where(active, mag, 1.0)
            phase = np.where(active, apq / safe, 1.0)
            theta = (a[:, q, q].real - a[:, p, p].real) / (2.0 * safe)
            with np.errstate(over="ignore"):
                t = np.where(theta >= 0.0, 1.0, -1.0) / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
            t = np.where(active, t, 0.0)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            sp = (s * phase.conj())[:, None]
            cp = (c * phase.conj())[:, None]
            cc = c[:, None]
            ss = s[:, None]

            # A <- A G, V <- V G
            for mat in (a, v) if v is not None else (a,):
                colp = mat[:, :, p].copy()
                colq = mat[:, :, q].copy()
                mat[:, :, p] = cc * colp - sp * colq
                mat[:, :, q] = ss * colp + cp * colq
            # A <- G^dagger A
            rowp = a[:, p, :].copy()
            rowq = a[:, q, :].copy()
            a[:, p, :] = cc * rowp - (s * phase)[:, None] * rowq
            a[:, q, :] = ss * rowp + (c * phase)[:, None] * rowq

            a[:, p, q] = np.where(active, 0.0, a[:, p, q])
            a[:, q, p] = np.where(active, 0.0, a[:, q, p])
            a[:, p, p] = np.where(active, a[:, p, p].real, a[:, p, p])
            a[:, q, q] = np.where(active, a[:, q, q].real, a[:, q, q])
    raise NoConvergence(f"Jacobi did not converge within {max_sweeps} sweeps")


def hermitian_eigensystem(m) -> EigenSystem:
    """Eigen-decompose a single 2x2 or 4x4 Hermitian matrix."""
    m = as_matrix(m)
    w, v = eigh(m)
    return EigenSystem(eigenvalues=w, eigenvectors=v)


def hermitian_function(w: np.ndarray, v: np.ndarray, f) -> np.ndarray:
    """Rebuild ``V f(diag w) V^dagger`` for a stack of eigendecompositions."""
    fw = f(w)
    return np.einsum("...ik,...k,...jk->...ij", v, fw, v.conj())
