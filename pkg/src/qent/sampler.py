"""Random two-qubit states under the product measure (Haar frame x flat simplex).

Randomness comes from Philox4x64-10, a counter-based generator, keyed by
the pair ``(master_seed, stream_index)``.  Different stream indices are
different keys, so their sequences are distinct permutations of the
counter space and cannot overlap.  Reference output, master seed 0,
stream 0, raw 64-bit words::

    0x02f4ba6408e4d89b 0x3dd62b0b9ca8c5b2 0x1c8667a55d902e79 0x907d7a052fd5b4dc

Uniforms are ``(word >> 11) * 2**-53``.  Gaussians use Box-Muller and
exponentials use ``-log(1 - u)``, both written out here so the transform
from raw words to states is fixed.

Each state consumes a fixed number of uniforms (36 for the full ensemble,
4 for the Bell-diagonal one) laid out consecutively, so drawing a batch of
``n`` states gives exactly the same states as ``n`` single draws.
"""

from __future__ import annotations

import enum

import numpy as np

from .states import BELL_BASIS, DensityMatrix, mix_frame

UNIFORMS_PER_UNITARY = 32
UNIFORMS_PER_SIMPLEX = 4
_MASK64 = (1 << 64) - 1


class EnsembleKind(str, enum.Enum):
    FULL = "full"
    BELL_DIAGONAL = "bell-diagonal"


class SeededStream:
    """A reproducible random stream identified by ``(master_seed, stream_index)``."""

    def __init__(self, master_seed: int = 0, stream_index: int = 0):
        if not 0 <= master_seed <= _MASK64:
            raise ValueError(f"master seed {master_seed} is not a 64-bit unsigned integer")
        if stream_index < 0:
            raise ValueError("stream index must be non-negative")
        self.master_seed = int(master_seed)
        self.stream_index = int(stream_index)
        key = np.array([self.master_seed, self.stream_index & _MASK64], dtype=np.uint64)
        self._bits = np.random.Philox(key=key)

    def __repr__(self):
        return f"SeededStream(master_seed={self.master_seed}, stream_index={self.stream_index})"

    def raw(self, n: int) -> np.ndarray:
        return self._bits.random_raw(n)

    def uniform(self, n: int) -> np.ndarray:
        """``n`` doubles in [0, 1)."""
        return (self.raw(n) >> np.uint64(11)).astype(np.float64) * 2.0**-53


def split_streams(master_seed: int, n_workers: int) -> list[SeededStream]:
    if n_workers < 1:
        raise ValueError("need at least one stream")
    return [SeededStream(master_seed, i) for i in range(n_workers)]


def _complex_gaussians(u: np.ndarray) -> np.ndarray:
    """Box-Muller on consecutive uniform pairs -> standard complex normals."""
    u1 = u[..., 0::2]
    u2 = u[..., 1::2]
    radius = np.sqrt(-np.log1p(-u1))
    return radius * np.exp(2j * np.pi * u2)


def _exponentials_to_simplex(u: np.ndarray) -> np.ndarray:
    e = -np.log1p(-u)
    return e / e.sum(axis=-1, keepdims=True)


def _gram_schmidt(z: np.ndarray) -> np.ndarray:
    """Orthonormalise columns (two passes); R ends up with a positive real diagonal."""
    q = z.copy()
    d = q.shape[-1]
    for k in range(d):
        col = q[..., :, k]
        for _ in range(2):
            for j in range(k):
                prev = q[..., :, j]
                proj = np.sum(prev.conj() * col, axis=-1, keepdims=True)
                col = col - proj * prev
        col = col / np.linalg.norm(col, axis=-1, keepdims=True)
        q[..., :, k] = col
    return q


def haar_unitaries_from_uniforms(u: np.ndarray) -> np.ndarray:
    """Map ``(..., 32)`` uniforms to Haar-distributed 4x4 unitaries."""
    z = _complex_gaussians(u).reshape(u.shape[:-1] + (4, 4))
    return _gram_schmidt(z)


def sample_haar_unitaries(stream: SeededStream, n: int) -> np.ndarray:
    return haar_unitaries_from_uniforms(stream.uniform(n * UNIFORMS_PER_UNITARY).reshape(n, -1))


def sample_haar_unitary(stream: SeededStream) -> np.ndarray:
    return sample_haar_unitaries(stream, 1)[0]


def sample_simplices(stream: SeededStream, n: int) -> np.ndarray:
    return _exponentials_to_simplex(stream.uniform(n * UNIFORMS_PER_SIMPLEX).reshape(n, 4))


def sample_simplex(stream: SeededStream) -> np.ndarray:
    return sample_simplices(stream, 1)[0]


def sample_spectral_batch(stream: SeededStream, n: int, kind=EnsembleKind.FULL):
    """Draw ``n`` states in spectral form.

    Returns ``(weights, frames)`` with shapes ``(n, 4)`` and ``(n, 4, 4)``;
    the states are ``frames @ diag(weights) @ frames^dagger``.
    """
    kind = EnsembleKind(kind)
    if kind is EnsembleKind.FULL:
        u = stream.uniform(n * (UNIFORMS_PER_UNITARY + UNIFORMS_PER_SIMPLEX)).reshape(n, -1)
        frames = haar_unitaries_from_uniforms(u[:, :UNIFORMS_PER_UNITARY])
        weights = _exponentials_to_simplex(u[:, UNIFORMS_PER_UNITARY:])
    else:
        weights = sample_simplices(stream, n)
        frames = np.broadcast_to(BELL_BASIS, (n, 4, 4))
    return weights, frames


def sample_states(stream: SeededStream, n: int, kind=EnsembleKind.FULL) -> np.ndarray:
    weights, frames = sample_spectral_batch(stream, n, kind)
    return mix_frame(weights, frames)


def sample_state(stream: SeededStream, kind=EnsembleKind.FULL) -> DensityMatrix:
    return DensityMatrix(sample_states(stream, 1, kind)[0])
