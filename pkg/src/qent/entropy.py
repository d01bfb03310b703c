"""Tsallis and Renyi q-entropies of density-matrix spectra (natural log).

All spectrum-level functions accept probability arrays of shape
``(..., d)`` so they run over whole sample batches; the density-matrix
functions are thin wrappers around them.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import OutOfRange, UnsupportedFamily
from .states import Subsystem, partial_trace_array

SHANNON_BAND = 1e-9
PURE_TOL = 1e-12


class OrderKind(str, enum.Enum):
    FINITE = "finite"
    SHANNON = "shannon"
    MAX_LIMIT = "max"


@dataclass(frozen=True)
class EntropicOrder:
    """The entropic index q: a finite value, the q -> 1 limit, or q -> infinity."""

    kind: OrderKind
    q: float

    def __post_init__(self):
        if self.kind is OrderKind.FINITE:
            if not (math.isfinite(self.q) and self.q > 0):
                raise OutOfRange(f"finite q must be positive, got {self.q}")
            if abs(self.q - 1.0) <= SHANNON_BAND:
                raise OutOfRange("q within 1e-9 of 1 must be built as EntropicOrder.shannon()")

    @classmethod
    def finite(cls, q: float) -> "EntropicOrder":
        return cls(OrderKind.FINITE, float(q))

    @classmethod
    def shannon(cls) -> "EntropicOrder":
        return cls(OrderKind.SHANNON, 1.0)

    @classmethod
    def max_limit(cls) -> "EntropicOrder":
        return cls(OrderKind.MAX_LIMIT, math.inf)

    @classmethod
    def parse(cls, value) -> "EntropicOrder":
        """Accept an order, a number, or a literal such as ``"0.5"``, ``"1"``, ``"inf"``."""
        if isinstance(value, EntropicOrder):
            return value
        if isinstance(value, str):
            text = value.strip().lower()
            if text in ("inf", "infinity", "+inf"):
                return cls.max_limit()
            try:
                value = float(text)
            except ValueError:
                raise OutOfRange(f"cannot read entropic order from {value!r}") from None
        q = float(value)
        if math.isinf(q) and q > 0:
            return cls.max_limit()
        if q == 1.0:
            return cls.shannon()
        return cls.finite(q)

    @property
    def label(self) -> str:
        if self.kind is OrderKind.MAX_LIMIT:
            return "inf"
        if self.kind is OrderKind.SHANNON:
            return "1"
        return format(self.q, "g")

    def __str__(self):
        return self.label


class EntropyFamily(str, enum.Enum):
    TSALLIS = "tsallis"
    RENYI = "renyi"
    TSALLIS_NORMALIZED = "tsallis-normalized"


def _order(q) -> EntropicOrder:
    return EntropicOrder.parse(q)


def _spectrum(p) -> np.ndarray:
    return np.asarray(p, dtype=float)


def _powers(p: np.ndarray, q: float) -> np.ndarray:
    """``p**q`` elementwise with ``0**q = 0`` and underflow flushed to zero."""
    with np.errstate(divide="ignore", under="ignore"):
        logp = np.log(p)
        return np.where(p > 0.0, np.exp(q * logp), 0.0)


def power_sum(p, q: float) -> np.ndarray:
    """``Tr rho^q`` from the spectrum."""
    return np.sum(_powers(_spectrum(p), q), axis=-1)


def log_power_sum(p, q: float) -> np.ndarray:
    """``ln Tr rho^q``, stable for large q (factors out the largest eigenvalue)."""
    p = _spectrum(p)
    pmax = np.max(p, axis=-1)
    ratio = p / pmax[..., None]
    return q * np.log(pmax) + np.log(np.sum(_powers(ratio, q), axis=-1))


def shannon(p) -> np.ndarray:
    p = _spectrum(p)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0.0, -p * np.log(p), 0.0)
    return np.sum(terms, axis=-1)


def tsallis_spectrum(p, q) -> np.ndarray:
    order = _order(q)
    p = _spectrum(p)
    if order.kind is OrderKind.SHANNON:
        return shannon(p)
    if order.kind is OrderKind.MAX_LIMIT:
        return np.zeros(p.shape[:-1])
    return (1.0 - power_sum(p, order.q)) / (order.q - 1.0)


def renyi_spectrum(p, q) -> np.ndarray:
    order = _order(q)
    p = _spectrum(p)
    if order.kind is OrderKind.SHANNON:
        return shannon(p)
    if order.kind is OrderKind.MAX_LIMIT:
        return -np.log(np.max(p, axis=-1))
    return log_power_sum(p, order.q) / (1.0 - order.q)


def renyi_from_tsallis(s, q) -> np.ndarray:
    """Renyi entropy obtained from the Tsallis value, ``ln[1 + (1-q) S_q] / (1-q)``."""
    order = _order(q)
    s = np.asarray(s, dtype=float)
    if order.kind is not OrderKind.FINITE:
        raise OutOfRange("the Tsallis-to-Renyi map needs a finite q")
    return np.log1p((1.0 - order.q) * s) / (1.0 - order.q)


def tsallis_max(q, dim: int = 4) -> float:
    """Largest attainable Tsallis entropy on ``dim`` levels (the uniform spectrum)."""
    order = _order(q)
    if order.kind is OrderKind.SHANNON:
        return math.log(dim)
    if order.kind is OrderKind.MAX_LIMIT:
        return 0.0
    return (1.0 - dim ** (1.0 - order.q)) / (order.q - 1.0)


def renyi_max(dim: int = 4) -> float:
    """Largest attainable Renyi entropy, ``ln dim`` for every q."""
    return math.log(dim)


def tsallis_normalized_spectrum(p, q) -> np.ndarray:
    order = _order(q)
    p = _spectrum(p)
    dim = p.shape[-1]
    if order.kind is OrderKind.MAX_LIMIT:
        # limit of 1 - lambda_max**q
        return np.where(np.max(p, axis=-1) < 1.0 - PURE_TOL, 1.0, 0.0)
    return tsallis_spectrum(p, order) / tsallis_max(order, dim)


_FAMILIES = {
    EntropyFamily.TSALLIS: tsallis_spectrum,
    EntropyFamily.RENYI: renyi_spectrum,
    EntropyFamily.TSALLIS_NORMALIZED: tsallis_normalized_spectrum,
}


def entropy_spectrum(family, p, q) -> np.ndarray:
    return _FAMILIES[EntropyFamily(family)](p, q)


def clamp_probabilities(w) -> np.ndarray:
    """Clip eigenvalues into [0, 1] and renormalise when the sum drifts past 1e-14."""
    p = np.clip(np.asarray(w, dtype=float), 0.0, 1.0)
    total = p.sum(axis=-1, keepdims=True)
    drift = np.abs(total - 1.0) > 1e-14
    return np.where(drift, p / total, p)


def spectrum_of(rho) -> np.ndarray:
    """Eigenvalues of ``rho`` (descending) as a probability vector."""
    if hasattr(rho, "eigenvalues"):
        w = rho.eigenvalues
    else:
        w = linalg.eigvalsh(np.asarray(rho, dtype=complex))
    return clamp_probabilities(w)


def tsallis(rho, q) -> float:
    return float(tsallis_spectrum(spectrum_of(rho), q))


def renyi(rho, q) -> float:
    return float(renyi_spectrum(spectrum_of(rho), q))


def tsallis_normalized(rho, q) -> float:
    return float(tsallis_normalized_spectrum(spectrum_of(rho), q))


def conditional_entropy_array(m: np.ndarray, q, conditioned_on="B", family=EntropyFamily.RENYI, p_total=None):
    """``S[rho_AB] - S[rho_X]`` for a stack of 4x4 states, X the conditioning side."""
    family = EntropyFamily(family)
    if family is EntropyFamily.TSALLIS_NORMALIZED:
        raise UnsupportedFamily("conditional entropy is defined for the tsallis and renyi families only")
    m = np.asarray(getattr(m, "matrix", m), dtype=complex)
    if p_total is None:
        p_total = clamp_probabilities(linalg.eigvalsh(m))
    marginal = partial_trace_array(m, Subsystem(conditioned_on))
    p_marginal = clamp_probabilities(linalg.eigvalsh(marginal))
    return entropy_spectrum(family, p_total, q) - entropy_spectrum(family, p_marginal, q)


def conditional_q_entropy(rho, q, conditioned_on="B", family=EntropyFamily.TSALLIS) -> float:
    """Conditional q-entropy ``S_q[A|B] = S_q[rho_AB] - S_q[rho_B]``.

    ``conditioned_on`` names the subsystem whose marginal entropy is
    subtracted.  Negative values certify entanglement.
    """
    p_total = spectrum_of(rho) if hasattr(rho, "eigenvalues") else None
    return float(conditional_entropy_array(rho, q, conditioned_on, family, p_total=p_total))
