"""Closed forms for states diagonal in the Bell basis.

For such a state the concurrence and every spectral quantity depend on
the largest weight ``w`` only: ``C = max(0, 2w - 1)``, and for entangled
states ``w = (1 + C)/2`` so ``R_inf = -ln((1 + C)/2)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import OutOfRange


@dataclass(frozen=True)
class BellCurvePoint:
    c_squared: float
    r_infinity: float


def concurrence_closed_form(weights) -> np.ndarray:
    w = np.asarray(weights, dtype=float)
    return np.clip(2.0 * np.max(w, axis=-1) - 1.0, 0.0, None)


def largest_weight(c) -> np.ndarray:
    return 0.5 * (1.0 + np.asarray(c, dtype=float))


def r_infinity(c_squared) -> np.ndarray:
    """``-ln((1 + sqrt(C^2)) / 2)``, vectorised; no range checking."""
    return 0.0 - np.log(largest_weight(np.sqrt(np.asarray(c_squared, dtype=float))))


def bell_r_infinity_curve(grid) -> list[BellCurvePoint]:
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    if np.any(~np.isfinite(grid)) or np.any(grid <= 0.0) or np.any(grid > 1.0):
        raise OutOfRange("Bell curve grid values must lie in (0, 1]")
    return [BellCurvePoint(float(c2), float(r)) for c2, r in zip(grid, r_infinity(grid))]


def default_grid(n: int = 200) -> np.ndarray:
    """``n`` evenly spaced points in (0, 1], ending at 1."""
    return np.arange(1, n + 1) / n
