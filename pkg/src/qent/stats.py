"""Binned statistics over the squared concurrence.

Per-bin sums are kept as exact floating-point expansions (lists of
non-overlapping partials).  Merging two accumulators concatenates and
re-compresses the expansions, so the finalised sums are the correctly
rounded exact sums no matter how the records were partitioned or in which
order partial accumulators were combined.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientBins, OutOfRange

DEFAULT_BINS = 50
C2_SLACK = 1e-12
LOW_CONFIDENCE_COUNT = 10
DERIVATIVE_FLOOR = 1e-12


def exact_partials(values) -> list[float]:
    """Non-overlapping partials whose exact sum equals ``sum(values)``."""
    rest = list(values)
    parts = []
    while True:
        s = math.fsum(rest)
        if s == 0.0:
            return parts
        parts.append(s)
        rest.append(-s)


@dataclass
class SampleRecord:
    """One sampled state: squared concurrence, EoF in bits and entropy channels."""

    c_squared: float
    eof_bits: float
    entropies: dict = field(default_factory=dict)


class BinnedAccumulator:
    """Streaming per-bin count, sum and sum of squares for named channels."""

    def __init__(self, channels, n_bins: int = DEFAULT_BINS):
        if n_bins < 1:
            raise ValueError("need at least one bin")
        self.channels = list(channels)
        self.n_bins = int(n_bins)
        self.counts = np.zeros(self.n_bins, dtype=np.int64)
        self._sum = [[[] for _ in range(self.n_bins)] for _ in self.channels]
        self._sumsq = [[[] for _ in range(self.n_bins)] for _ in self.channels]

    @property
    def edges(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.n_bins + 1)

    @property
    def centers(self) -> np.ndarray:
        return (np.arange(self.n_bins) + 0.5) / self.n_bins

    def bin_index(self, c2) -> np.ndarray:
        c2 = np.asarray(c2, dtype=float)
        if np.any(~np.isfinite(c2)) or np.any(c2 < 0.0) or np.any(c2 > 1.0 + C2_SLACK):
            raise OutOfRange("squared concurrence outside [0, 1]")
        return np.minimum((c2 * self.n_bins).astype(np.int64), self.n_bins - 1)

    def add(self, c2: float, values) -> "BinnedAccumulator":
        """Add one record; ``values`` is a mapping or a sequence in channel order."""
        if isinstance(values, dict):
            values = [values[ch] for ch in self.channels]
        return self.add_batch(np.array([c2]), np.asarray(values, dtype=float).reshape(-1, 1))

    def add_batch(self, c2, values) -> "BinnedAccumulator":
        """Add records in bulk; ``values`` has shape ``(n_channels, n_records)``."""
        values = np.asarray(values, dtype=float)
        idx = self.bin_index(c2)
        if values.shape != (len(self.channels), idx.size):
            raise ValueError(f"values shape {values.shape} does not match channels x records")
        if not np.all(np.isfinite(values)):
            raise OutOfRange("non-finite channel value")
        order = np.argsort(idx, kind="stable")
        sorted_idx = idx[order]
        present, starts = np.unique(sorted_idx, return_index=True)
        stops = np.append(starts[1:], sorted_idx.size)
        grouped = values[:, order]
        for b, lo, hi in zip(present.tolist(), starts.tolist(), stops.tolist()):
            self.counts[b] += hi - lo
            for ch in range(len(self.channels)):
                chunk = grouped[ch, lo:hi]
                self._sum[ch][b] = exact_partials(self._sum[ch][b] + chunk.tolist())
                self._sumsq[ch][b] = exact_partials(self._sumsq[ch][b] + (chunk * chunk).tolist())
        return self

    def merge(self, other: "BinnedAccumulator") -> "BinnedAccumulator":
        """Combined accumulator; neither input is modified."""
        if other.channels != self.channels or other.n_bins != self.n_bins:
            raise ValueError("cannot merge accumulators with different channels or binning")
        out = BinnedAccumulator(self.channels, self.n_bins)
        out.counts = self.counts + other.counts
        for ch in range(len(self.channels)):
            for b in range(self.n_bins):
                out._sum[ch][b] = exact_partials(self._sum[ch][b] + other._sum[ch][b])
                out._sumsq[ch][b] = exact_partials(self._sumsq[ch][b] + other._sumsq[ch][b])
        return out

    def _finalise(self, store, channel) -> np.ndarray:
        ch = self.channels.index(channel)
        return np.array([math.fsum(parts) for parts in store[ch]])

    def sums(self, channel) -> np.ndarray:
        return self._finalise(self._sum, channel)

    def sums_sq(self, channel) -> np.ndarray:
        return self._finalise(self._sumsq, channel)

    def __eq__(self, other):
        if not isinstance(other, BinnedAccumulator):
            return NotImplemented
        if other.channels != self.channels or other.n_bins != self.n_bins:
            return False
        if not np.array_equal(self.counts, other.counts):
            return False
        return all(
            np.array_equal(self.sums(ch), other.sums(ch)) and np.array_equal(self.sums_sq(ch), other.sums_sq(ch))
            for ch in self.channels
        )

    def __repr__(self):
        return f"BinnedAccumulator(channels={self.channels}, n_bins={self.n_bins}, total={int(self.counts.sum())})"


def accumulate(acc: BinnedAccumulator, record: SampleRecord) -> BinnedAccumulator:
    return acc.add(record.c_squared, record.entropies)


def merge(a: BinnedAccumulator, b: BinnedAccumulator) -> BinnedAccumulator:
    return a.merge(b)


def merge_ordered(accs) -> BinnedAccumulator:
    """Fold accumulators left to right (the fixed reduction order)."""
    accs = list(accs)
    out = accs[0]
    for acc in accs[1:]:
        out = out.merge(acc)
    return out


@dataclass
class BinMoments:
    counts: np.ndarray
    mean: np.ndarray
    dispersion: np.ndarray


def bin_mean_and_dispersion(acc: BinnedAccumulator, channel) -> BinMoments:
    """Per-bin mean and population dispersion ``sqrt(<x^2> - <x>^2)``.

    Empty bins come back as NaN.
    """
    n = acc.counts.astype(float)
    with np.errstate(invalid="ignore", divide="ignore"):
        mean = acc.sums(channel) / n
        second = acc.sums_sq(channel) / n
    var = np.clip(second - mean * mean, 0.0, None)
    empty = acc.counts == 0
    mean[empty] = np.nan
    var[empty] = np.nan
    return BinMoments(counts=acc.counts.copy(), mean=mean, dispersion=np.sqrt(var))


def _segment_derivative(m: np.ndarray, h: float) -> np.ndarray:
    k = m.size
    d = np.empty(k)
    if k == 2:
        d[:] = (m[1] - m[0]) / h
        return d
    d[1:-1] = (m[2:] - m[:-2]) / (2.0 * h)
    d[0] = (-3.0 * m[0] + 4.0 * m[1] - m[2]) / (2.0 * h)
    d[-1] = (3.0 * m[-1] - 4.0 * m[-2] + m[-3]) / (2.0 * h)
    return d


def _segment_local_quadratic(m: np.ndarray, x: np.ndarray, half_width: int) -> np.ndarray:
    k = m.size
    d = np.empty(k)
    for i in range(k):
        lo = max(0, i - half_width)
        hi = min(k, i + half_width + 1)
        dx = x[lo:hi] - x[i]
        design = np.stack([np.ones_like(dx), dx, dx * dx], axis=1)
        d[i] = np.linalg.lstsq(design, m[lo:hi], rcond=None)[0][1]
    return d


def _populated_runs(mask: np.ndarray) -> list[tuple[int, int]]:
    runs = []
    start = None
    for i, ok in enumerate(list(mask) + [False]):
        if ok and start is None:
            start = i
        elif not ok and start is not None:
            runs.append((start, i))
            start = None
    return runs


def derivative_profile(means, centers=None, half_width: int = 1) -> np.ndarray:
    """Derivative of binned means with respect to the bin centre.

    With the default ``half_width=1`` this is the classic three-point
    scheme: central differences inside each run of populated bins and
    second-order one-sided differences at the run ends.  Larger
    ``half_width`` fits a local quadratic by least squares over up to
    ``2 * half_width + 1`` bins of the run and differentiates that; it is
    exact for quadratic profiles and trades resolution for lower noise.

    Empty bins split the profile into runs handled independently.  Runs
    of two bins get a forward difference, isolated bins get NaN.
    """
    means = np.asarray(means, dtype=float)
    n = means.size
    if half_width < 1:
        raise ValueError("half_width must be at least 1")
    if centers is None:
        centers = (np.arange(n) + 0.5) / n
    centers = np.asarray(centers, dtype=float)
    h = float(centers[1] - centers[0]) if n > 1 else 1.0

    runs = _populated_runs(np.isfinite(means))
    if not any(hi - lo >= 3 for lo, hi in runs):
        raise InsufficientBins("need at least three consecutive populated bins")
    out = np.full(n, np.nan)
    for lo, hi in runs:
        if hi - lo == 2 or (hi - lo >= 3 and half_width == 1):
            out[lo:hi] = _segment_derivative(means[lo:hi], h)
        elif hi - lo >= 3:
            out[lo:hi] = _segment_local_quadratic(means[lo:hi], centers[lo:hi], half_width)
    return out


def correlation_ratio(dispersion, derivative):
    """``r = |dispersion / derivative|`` and a mask of bins where r is defined."""
    dispersion = np.asarray(dispersion, dtype=float)
    derivative = np.asarray(derivative, dtype=float)
    defined = np.isfinite(dispersion) & np.isfinite(derivative) & (np.abs(derivative) >= DERIVATIVE_FLOOR)
    with np.errstate(invalid="ignore", divide="ignore"):
        r = np.where(defined, np.abs(dispersion / np.where(defined, derivative, 1.0)), np.nan)
    return r, defined


@dataclass
class CorrelationProfile:
    centers: np.ndarray
    counts: np.ndarray
    mean: np.ndarray
    dispersion: np.ndarray
    derivative: np.ndarray
    ratio: np.ndarray
    ratio_defined: np.ndarray
    low_confidence: np.ndarray
    metadata: dict = field(default_factory=dict)

    def bin_containing(self, c2: float) -> int:
        n = self.centers.size
        return min(int(c2 * n), n - 1)


def build_profile(acc: BinnedAccumulator, channel, metadata=None, half_width: int = 1) -> CorrelationProfile:
    moments = bin_mean_and_dispersion(acc, channel)
    deriv = derivative_profile(moments.mean, acc.centers, half_width)
    ratio, defined = correlation_ratio(moments.dispersion, deriv)
    return CorrelationProfile(
        centers=acc.centers,
        counts=moments.counts,
        mean=moments.mean,
        dispersion=moments.dispersion,
        derivative=deriv,
        ratio=ratio,
        ratio_defined=defined,
        low_confidence=moments.counts < LOW_CONFIDENCE_COUNT,
        metadata=dict(metadata or {}),
    )
