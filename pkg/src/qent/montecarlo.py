"""Chunked, seeded Monte Carlo runs over the two-qubit state space.

A run of ``samples`` states is cut into fixed-size chunks and chunk ``k``
draws from ``SeededStream(seed, k)``.  Workers receive whole chunks and
results are combined in chunk order, so the output depends only on the
seed and the sample count, never on the number of workers.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import __version__
from .entanglement import concurrence_array, eof_from_concurrence
from .entropy import EntropicOrder, EntropyFamily, entropy_spectrum
from .errors import InvalidConfig
from .sampler import EnsembleKind, SeededStream, sample_spectral_batch
from .states import mix_frame
from .stats import DEFAULT_BINS, BinnedAccumulator, CorrelationProfile, build_profile

CHUNK_SIZE = 4096
DEFAULT_SAMPLES = 200_000
DEFAULT_Q = ("0.5", "1", "2", "10", "inf")


def default_workers() -> int:
    return os.cpu_count() or 1


def channel_name(family, order: EntropicOrder) -> str:
    return f"{EntropyFamily(family).value}_q{order.label}"


@dataclass
class RunConfig:
    samples: int = DEFAULT_SAMPLES
    seed: int = 0
    bins: int = DEFAULT_BINS
    workers: int = field(default_factory=default_workers)
    q_list: list = field(default_factory=lambda: [EntropicOrder.parse(q) for q in DEFAULT_Q])
    family: EntropyFamily = EntropyFamily.RENYI
    ensemble: EnsembleKind = EnsembleKind.FULL

    def __post_init__(self):
        try:
            self.family = EntropyFamily(self.family)
            self.ensemble = EnsembleKind(self.ensemble)
            self.q_list = [EntropicOrder.parse(q) for q in self.q_list]
        except ValueError as exc:
            raise InvalidConfig(str(exc)) from exc
        if self.samples < 1 or self.bins < 1 or self.workers < 1:
            raise InvalidConfig("samples, bins and workers must be positive")
        if self.samples < self.bins:
            raise InvalidConfig(f"samples ({self.samples}) must be at least bins ({self.bins})")
        if not self.q_list:
            raise InvalidConfig("at least one q value is required")
        if not 0 <= self.seed < 2**64:
            raise InvalidConfig("seed must be a 64-bit unsigned integer")

    @property
    def channels(self) -> list[str]:
        return [channel_name(self.family, q) for q in self.q_list]

    def metadata(self) -> dict:
        return {
            "artifact": f"qent {__version__}",
            "seed": self.seed,
            "samples": self.samples,
            "bins": self.bins,
            "ensemble": self.ensemble.value,
            "family": self.family.value,
            "q_list": " ".join(q.label for q in self.q_list),
        }


def chunk_sizes(samples: int, chunk: int = CHUNK_SIZE) -> list[int]:
    full, rest = divmod(samples, chunk)
    return [chunk] * full + ([rest] if rest else [])


@dataclass
class ChunkResult:
    c_squared: np.ndarray
    eof_bits: np.ndarray
    values: np.ndarray  # (n_channels, n)


def evaluate_chunk(seed: int, index: int, size: int, ensemble, family, q_list) -> ChunkResult:
    stream = SeededStream(seed, index)
    weights, frames = sample_spectral_batch(stream, size, ensemble)
    rho = mix_frame(weights, frames)
    c = concurrence_array(rho, spectral=(weights, frames))
    values = np.stack([entropy_spectrum(family, weights, q) for q in q_list])
    return ChunkResult(c_squared=c * c, eof_bits=eof_from_concurrence(c), values=values)


def _chunk_task(args):
    seed, index, size, ensemble, family, q_list = args
    return evaluate_chunk(seed, index, size, ensemble, family, q_list)


def _accumulate_task(args):
    *chunk_args, channels, bins = args
    res = _chunk_task(chunk_args)
    return BinnedAccumulator(channels, bins).add_batch(res.c_squared, res.values)


def _run(config: RunConfig, task, extra=()):
    tasks = [
        (config.seed, k, size, config.ensemble, config.family, config.q_list, *extra)
        for k, size in enumerate(chunk_sizes(config.samples))
    ]
    if config.workers == 1 or len(tasks) == 1:
        yield from map(task, tasks)
        return
    with ProcessPoolExecutor(max_workers=min(config.workers, len(tasks))) as pool:
        yield from pool.map(task, tasks)


def iter_chunks(config: RunConfig):
    """Per-chunk sample results, in chunk order."""
    return _run(config, _chunk_task)


def sample_table(config: RunConfig) -> ChunkResult:
    parts = list(iter_chunks(config))
    return ChunkResult(
        c_squared=np.concatenate([p.c_squared for p in parts]),
        eof_bits=np.concatenate([p.eof_bits for p in parts]),
        values=np.concatenate([p.values for p in parts], axis=1),
    )


def accumulate_run(config: RunConfig) -> BinnedAccumulator:
    acc = BinnedAccumulator(config.channels, config.bins)
    for part in _run(config, _accumulate_task, (config.channels, config.bins)):
        acc = acc.merge(part)
    return acc


def profiles_from_accumulator(
    acc: BinnedAccumulator, config: RunConfig, quantity="mean", half_width: int = 1
) -> list[CorrelationProfile]:
    out = []
    for q, channel in zip(config.q_list, acc.channels):
        meta = dict(config.metadata(), q=q.label, channel=channel, quantity=quantity)
        if half_width != 1:
            meta["derivative_half_width"] = half_width
        out.append(build_profile(acc, channel, meta, half_width))
    return out


def run_profiles(config: RunConfig, quantity="mean", half_width: int = 1) -> list[CorrelationProfile]:
    return profiles_from_accumulator(accumulate_run(config), config, quantity, half_width)


def profiles_from_records(c_squared, values, channels, bins=DEFAULT_BINS, metadata=None, half_width: int = 1):
    """Profiles for already-computed records (e.g. read back from a scatter file)."""
    acc = BinnedAccumulator(channels, bins).add_batch(c_squared, values)
    return [build_profile(acc, ch, dict(metadata or {}, channel=ch), half_width) for ch in channels]


def throughput_estimate(config: RunConfig) -> float:
    """Samples per second for a single-worker run of ``config``."""
    t0 = time.perf_counter()
    for _ in _run(replace(config, workers=1), _chunk_task):
        pass
    return config.samples / max(time.perf_counter() - t0, 1e-9)

