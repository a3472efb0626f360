"""Monte Carlo sampling of the market process.

Randomness is counter based: path ``i`` of a run with seed ``s`` reads its
uniforms from Philox blocks ``i*B, i*B+1, ...`` under key ``s``, where ``B`` is
the number of 4-word blocks needed for one path. Any split of the paths into
batches, in any number of workers, therefore sees the same numbers. Batch
power sums are merged in path-index order, so the result does not depend on
how many workers ran.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .model import INACTIVE, ModelParams, step

_U53 = 1.0 / 9007199254740992.0
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class SimConfig:
    params: ModelParams
    horizon: int
    num_paths: int
    max_order: int
    seed: int

    def __post_init__(self):
        if int(self.horizon) != self.horizon or self.horizon < 0:
            raise ValueError("horizon must be a non-negative integer")
        if self.num_paths < 1:
            raise ValueError("num_paths must be >= 1")
        if self.max_order < 1:
            raise ValueError("max_order must be >= 1")
        if not 0 <= self.seed <= _MASK64:
            raise ValueError("seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class SampleMoments:
    """Raw sample moments of the terminal log return, orders 1..max_order."""

    moments: tuple
    standard_errors: tuple
    num_paths: int

    def to_dict(self) -> dict:
        return {"moments": list(self.moments),
                "standard_errors": list(self.standard_errors),
                "num_paths": self.num_paths}


def _blocks_per_path(horizon: int) -> int:
    return max(1, -(-horizon // 4))


def path_stream(seed: int, index: int, horizon: int) -> np.random.Generator:
    """Generator positioned at the first uniform of path ``index``."""
    block = index * _blocks_per_path(horizon)
    return np.random.Generator(np.random.Philox(counter=[block, 0, 0, 0], key=[seed, 0]))


def _choose(params: ModelParams, consumed, u: float):
    # one uniform against cumulative group sizes (group 1..g, then inactive)
    x = u * params.total_investors
    cum = 0
    for h, g in enumerate(params.groups):
        cum += g.initial_count - consumed[h]
        if x < cum:
            return h
    return INACTIVE


def _terminal_log_return(log_factors, counts) -> float:
    total = 0.0
    for lf, c in zip(log_factors, counts):
        total += c * lf
    return total


def sample_path(params: ModelParams, horizon: int, stream) -> float:
    """Simulate ``horizon`` steps and return log(p(t)/p(0)).

    ``stream`` is anything with a ``random()`` method returning uniforms in
    [0, 1), e.g. a :class:`numpy.random.Generator`.
    """
    if horizon < 0:
        raise ValueError("horizon must be non-negative")
    state = params.initial_state()
    for _ in range(horizon):
        state = step(params, state, _choose(params, state.consumed, stream.random()))
    return _terminal_log_return(params.log_factors, state.consumed)


def simulate_batch(params: ModelParams, horizon: int, seed: int, start: int, stop: int) -> np.ndarray:
    """Terminal log returns of paths ``start .. stop-1`` (vectorised)."""
    size = stop - start
    g = params.num_groups
    if horizon == 0 or size == 0:
        return np.zeros(size)
    blocks = _blocks_per_path(horizon)
    bitgen = np.random.Philox(counter=[start * blocks, 0, 0, 0], key=[seed, 0])
    raw = bitgen.random_raw(size * blocks * 4).reshape(size, blocks * 4)[:, :horizon]
    uniforms = (raw >> np.uint64(11)).astype(np.float64) * _U53
    counts = np.asarray(params.counts, dtype=np.int64)
    consumed = np.zeros((size, g), dtype=np.int64)
    rows = np.arange(size)
    n = params.total_investors
    if g:
        for s in range(horizon):
            cum = np.cumsum(counts - consumed, axis=1)
            hit = (uniforms[:, s] * n)[:, None] < cum
            chosen = hit.any(axis=1)
            idx = hit.argmax(axis=1)
            consumed[rows[chosen], idx[chosen]] += 1
    out = np.zeros(size)
    for h, lf in enumerate(params.log_factors):
        out += consumed[:, h] * lf
    return out


def _power_sums(x: np.ndarray, max_power: int) -> list:
    sums = []
    p = np.ones_like(x)
    for _ in range(max_power):
        p = p * x
        sums.append(math.fsum(p.tolist()))
    return sums


def _batch_sums(config: SimConfig, start: int, stop: int) -> list:
    x = simulate_batch(config.params, config.horizon, config.seed, start, stop)
    return _power_sums(x, 2 * config.max_order)


def estimate_moments(config: SimConfig, workers: int = 1, batch_size: int = 1 << 16) -> SampleMoments:
    """Raw sample moments with plug-in standard errors.

    The output is bit-identical for a given config and ``batch_size``,
    whatever ``workers`` is.
    """
    m = config.num_paths
    bounds = [(a, min(a + batch_size, m)) for a in range(0, m, batch_size)]
    if workers <= 1:
        partial = [_batch_sums(config, a, b) for a, b in bounds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partial = list(pool.map(lambda ab: _batch_sums(config, *ab), bounds))
    sums = [math.fsum(col) for col in zip(*partial)]
    moments, errors = [], []
    for order in range(1, config.max_order + 1):
        mean = sums[order - 1] / m
        mean_sq = sums[2 * order - 1] / m
        var = max(mean_sq - mean * mean, 0.0)
        if m > 1:
            var *= m / (m - 1)
        moments.append(mean)
        errors.append(math.sqrt(var / m))
    return SampleMoments(tuple(moments), tuple(errors), m)
