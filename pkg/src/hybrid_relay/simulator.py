"""Seeded Monte Carlo estimates working directly on per-hop SNR samples.

Trials are grouped in fixed blocks of :data:`BLOCK_TRIALS`. Block ``j`` of a
run with master seed ``s`` draws from a Philox generator keyed by ``s`` with
``j`` in the upper counter word, so its numbers depend on ``(s, j)`` alone.
Partial statistics are merged in block order, which keeps estimates
bit-identical for any worker count.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .model import LinkParams, StructureKind, validate

BLOCK_TRIALS = 1 << 16
MIN_TRIALS = 10_000
_U64 = (1 << 64) - 1


@dataclass(frozen=True)
class ChannelSample:
    """Turbulence intensities and RF fading powers, shape ``(..., hops)``."""

    turbulence: np.ndarray
    fading_power: np.ndarray

    @property
    def hops(self) -> int:
        return self.turbulence.shape[-1]


@dataclass(frozen=True)
class HopSnr:
    gamma_fso: np.ndarray
    gamma_rf: np.ndarray


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    n: int
    seed: int


def block_generator(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed & _U64, counter=[0, 0, block, 0]))


def sample_channel(params: LinkParams, n: int, rng: np.random.Generator) -> ChannelSample:
    """Draw ``n`` trials of per-hop turbulence and fading by CDF inversion."""
    shape = (n, params.hops)
    # 1 - U lies in (0, 1], so the logarithm stays finite
    turbulence = -np.log1p(-rng.random(shape)) / params.lam
    fading = -np.log1p(-rng.random(shape))
    return ChannelSample(turbulence, fading)


def hop_snr(sample: ChannelSample, params: LinkParams) -> HopSnr:
    return HopSnr(params.gamma_bar_fso * sample.turbulence**2, params.gamma_bar_rf * sample.fading_power)


def end_to_end_snr(sample: ChannelSample, params: LinkParams, kind: StructureKind) -> np.ndarray:
    """Bottleneck SNR seen by the destination.

    Each-hop selection keeps the better link per hop and is limited by the
    worst hop: ``min_i max(fso_i, rf_i)``. Destination selection runs two
    independent chains and keeps the better one: ``max(min_i fso_i, min_i rf_i)``.
    """
    if sample.hops != params.hops:
        raise ValueError(f"sample has {sample.hops} hops, params expect {params.hops}")
    snr = hop_snr(sample, params)
    if kind is StructureKind.SELECT_EACH_HOP:
        return np.maximum(snr.gamma_fso, snr.gamma_rf).min(axis=-1)
    if kind is StructureKind.SELECT_AT_DESTINATION:
        return np.maximum(snr.gamma_fso.min(axis=-1), snr.gamma_rf.min(axis=-1))
    raise TypeError(f"unknown structure {kind!r}")


# -- per-block kernels (module level so they pickle into worker processes) ----


def _outage_block(params, kind, seed, block, size):
    rng = block_generator(seed, block)
    g = end_to_end_snr(sample_channel(params, size, rng), params, kind)
    return size, float(np.count_nonzero(g < params.gamma_th)), 0.0


def _mean_m2(x: np.ndarray):
    mean = float(x.mean())
    return x.size, mean, float(np.sum((x - mean) ** 2))


def _ber_block(params, kind, seed, block, size):
    rng = block_generator(seed, block)
    g = end_to_end_snr(sample_channel(params, size, rng), params, kind)
    return _mean_m2(0.5 * np.exp(-g))


def _flip_parity(p_flip: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    flips = rng.random(p_flip.shape) < p_flip
    return np.bitwise_xor.reduce(flips, axis=-1)


def _propagation_block(params, kind, seed, block, size):
    rng = block_generator(seed, block)
    snr = hop_snr(sample_channel(params, size, rng), params)
    if kind is StructureKind.SELECT_EACH_HOP:
        # ties go to FSO; irrelevant here since only the max SNR matters
        selected = np.maximum(snr.gamma_fso, snr.gamma_rf)
        error = _flip_parity(0.5 * np.exp(-selected), rng)
    else:
        fso_err = _flip_parity(0.5 * np.exp(-snr.gamma_fso), rng)
        rf_err = _flip_parity(0.5 * np.exp(-snr.gamma_rf), rng)
        use_fso = snr.gamma_fso.min(axis=-1) >= snr.gamma_rf.min(axis=-1)
        error = np.where(use_fso, fso_err, rf_err)
    return _mean_m2(error.astype(float))


def _merge(parts):
    """Chan's pairwise update, applied strictly in block order."""
    n, mean, m2 = 0, 0.0, 0.0
    for nb, mb, m2b in parts:
        total = n + nb
        delta = mb - mean
        mean += delta * nb / total
        m2 += m2b + delta * delta * n * nb / total
        n = total
    return n, mean, m2


def _star(args):
    fn, *rest = args
    return fn(*rest)


def _run_blocks(fn, params, kind, n, seed, workers):
    if n < MIN_TRIALS:
        raise ValueError(f"need at least {MIN_TRIALS} trials, got {n}")
    if not 0 <= seed <= _U64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    validate(params)
    sizes = [BLOCK_TRIALS] * (n // BLOCK_TRIALS)
    if n % BLOCK_TRIALS:
        sizes.append(n % BLOCK_TRIALS)
    jobs = [(fn, params, kind, seed, j, size) for j, size in enumerate(sizes)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_star, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        parts = [_star(job) for job in jobs]
    return parts


def estimate_outage(params: LinkParams, kind: StructureKind, n: int, seed: int, workers: int = 1) -> McEstimate:
    """Fraction of trials whose end-to-end SNR falls strictly below ``gamma_th``."""
    parts = _run_blocks(_outage_block, params, kind, n, seed, workers)
    hits = sum(p[1] for p in parts)
    p_hat = hits / n
    return McEstimate(p_hat, math.sqrt(p_hat * (1.0 - p_hat) / n), n, seed)


def estimate_ber(params: LinkParams, kind: StructureKind, n: int, seed: int, workers: int = 1) -> McEstimate:
    """Average of the conditional DPSK error ``exp(-gamma_end) / 2``."""
    total, mean, m2 = _merge(_run_blocks(_ber_block, params, kind, n, seed, workers))
    return McEstimate(mean, math.sqrt(m2 / (total - 1) / total), total, seed)


def estimate_ber_bit_propagation(
    params: LinkParams, kind: StructureKind, n: int, seed: int, workers: int = 1
) -> McEstimate:
    """Bit-level detect-and-forward diagnostic.

    Every hop flips the forwarded bit with probability ``exp(-snr)/2`` and the
    bit arrives wrong after an odd number of flips. Each-hop selection flips
    on the better link of each hop. Destination selection flips the FSO and
    RF chains separately, and the destination keeps the chain with the
    higher bottleneck (minimum hop) SNR, ties going to FSO.

    This deliberately departs from the bottleneck-SNR model behind the
    closed-form BER, so it is not expected to match it for ``hops > 1``. It
    measures how far that model sits from an actual error-propagation chain.
    """
    total, mean, m2 = _merge(_run_blocks(_propagation_block, params, kind, n, seed, workers))
    return McEstimate(mean, math.sqrt(m2 / (total - 1) / total), total, seed)
