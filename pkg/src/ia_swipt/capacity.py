"""Per-block capacities and the deterministic Monte Carlo engine.

The destination rate is limited by the weaker hop (decode-and-forward), scaled
by the protocol's effective data-phase prelog: (1-alpha)/2 under TSR, 1/2
under PSR. A primary pair transmits through both periods, so its rate is the
prelog-weighted sum of its two per-period rates: weights ((1+alpha)/2,
(1-alpha)/2) under TSR (the pair keeps transmitting while the relay harvests)
and (1/2, 1/2) under PSR.

``ergodic_capacity`` averages over i.i.d. blocks. Trials are evaluated in
fixed-size batches; each trial owns an RNG substream keyed by (seed, trial
index), batch boundaries do not depend on the worker count, and results are
assembled by trial index before reduction. Together this makes every estimate
bit-identical across serial and threaded runs of any width.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ia_swipt.beamforming import INVERTED_LINKS, design_beamformers
from ia_swipt.channel import (
    CsiScenario,
    Topology,
    apply_mismatch,
    draw_channel_set,
    draw_mismatched_batch,
    error_variance,
    trial_rng,
)
from ia_swipt.harvesting import PowerConfig, ProtocolParams, SinrReport, evaluate_sinrs

__all__ = [
    "CHUNK_TRIALS",
    "CapacityEstimate",
    "CapacitySample",
    "ErgodicResult",
    "capacity_destination",
    "capacity_primary",
    "ergodic_capacity",
    "estimate_from_samples",
    "primary_weights",
    "resolve_workers",
    "single_trial",
]

# Trials per batch. Fixed (never derived from the worker count) so that the
# set of batches, and with it every floating-point reduction, is identical no
# matter how the work is spread over threads.
CHUNK_TRIALS = 1024

_THREADS_ENV = "IA_SWIPT_THREADS"


@dataclass(frozen=True)
class CapacityEstimate:
    """Sample mean, standard error of the mean, and the trial count behind them."""

    mean: float
    stderr: float
    trials: int


@dataclass
class CapacitySample:
    """Capacities of a single block: destination and both primary pairs."""

    destination: float
    primary: tuple


@dataclass
class ErgodicResult:
    destination: CapacityEstimate
    primary: tuple
    resamples: int


def destination_prelog(params: ProtocolParams) -> float:
    """Fraction of the block actually carrying each hop's payload."""
    if params.kind == "tsr":
        return (1.0 - params.alpha) / 2.0
    return 0.5


def primary_weights(kind: str, alpha: float | None = None) -> tuple:
    """Per-period time weights of a primary pair's rate; they sum to 1.

    TSR: ((1+alpha)/2, (1-alpha)/2), the first period absorbs the harvesting
    phase. PSR: (1/2, 1/2). ``alpha`` here is the raw arithmetic input, so
    boundary values are accepted (unlike ProtocolParams).
    """
    if kind == "tsr":
        if alpha is None or not 0 <= alpha <= 1:
            raise ValueError(f"tsr weights need alpha in [0, 1], got {alpha}")
        return ((1.0 + alpha) / 2.0, (1.0 - alpha) / 2.0)
    if kind == "psr":
        return (0.5, 0.5)
    raise ValueError(f"kind must be 'tsr' or 'psr', got {kind!r}")


def capacity_destination(params: ProtocolParams, gamma_relay, gamma_destination):
    """End-to-end destination rate of one block, bit/s/Hz."""
    bottleneck = np.minimum(np.asarray(gamma_relay), np.asarray(gamma_destination))
    return destination_prelog(params) * np.log2(1.0 + bottleneck)


def capacity_primary(params: ProtocolParams, gamma_tp1, gamma_tp2):
    """Rate of a primary pair over one block, bit/s/Hz."""
    w1, w2 = primary_weights(params.kind, params.alpha)
    return w1 * np.log2(1.0 + np.asarray(gamma_tp1)) + w2 * np.log2(
        1.0 + np.asarray(gamma_tp2)
    )


def estimate_from_samples(samples: np.ndarray) -> CapacityEstimate:
    """Mean and standard error of a 1-D sample array."""
    samples = np.asarray(samples, dtype=float)
    n = samples.shape[0]
    if n < 1:
        raise ValueError("need at least one sample")
    mean = float(np.mean(samples))
    stderr = float(np.std(samples, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return CapacityEstimate(mean=mean, stderr=stderr, trials=n)


def resolve_workers(max_workers: int | None = None) -> int:
    """Worker-thread count: explicit argument, else IA_SWIPT_THREADS, else CPUs."""
    if max_workers is None:
        env = os.environ.get(_THREADS_ENV)
        if env is not None:
            try:
                max_workers = int(env)
            except ValueError:
                raise ValueError(f"{_THREADS_ENV} must be an integer, got {env!r}")
        else:
            max_workers = os.cpu_count() or 1
    return max(1, int(max_workers))


def _simulate_chunk(topology, powers, error_var, params, seed, lo, hi):
    channels, mismatched, resamples = draw_mismatched_batch(
        topology, error_var, seed, range(lo, hi), cond_links=INVERTED_LINKS
    )
    beamformers = design_beamformers(mismatched.estimated, topology.streams)
    report = evaluate_sinrs(params, channels, mismatched, beamformers, powers, topology)
    c_dest = capacity_destination(params, report.relay, report.destination)
    c_prim = capacity_primary(
        params, report.primary[..., 0], report.primary[..., 1]
    )
    return c_dest, c_prim, resamples


def ergodic_capacity(
    topology: Topology,
    powers: PowerConfig,
    scenario: CsiScenario,
    params: ProtocolParams,
    trials: int,
    seed: int,
    *,
    max_workers: int | None = None,
) -> ErgodicResult:
    """Monte Carlo ergodic capacities at the destination and both primary pairs.

    Deterministic in (topology, powers, scenario, params, trials, seed);
    the worker count changes wall time only.
    """
    if trials < 1:
        raise ValueError(f"trials must be at least 1, got {trials}")
    if seed < 0:
        raise ValueError(f"seed must be nonnegative, got {seed}")
    error_var = error_variance(scenario, powers.theta)

    c_dest = np.empty(trials, dtype=float)
    c_prim = np.empty((trials, 2), dtype=float)
    bounds = [(lo, min(lo + CHUNK_TRIALS, trials)) for lo in range(0, trials, CHUNK_TRIALS)]
    workers = resolve_workers(max_workers)
    resamples = 0

    if workers == 1 or len(bounds) == 1:
        for lo, hi in bounds:
            d, p, r = _simulate_chunk(topology, powers, error_var, params, seed, lo, hi)
            c_dest[lo:hi] = d
            c_prim[lo:hi] = p
            resamples += r
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {
                pool.submit(
                    _simulate_chunk, topology, powers, error_var, params, seed, lo, hi
                ): (lo, hi)
                for lo, hi in bounds
            }
            for future, (lo, hi) in futures.items():
                d, p, r = future.result()
                c_dest[lo:hi] = d
                c_prim[lo:hi] = p
                resamples += r

    return ErgodicResult(
        destination=estimate_from_samples(c_dest),
        primary=(
            estimate_from_samples(c_prim[:, 0]),
            estimate_from_samples(c_prim[:, 1]),
        ),
        resamples=resamples,
    )


def single_trial(
    topology: Topology,
    powers: PowerConfig,
    scenario: CsiScenario,
    params: ProtocolParams,
    seed: int,
    trial: int,
) -> tuple[CapacitySample, SinrReport]:
    """One block evaluated on the reference (non-batched) path.

    Matches the corresponding row of ``ergodic_capacity`` bit for bit, except
    that this path applies no ill-conditioning guard.
    """
    rng = trial_rng(seed, trial)
    channels = draw_channel_set(topology, rng)
    mismatched = apply_mismatch(channels, error_variance(scenario, powers.theta), rng)
    beamformers = design_beamformers(mismatched.estimated, topology.streams)
    report = evaluate_sinrs(params, channels, mismatched, beamformers, powers, topology)
    c_dest = float(capacity_destination(params, report.relay, report.destination))
    c_prim = capacity_primary(params, report.primary[..., 0], report.primary[..., 1])
    return CapacitySample(destination=c_dest, primary=tuple(float(x) for x in c_prim)), report
