"""Channel generation, path loss, and the estimated/residual CSI decomposition.

Every link carries an N x N matrix with i.i.d. circularly symmetric complex
Gaussian entries of unit variance. Distance attenuation is not baked into the
matrices; consumers apply ``Topology.gain(link)`` where power actually matters,
so one draw serves every geometry.

All functions broadcast over leading batch axes: a "matrix" argument may have
shape (..., N, N) and the result keeps the leading axes. The Monte Carlo engine
relies on this to push whole batches of trials through one call.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

__all__ = [
    "ALL_LINKS",
    "CONSTANT_LINKS",
    "PRIMARY_LINKS",
    "ChannelSet",
    "CsiScenario",
    "LinkGeometry",
    "MismatchedChannels",
    "Topology",
    "apply_mismatch",
    "draw_channel_set",
    "draw_mismatched_batch",
    "error_variance",
    "pathloss_gain",
    "trial_rng",
    "uniform_geometry",
]

# Directed link identifiers, receiver first. Primary-to-primary links get an
# independent draw in each transmission period (third element 1 or 2); links
# touching the source S, relay R or destination D stay constant for the block.
# The enumeration order below fixes the RNG consumption order: reordering it
# silently changes every seeded result.
PRIMARY_LINKS: tuple = tuple(
    (rx, tx, period) for period in (1, 2) for rx in ("1", "2") for tx in ("1", "2")
)
CONSTANT_LINKS: tuple = (
    ("R", "S"),
    ("D", "R"),
    ("1", "S"),
    ("2", "S"),
    ("1", "R"),
    ("2", "R"),
    ("R", "1"),
    ("R", "2"),
)
ALL_LINKS: tuple = PRIMARY_LINKS + CONSTANT_LINKS

_LINK_INDEX = {link: i for i, link in enumerate(ALL_LINKS)}


@dataclass(frozen=True)
class LinkGeometry:
    """Distance and path-loss exponent of one directed link."""

    distance: float
    pathloss_exponent: float

    def __post_init__(self):
        if not self.distance > 0:
            raise ValueError(f"link distance must be positive, got {self.distance}")
        if self.pathloss_exponent < 0:
            raise ValueError(
                f"path-loss exponent must be nonnegative, got {self.pathloss_exponent}"
            )


def pathloss_gain(geometry: LinkGeometry) -> float:
    """Average power attenuation d^(-exponent) of a link."""
    return float(geometry.distance ** -geometry.pathloss_exponent)


def uniform_geometry(distance: float = 3.0, pathloss_exponent: float = 2.7) -> dict:
    """The default layout: every link at the same distance and exponent."""
    geo = LinkGeometry(distance, pathloss_exponent)
    return {link: geo for link in ALL_LINKS}


@dataclass(frozen=True)
class Topology:
    """Antenna counts, stream count and per-link geometry of the network.

    ``antennas`` is the element count N at every node, ``streams`` the number
    of data streams f each transmitter sends. The alignment construction needs
    2f <= N (an f-dimensional aligned interference span must leave room for an
    f-dimensional zero-forcing combiner).
    """

    antennas: int = 2
    streams: int = 1
    geometry: Mapping = field(default_factory=uniform_geometry)

    def __post_init__(self):
        if self.streams < 1:
            raise ValueError(f"streams must be at least 1, got {self.streams}")
        if self.antennas < 2 * self.streams:
            raise ValueError(
                f"need antennas >= 2*streams for alignment, got N={self.antennas}, f={self.streams}"
            )
        missing = [link for link in ALL_LINKS if link not in self.geometry]
        if missing:
            raise ValueError(f"geometry missing links: {missing}")

    @classmethod
    def uniform(
        cls,
        antennas: int = 2,
        streams: int = 1,
        distance: float = 3.0,
        pathloss_exponent: float = 2.7,
    ) -> "Topology":
        return cls(antennas, streams, uniform_geometry(distance, pathloss_exponent))

    def gain(self, link) -> float:
        """Path-loss power gain of one link."""
        return pathloss_gain(self.geometry[link])


@dataclass(frozen=True)
class CsiScenario:
    """Channel-knowledge model: perfect estimates, or SNR-scaled error.

    Under mismatch the estimation error variance is psi * theta^(-kappa) where
    theta is the operating transmit SNR. kappa = 0 models a fixed error floor.
    """

    kappa: float | None = None
    psi: float | None = None

    def __post_init__(self):
        if (self.kappa is None) != (self.psi is None):
            raise ValueError("kappa and psi must be provided together")
        if self.psi is not None:
            if self.kappa < 0:
                raise ValueError(f"kappa must be nonnegative, got {self.kappa}")
            if not self.psi > 0:
                raise ValueError(f"psi must be positive, got {self.psi}")

    @classmethod
    def perfect(cls) -> "CsiScenario":
        return cls()

    @classmethod
    def mismatch(cls, kappa: float, psi: float) -> "CsiScenario":
        return cls(kappa, psi)

    @property
    def is_perfect(self) -> bool:
        return self.psi is None


def error_variance(scenario: CsiScenario, theta: float) -> float:
    """Estimation error variance at transmit SNR ``theta`` (linear, > 0)."""
    if not theta > 0:
        raise ValueError(f"theta must be positive, got {theta}")
    if scenario.is_perfect:
        return 0.0
    return float(scenario.psi * theta ** -scenario.kappa)


@dataclass
class ChannelSet:
    """True channels of one block, keyed by link id. Values may be batched."""

    matrices: dict


@dataclass
class MismatchedChannels:
    """Receiver-side view of a block: estimates and the residual error part.

    ``estimated`` holds H + E with E ~ CN(0, error_variance) per entry.
    ``residual`` holds H - estimated/(1 + error_variance), the part of the true
    channel the MMSE-scaled estimate cannot explain; its entries have variance
    error_variance/(1 + error_variance) and are uncorrelated with the estimate.
    """

    estimated: dict
    residual: dict
    error_variance: float


def _standard_complex(rng: np.random.Generator, shape) -> np.ndarray:
    """CN(0, 1) entries: independent real/imag parts with variance 1/2 each."""
    z = rng.standard_normal(tuple(shape) + (2,))
    return (z[..., 0] + 1j * z[..., 1]) / math.sqrt(2.0)


def trial_rng(master_seed: int, trial: int) -> np.random.Generator:
    """The dedicated random stream of one Monte Carlo trial.

    Streams are derived from (master_seed, trial) so any subset of trials can
    be generated in any order, on any worker, with identical results.
    """
    return np.random.default_rng(np.random.SeedSequence((int(master_seed), int(trial))))


def draw_channel_set(topology: Topology, rng: np.random.Generator) -> ChannelSet:
    """Draw all block channels for one realization from ``rng``."""
    n = topology.antennas
    block = _standard_complex(rng, (len(ALL_LINKS), n, n))
    return ChannelSet({link: block[i] for i, link in enumerate(ALL_LINKS)})


def apply_mismatch(
    channels: ChannelSet, error_var: float, rng: np.random.Generator
) -> MismatchedChannels:
    """Corrupt a channel set with estimation noise of the given variance.

    The error draw is always consumed from ``rng`` (scaled by sqrt(error_var)),
    so a run with error_var = 0 stays on the same random trajectory as any
    mismatched run with the same seed. At error_var = 0 the estimates equal the
    true channels exactly and every residual is exactly zero.
    """
    if error_var < 0:
        raise ValueError(f"error variance must be nonnegative, got {error_var}")
    ref = channels.matrices[ALL_LINKS[0]]
    noise = math.sqrt(error_var) * _standard_complex(
        rng, (len(ALL_LINKS),) + ref.shape
    )
    shrink = 1.0 / (1.0 + error_var)
    estimated = {}
    residual = {}
    for i, link in enumerate(ALL_LINKS):
        h = channels.matrices[link]
        h_est = h + noise[i]
        estimated[link] = h_est
        residual[link] = h - shrink * h_est
    return MismatchedChannels(estimated, residual, error_var)


def draw_mismatched_batch(
    topology: Topology,
    error_var: float,
    master_seed: int,
    trial_indices: Iterable[int],
    *,
    cond_links: tuple = (),
    cond_limit: float = 1e8,
    max_attempts: int = 100,
) -> tuple[ChannelSet, MismatchedChannels, int]:
    """Draw one realization per trial index, stacked along a leading axis.

    Per trial this consumes the same draws in the same order as
    ``draw_channel_set`` followed by ``apply_mismatch`` on ``trial_rng(seed,
    t)``, so batched and single-trial paths agree bit for bit.

    Trials whose estimated matrices in ``cond_links`` exceed ``cond_limit`` in
    2-norm condition number are redrawn from their own substream (the whole
    realization is replaced, never skipped, so trial counts are preserved).
    More than ``max_attempts`` consecutive rejections raise RuntimeError.

    Returns (true channels, mismatched view, number of redraws performed).
    """
    if error_var < 0:
        raise ValueError(f"error variance must be nonnegative, got {error_var}")
    indices = [int(t) for t in trial_indices]
    n = topology.antennas
    n_links = len(ALL_LINKS)
    h = np.empty((len(indices), n_links, n, n), dtype=np.complex128)
    e = np.empty_like(h)
    for row, t in enumerate(indices):
        rng = trial_rng(master_seed, t)
        h[row] = _standard_complex(rng, (n_links, n, n))
        e[row] = _standard_complex(rng, (n_links, n, n))

    scale = math.sqrt(error_var)
    resamples = 0
    if cond_links:
        check = [_LINK_INDEX[link] for link in cond_links]
        with np.errstate(divide="ignore", invalid="ignore"):
            conds = np.linalg.cond(h[:, check] + scale * e[:, check])
        bad_rows = np.nonzero(np.any(~(conds <= cond_limit), axis=-1))[0]
        for row in bad_rows:
            rng = trial_rng(master_seed, indices[row])
            # replay the two draws the rejected realization consumed
            _standard_complex(rng, (n_links, n, n))
            _standard_complex(rng, (n_links, n, n))
            for _ in range(max_attempts):
                h_try = _standard_complex(rng, (n_links, n, n))
                e_try = _standard_complex(rng, (n_links, n, n))
                resamples += 1
                with np.errstate(divide="ignore", invalid="ignore"):
                    conds = np.linalg.cond(h_try[check] + scale * e_try[check])
                if np.all(conds <= cond_limit):
                    h[row] = h_try
                    e[row] = e_try
                    break
            else:
                raise RuntimeError(
                    f"trial {indices[row]}: {max_attempts} consecutive redraws were "
                    f"ill-conditioned (condition number > {cond_limit:g}); "
                    "the scenario is numerically hopeless"
                )

    h_est = h + scale * e
    shrink = 1.0 / (1.0 + error_var)
    resid = h - shrink * h_est
    channels = ChannelSet({link: h[:, i] for i, link in enumerate(ALL_LINKS)})
    mismatched = MismatchedChannels(
        {link: h_est[:, i] for i, link in enumerate(ALL_LINKS)},
        {link: resid[:, i] for i, link in enumerate(ALL_LINKS)},
        error_var,
    )
    return channels, mismatched, resamples
