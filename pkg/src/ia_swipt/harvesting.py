"""Energy harvesting protocols and post-combining SINR evaluation.

The relay has no battery: it powers its second-period transmission entirely
from the RF energy collected in the first period. Two schedules are supported:

* TSR: a fraction ``alpha`` of the block is dedicated to harvesting, the rest
  is split between the two hops, so relay power is 2*alpha*eta/(1-alpha) times
  the harvested input sum.
* PSR: the relay splits received power, a fraction ``rho`` into the harvester
  and 1-rho into the decoder, so relay power is eta*rho times the input sum.

Harvesting always integrates the *true* received power (the rectifier does not
care about estimation quality), while decoding SINRs see the estimated
channels plus residual-error self-interference. With error variance lam, a
desired term carries 1/(1+lam)^2 (MMSE-scaled estimate used for detection) and
each residual term carries the full unscaled residual power; under perfect CSI
every residual term is exactly zero and denominators collapse to the noise
power. Per the adopted PSR model, (1-rho) scales the signal and all channel
interference terms of the relay SINR, the noise term stays unscaled.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ia_swipt.beamforming import BeamformerSet, PeriodBeamformers
from ia_swipt.channel import ChannelSet, MismatchedChannels, Topology

__all__ = [
    "PowerConfig",
    "ProtocolParams",
    "SinrReport",
    "combined_gain",
    "evaluate_sinrs",
    "harvested_sum",
    "received_gain",
    "relay_power",
    "relay_power_psr",
    "relay_power_tsr",
    "sinr_destination",
    "sinr_primary",
    "sinr_relay",
]


@dataclass(frozen=True)
class PowerConfig:
    """Transmit powers and receiver noise power, all in linear units."""

    p1: float
    p2: float
    ps: float
    noise_power: float = 1.0

    def __post_init__(self):
        for name in ("p1", "p2", "ps", "noise_power"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")

    @property
    def theta(self) -> float:
        """Nominal transmit SNR ps/noise_power (linear)."""
        return self.ps / self.noise_power

    @property
    def snr_db(self) -> float:
        return float(10.0 * np.log10(self.theta))

    @classmethod
    def from_snr_db(cls, snr_db: float, noise_power: float = 1.0) -> "PowerConfig":
        """Equal transmit powers at the given nominal SNR."""
        p = noise_power * 10.0 ** (snr_db / 10.0)
        return cls(p1=p, p2=p, ps=p, noise_power=noise_power)


@dataclass(frozen=True)
class ProtocolParams:
    """Harvesting protocol selection and its fraction.

    ``kind`` is "tsr" or "psr"; exactly the matching fraction must be set and
    must lie strictly inside (0, 1). Boundary values are rejected because they
    correspond to no harvesting or no transmission, where relay power or the
    decode SINR degenerates.
    """

    kind: str
    eta: float = 0.8
    alpha: float | None = None
    rho: float | None = None

    def __post_init__(self):
        if self.kind not in ("tsr", "psr"):
            raise ValueError(f"kind must be 'tsr' or 'psr', got {self.kind!r}")
        if not 0 < self.eta <= 1:
            raise ValueError(f"eta must be in (0, 1], got {self.eta}")
        if self.kind == "tsr":
            if self.alpha is None or self.rho is not None:
                raise ValueError("tsr takes alpha (and no rho)")
            if not 0 < self.alpha < 1:
                raise ValueError(f"alpha must be strictly inside (0, 1), got {self.alpha}")
        else:
            if self.rho is None or self.alpha is not None:
                raise ValueError("psr takes rho (and no alpha)")
            if not 0 < self.rho < 1:
                raise ValueError(f"rho must be strictly inside (0, 1), got {self.rho}")

    @property
    def fraction(self) -> float:
        return self.alpha if self.kind == "tsr" else self.rho

    @classmethod
    def tsr(cls, alpha: float, eta: float = 0.8) -> "ProtocolParams":
        return cls("tsr", eta=eta, alpha=alpha)

    @classmethod
    def psr(cls, rho: float, eta: float = 0.8) -> "ProtocolParams":
        return cls("psr", eta=eta, rho=rho)


@dataclass
class SinrReport:
    """Post-combining SINRs of one (possibly batched) realization.

    ``primary[..., j, k]`` is the SINR of primary receiver j+1 in period k+1.
    """

    relay: np.ndarray
    destination: np.ndarray
    primary: np.ndarray
    relay_power: np.ndarray


def combined_gain(u: np.ndarray, h: np.ndarray, v: np.ndarray) -> np.ndarray:
    """||U^H H V||_F^2, broadcasting over leading axes."""
    return np.sum(np.abs(np.conj(np.swapaxes(u, -1, -2)) @ h @ v) ** 2, axis=(-2, -1))


def received_gain(h: np.ndarray, v: np.ndarray) -> np.ndarray:
    """||H V||_F^2, broadcasting over leading axes."""
    return np.sum(np.abs(h @ v) ** 2, axis=(-2, -1))


def harvested_sum(
    channels: ChannelSet,
    tp1: PeriodBeamformers,
    powers: PowerConfig,
    topology: Topology,
) -> np.ndarray:
    """Total first-period RF input power at the relay (true channels).

    All three incident signals contribute; alignment hides the primary
    signals from the decoder, not from the rectifier.
    """
    m = channels.matrices
    v = tp1.precoders
    return (
        powers.ps * topology.gain(("R", "S")) * received_gain(m[("R", "S")], v["S"])
        + powers.p1 * topology.gain(("R", "1")) * received_gain(m[("R", "1")], v["1"])
        + powers.p2 * topology.gain(("R", "2")) * received_gain(m[("R", "2")], v["2"])
    )


def relay_power_tsr(alpha: float, eta: float, harvested) -> np.ndarray:
    """Relay transmit power under TSR: 2*alpha*eta/(1-alpha) * input sum.

    The harvested energy eta*alpha*T*S is spent over the (1-alpha)*T/2
    transmit phase.
    """
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must be strictly inside (0, 1), got {alpha}")
    if not 0 < eta <= 1:
        raise ValueError(f"eta must be in (0, 1], got {eta}")
    return (2.0 * alpha * eta / (1.0 - alpha)) * np.asarray(harvested)


def relay_power_psr(rho: float, eta: float, harvested) -> np.ndarray:
    """Relay transmit power under PSR: eta*rho * input sum.

    The harvested energy eta*rho*S*T/2 is spent over the T/2 transmit phase.
    """
    if not 0 < rho < 1:
        raise ValueError(f"rho must be strictly inside (0, 1), got {rho}")
    if not 0 < eta <= 1:
        raise ValueError(f"eta must be in (0, 1], got {eta}")
    return (eta * rho) * np.asarray(harvested)


def relay_power(params: ProtocolParams, harvested) -> np.ndarray:
    if params.kind == "tsr":
        return relay_power_tsr(params.alpha, params.eta, harvested)
    return relay_power_psr(params.rho, params.eta, harvested)


def sinr_relay(
    params: ProtocolParams,
    mismatched: MismatchedChannels,
    tp1: PeriodBeamformers,
    powers: PowerConfig,
    topology: Topology,
) -> np.ndarray:
    """Decode SINR of the source stream at the relay."""
    lam = mismatched.error_variance
    est = mismatched.estimated
    resid = mismatched.residual
    u = tp1.combiners["R"]
    g_rs = topology.gain(("R", "S"))

    signal = (
        powers.ps * g_rs / (1.0 + lam) ** 2 * combined_gain(u, est[("R", "S")], tp1.precoders["S"])
    )
    self_leak = powers.ps * g_rs * combined_gain(u, resid[("R", "S")], tp1.precoders["S"])
    primary_noise = powers.p1 * topology.gain(("R", "1")) * combined_gain(
        u, resid[("R", "1")], tp1.precoders["1"]
    ) + powers.p2 * topology.gain(("R", "2")) * combined_gain(
        u, resid[("R", "2")], tp1.precoders["2"]
    )
    if params.kind == "psr":
        keep = 1.0 - params.rho
        signal = keep * signal
        self_leak = keep * self_leak
        primary_noise = keep * primary_noise
    return signal / (self_leak + primary_noise + powers.noise_power)


def sinr_destination(
    relay_pw,
    mismatched: MismatchedChannels,
    relay_precoder: np.ndarray,
    powers: PowerConfig,
    topology: Topology,
) -> np.ndarray:
    """Decode SNR at the destination (no combiner, no co-channel term)."""
    relay_pw = np.asarray(relay_pw)
    if np.any(relay_pw < 0):
        raise ValueError("relay power must be nonnegative")
    lam = mismatched.error_variance
    g_dr = topology.gain(("D", "R"))
    signal = (
        relay_pw * g_dr / (1.0 + lam) ** 2
        * received_gain(mismatched.estimated[("D", "R")], relay_precoder)
    )
    self_leak = relay_pw * g_dr * received_gain(
        mismatched.residual[("D", "R")], relay_precoder
    )
    return signal / (self_leak + powers.noise_power)


def sinr_primary(
    receiver: str,
    period: int,
    mismatched: MismatchedChannels,
    period_bf: PeriodBeamformers,
    powers: PowerConfig,
    topology: Topology,
    relay_pw=None,
) -> np.ndarray:
    """Decode SINR of primary receiver "1" or "2" in transmission period 1 or 2.

    Under imperfect CSI, residual leakage from the cross primary link and from
    the secondary transmitter of the period (source in period 1, relay in
    period 2) survives in the denominator; ``relay_pw`` is required for
    period 2.
    """
    if receiver not in ("1", "2"):
        raise ValueError(f"receiver must be '1' or '2', got {receiver!r}")
    if period not in (1, 2):
        raise ValueError(f"period must be 1 or 2, got {period}")
    if period == 2 and relay_pw is None:
        raise ValueError("period 2 needs the relay transmit power")

    other = "2" if receiver == "1" else "1"
    lam = mismatched.error_variance
    est = mismatched.estimated
    resid = mismatched.residual
    u = period_bf.combiners[receiver]
    own_link = (receiver, receiver, period)
    cross_link = (receiver, other, period)
    p_own = powers.p1 if receiver == "1" else powers.p2
    p_other = powers.p2 if receiver == "1" else powers.p1

    signal = (
        p_own * topology.gain(own_link) / (1.0 + lam) ** 2
        * combined_gain(u, est[own_link], period_bf.precoders[receiver])
    )
    residual_leak = p_own * topology.gain(own_link) * combined_gain(
        u, resid[own_link], period_bf.precoders[receiver]
    ) + p_other * topology.gain(cross_link) * combined_gain(
        u, resid[cross_link], period_bf.precoders[other]
    )
    if period == 1:
        sec_link = (receiver, "S")
        secondary_leak = powers.ps * topology.gain(sec_link) * combined_gain(
            u, resid[sec_link], period_bf.precoders["S"]
        )
    else:
        sec_link = (receiver, "R")
        secondary_leak = np.asarray(relay_pw) * topology.gain(sec_link) * combined_gain(
            u, resid[sec_link], period_bf.precoders["R"]
        )
    return signal / (residual_leak + secondary_leak + powers.noise_power)


def evaluate_sinrs(
    params: ProtocolParams,
    channels: ChannelSet,
    mismatched: MismatchedChannels,
    beamformers: BeamformerSet,
    powers: PowerConfig,
    topology: Topology,
) -> SinrReport:
    """Harvest, relay power and all decode SINRs of one (batched) realization."""
    s = harvested_sum(channels, beamformers.tp1, powers, topology)
    pr = relay_power(params, s)
    gamma_relay = sinr_relay(params, mismatched, beamformers.tp1, powers, topology)
    gamma_dest = sinr_destination(
        pr, mismatched, beamformers.tp2.precoders["R"], powers, topology
    )
    per_rx = []
    for rx in ("1", "2"):
        tp1 = sinr_primary(rx, 1, mismatched, beamformers.tp1, powers, topology)
        tp2 = sinr_primary(rx, 2, mismatched, beamformers.tp2, powers, topology, relay_pw=pr)
        per_rx.append(np.stack(np.broadcast_arrays(tp1, tp2), axis=-1))
    primary = np.stack(per_rx, axis=-2)
    return SinrReport(
        relay=gamma_relay, destination=gamma_dest, primary=primary, relay_power=pr
    )
