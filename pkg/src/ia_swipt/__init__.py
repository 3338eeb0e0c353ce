"""Monte Carlo simulator for a two-hop decode-and-forward cognitive relay network.

Two primary transceiver pairs share the spectrum with a secondary source that
reaches its destination through an energy-harvesting relay. Interference
alignment keeps the four transmissions separable at every receiver; the relay
runs on harvested RF energy under either a time-switching (TSR) or a
power-splitting (PSR) schedule. The package estimates ergodic capacities at the
destination and at both primary receivers under imperfect channel estimates,
and ships a small CLI for SNR sweeps, harvesting-fraction sweeps and fraction
optimization.
"""

from ia_swipt.beamforming import (
    BeamformerSet,
    LeakageReport,
    PeriodBeamformers,
    design_beamformers,
    design_tp1,
    design_tp2,
    direct_gain,
    leakage,
    null_space_basis,
)
from ia_swipt.capacity import (
    CapacityEstimate,
    CapacitySample,
    ErgodicResult,
    capacity_destination,
    capacity_primary,
    ergodic_capacity,
    single_trial,
)
from ia_swipt.channel import (
    ALL_LINKS,
    ChannelSet,
    CsiScenario,
    LinkGeometry,
    MismatchedChannels,
    Topology,
    apply_mismatch,
    draw_channel_set,
    error_variance,
    pathloss_gain,
    trial_rng,
)
from ia_swipt.harvesting import (
    PowerConfig,
    ProtocolParams,
    SinrReport,
    evaluate_sinrs,
    harvested_sum,
    relay_power,
    sinr_destination,
    sinr_primary,
    sinr_relay,
)
from ia_swipt.sweep import (
    OptimizeResult,
    SweepRow,
    SweepSpec,
    golden_section_max,
    optimize_fraction,
    sweep,
)

__all__ = [
    "ALL_LINKS",
    "BeamformerSet",
    "CapacityEstimate",
    "CapacitySample",
    "ChannelSet",
    "CsiScenario",
    "ErgodicResult",
    "LeakageReport",
    "LinkGeometry",
    "MismatchedChannels",
    "OptimizeResult",
    "PeriodBeamformers",
    "PowerConfig",
    "ProtocolParams",
    "SinrReport",
    "SweepRow",
    "SweepSpec",
    "Topology",
    "apply_mismatch",
    "capacity_destination",
    "capacity_primary",
    "design_beamformers",
    "design_tp1",
    "design_tp2",
    "direct_gain",
    "draw_channel_set",
    "ergodic_capacity",
    "error_variance",
    "evaluate_sinrs",
    "golden_section_max",
    "harvested_sum",
    "leakage",
    "null_space_basis",
    "optimize_fraction",
    "pathloss_gain",
    "relay_power",
    "single_trial",
    "sinr_destination",
    "sinr_primary",
    "sinr_relay",
    "sweep",
    "trial_rng",
]
