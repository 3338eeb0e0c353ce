"""Parameter sweeps and harvesting-fraction optimization.

Sweeps walk a cartesian grid (SNR-major, fractions inner) and produce one
``SweepRow`` per point; every point reuses the same master seed, so paired
comparisons across grid points ride on common random numbers.

``optimize_fraction`` maximizes the ergodic destination capacity over the
harvesting fraction with the same common-random-numbers objective: a coarse
scan on a fixed 0.05 grid locates the peak (and checks the profile is
unimodal up to Monte Carlo noise), then golden-section search refines inside
the bracketing grid cells.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from ia_swipt.capacity import ergodic_capacity
from ia_swipt.channel import CsiScenario, Topology
from ia_swipt.harvesting import PowerConfig, ProtocolParams

__all__ = [
    "COARSE_FRACTIONS",
    "OptimizeResult",
    "SweepRow",
    "SweepSpec",
    "golden_section_max",
    "is_unimodal",
    "optimize_fraction",
    "sweep",
]

COARSE_FRACTIONS: tuple = tuple(round(0.05 * i, 2) for i in range(1, 20))

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
_INV_PHI2 = (3.0 - math.sqrt(5.0)) / 2.0

# Refinement never leaves this interval even when the coarse peak sits on the
# first or last grid point; protocol fractions are only defined strictly
# inside (0, 1).
_FRACTION_LO = 0.01
_FRACTION_HI = 0.99


@dataclass(frozen=True)
class SweepSpec:
    """One sweep request: a protocol, an SNR grid and a fraction grid."""

    protocol: str
    snr_db: tuple
    fractions: tuple
    scenario: CsiScenario
    trials: int
    seed: int
    eta: float = 0.8

    def __post_init__(self):
        if self.protocol not in ("tsr", "psr"):
            raise ValueError(f"protocol must be 'tsr' or 'psr', got {self.protocol!r}")
        if len(self.snr_db) == 0:
            raise ValueError("snr_db grid is empty")
        if len(self.fractions) == 0:
            raise ValueError("fraction grid is empty")
        for x in self.fractions:
            if not 0 < x < 1:
                raise ValueError(f"fractions must be strictly inside (0, 1), got {x}")
        if self.trials < 1:
            raise ValueError(f"trials must be at least 1, got {self.trials}")
        if self.seed < 0:
            raise ValueError(f"seed must be nonnegative, got {self.seed}")


@dataclass(frozen=True)
class SweepRow:
    """One grid point of a sweep; field order matches the CSV schema."""

    protocol: str
    snr_db: float
    kappa: float | None
    psi: float | None
    alpha: float | None
    rho: float | None
    c_d_mean: float
    c_d_stderr: float
    c_p1_mean: float
    c_p1_stderr: float
    c_p2_mean: float
    c_p2_stderr: float
    trials: int
    seed: int


def _protocol_params(protocol: str, fraction: float, eta: float) -> ProtocolParams:
    if protocol == "tsr":
        return ProtocolParams.tsr(fraction, eta=eta)
    return ProtocolParams.psr(fraction, eta=eta)


def sweep(
    spec: SweepSpec,
    topology: Topology | None = None,
    max_workers: int | None = None,
    stats: dict | None = None,
) -> list:
    """Run every grid point and return rows in deterministic grid order.

    If ``stats`` is given, its "resamples" entry accumulates the total number
    of ill-conditioned redraws across the sweep.
    """
    topology = topology if topology is not None else Topology.uniform()
    rows = []
    for snr in spec.snr_db:
        powers = PowerConfig.from_snr_db(snr)
        for fraction in spec.fractions:
            params = _protocol_params(spec.protocol, fraction, spec.eta)
            result = ergodic_capacity(
                topology,
                powers,
                spec.scenario,
                params,
                spec.trials,
                spec.seed,
                max_workers=max_workers,
            )
            if stats is not None:
                stats["resamples"] = stats.get("resamples", 0) + result.resamples
            rows.append(
                SweepRow(
                    protocol=spec.protocol,
                    snr_db=float(snr),
                    kappa=spec.scenario.kappa,
                    psi=spec.scenario.psi,
                    alpha=fraction if spec.protocol == "tsr" else None,
                    rho=fraction if spec.protocol == "psr" else None,
                    c_d_mean=result.destination.mean,
                    c_d_stderr=result.destination.stderr,
                    c_p1_mean=result.primary[0].mean,
                    c_p1_stderr=result.primary[0].stderr,
                    c_p2_mean=result.primary[1].mean,
                    c_p2_stderr=result.primary[1].stderr,
                    trials=spec.trials,
                    seed=spec.seed,
                )
            )
    return rows


def golden_section_max(f, lo: float, hi: float, tolerance: float):
    """Maximize a unimodal scalar function on [lo, hi] by golden-section search.

    Returns (x_best, f(x_best), iterations) where x_best is the best probed
    point once the bracket width is at most ``tolerance``. The iteration count
    is bounded by ceil(log(tolerance/(hi-lo)) / log(1/phi)).
    """
    if not tolerance > 0:
        raise ValueError(f"tolerance must be positive, got {tolerance}")
    if not hi > lo:
        raise ValueError(f"need hi > lo, got [{lo}, {hi}]")
    width = hi - lo
    if width <= tolerance:
        mid = 0.5 * (lo + hi)
        return mid, f(mid), 0
    max_steps = math.ceil(math.log(tolerance / width) / math.log(_INV_PHI))

    c = lo + _INV_PHI2 * width
    d = lo + _INV_PHI * width
    fc = f(c)
    fd = f(d)
    iterations = 0
    while (hi - lo) > tolerance and iterations < max_steps:
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = lo + _INV_PHI2 * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _INV_PHI * (hi - lo)
            fd = f(d)
        iterations += 1
    if fc >= fd:
        return c, fc, iterations
    return d, fd, iterations


def is_unimodal(values, stderrs=None, slack: float = 2.0) -> bool:
    """Whether a profile rises to its peak then falls, up to sampling noise.

    Neighboring points may violate monotonicity by at most ``slack`` combined
    standard errors.
    """
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or v.size < 1:
        raise ValueError("values must be a nonempty 1-D sequence")
    e = np.zeros_like(v) if stderrs is None else np.asarray(stderrs, dtype=float)
    peak = int(np.argmax(v))
    steps = np.diff(v)
    allowance = slack * np.hypot(e[:-1], e[1:])
    rising_ok = np.all(steps[:peak] >= -allowance[:peak])
    falling_ok = np.all(steps[peak:] <= allowance[peak:])
    return bool(rising_ok and falling_ok)


@dataclass(frozen=True)
class OptimizeResult:
    """Outcome of a fraction optimization at one operating point."""

    protocol: str
    snr_db: float
    kappa: float | None
    psi: float | None
    fraction: float
    capacity: float
    iterations: int
    coarse_fractions: tuple
    coarse_means: tuple
    coarse_stderrs: tuple
    unimodal: bool
    trials: int
    seed: int


def optimize_fraction(
    protocol: str,
    snr_db: float,
    scenario: CsiScenario,
    trials: int,
    seed: int,
    tolerance: float = 1e-3,
    *,
    eta: float = 0.8,
    topology: Topology | None = None,
    max_workers: int | None = None,
    objective=None,
) -> OptimizeResult:
    """Best harvesting fraction for the destination's ergodic capacity.

    The objective is evaluated with common random numbers (same seed at every
    fraction), so the comparison across fractions is paired and the refinement
    is meaningful below the Monte Carlo noise floor. A non-unimodal coarse
    profile (beyond 2 combined standard errors) emits a RuntimeWarning and the
    search still refines around the global coarse maximum.

    ``objective`` replaces the built-in simulation objective when given (it
    maps a fraction to the value to maximize); stderr-based slack is then
    unavailable and the unimodality check runs on raw values.
    """
    if protocol not in ("tsr", "psr"):
        raise ValueError(f"protocol must be 'tsr' or 'psr', got {protocol!r}")
    if not tolerance > 0:
        raise ValueError(f"tolerance must be positive, got {tolerance}")

    stderr_by_fraction: dict = {}
    if objective is None:
        topology = topology if topology is not None else Topology.uniform()
        powers = PowerConfig.from_snr_db(snr_db)
        cache: dict = {}

        def objective(fraction: float) -> float:
            key = round(float(fraction), 12)
            if key not in cache:
                result = ergodic_capacity(
                    topology,
                    powers,
                    scenario,
                    _protocol_params(protocol, key, eta),
                    trials,
                    seed,
                    max_workers=max_workers,
                )
                cache[key] = result.destination.mean
                stderr_by_fraction[key] = result.destination.stderr
            return cache[key]

    coarse_means = [objective(x) for x in COARSE_FRACTIONS]
    coarse_stderrs = [stderr_by_fraction.get(x, 0.0) for x in COARSE_FRACTIONS]
    unimodal = is_unimodal(coarse_means, coarse_stderrs)
    if not unimodal:
        warnings.warn(
            "coarse capacity profile is not unimodal beyond sampling noise; "
            "refining around the global maximum anyway",
            RuntimeWarning,
        )

    peak = int(np.argmax(coarse_means))
    lo = COARSE_FRACTIONS[peak - 1] if peak > 0 else _FRACTION_LO
    hi = COARSE_FRACTIONS[peak + 1] if peak < len(COARSE_FRACTIONS) - 1 else _FRACTION_HI
    best_x, best_f, iterations = golden_section_max(objective, lo, hi, tolerance)
    # golden-section probes are interior; keep the coarse peak if it was better
    if coarse_means[peak] > best_f:
        best_x, best_f = COARSE_FRACTIONS[peak], coarse_means[peak]

    return OptimizeResult(
        protocol=protocol,
        snr_db=float(snr_db),
        kappa=scenario.kappa,
        psi=scenario.psi,
        fraction=float(best_x),
        capacity=float(best_f),
        iterations=iterations,
        coarse_fractions=COARSE_FRACTIONS,
        coarse_means=tuple(coarse_means),
        coarse_stderrs=tuple(coarse_stderrs),
        unimodal=unimodal,
        trials=trials,
        seed=seed,
    )
