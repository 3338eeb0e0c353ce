#!/usr/bin/env python3
"""Capacity vs SNR for both protocols under four CSI qualities.

Writes one CSV per (protocol, scenario) under results/, eight files total.
Fractions are held at the conventional operating points (alpha 0.19, rho 0.75)
so the curves isolate the effect of estimation error.
"""

import argparse
import pathlib
import time

from ia_swipt.channel import CsiScenario
from ia_swipt.cli import write_csv
from ia_swipt.sweep import SweepSpec, sweep

SCENARIOS = {
    "perfect": CsiScenario.perfect(),
    "k1.5_p15": CsiScenario.mismatch(1.5, 15.0),
    "k1_p10": CsiScenario.mismatch(1.0, 10.0),
    "k0_p0.001": CsiScenario.mismatch(0.0, 0.001),
}
FRACTIONS = {"tsr": 0.19, "psr": 0.75}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out-dir", type=pathlib.Path, default=pathlib.Path("results"))
    args = ap.parse_args()

    args.out_dir.mkdir(parents=True, exist_ok=True)
    snr_grid = tuple(float(s) for s in range(0, 32, 2))
    for protocol, fraction in FRACTIONS.items():
        for name, scenario in SCENARIOS.items():
            spec = SweepSpec(
                protocol, snr_grid, (fraction,), scenario, args.trials, args.seed
            )
            started = time.perf_counter()
            rows = sweep(spec)
            out = args.out_dir / f"snr_{protocol}_{name}.csv"
            write_csv(rows, out)
            print(f"{out}  ({len(rows)} rows, {time.perf_counter() - started:.1f}s)")


if __name__ == "__main__":
    main()
