#!/usr/bin/env python3
"""Capacity vs harvesting fraction at a fixed SNR.

One CSV per (protocol, scenario): destination capacity across the coarse
fraction grid, the raw material for picking alpha* and rho* by eye.
"""

import argparse
import pathlib

from ia_swipt.channel import CsiScenario
from ia_swipt.cli import write_csv
from ia_swipt.sweep import COARSE_FRACTIONS, SweepSpec, sweep

SCENARIOS = {
    "perfect": CsiScenario.perfect(),
    "k1.5_p15": CsiScenario.mismatch(1.5, 15.0),
    "k1_p10": CsiScenario.mismatch(1.0, 10.0),
    "k0_p0.001": CsiScenario.mismatch(0.0, 0.001),
}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--snr-db", type=float, default=20.0)
    ap.add_argument("--trials", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out-dir", type=pathlib.Path, default=pathlib.Path("results"))
    args = ap.parse_args()

    args.out_dir.mkdir(parents=True, exist_ok=True)
    for protocol in ("tsr", "psr"):
        for name, scenario in SCENARIOS.items():
            spec = SweepSpec(
                protocol,
                (args.snr_db,),
                COARSE_FRACTIONS,
                scenario,
                args.trials,
                args.seed,
            )
            rows = sweep(spec)
            out = args.out_dir / f"fraction_{protocol}_{name}.csv"
            write_csv(rows, out)
            print(f"{out}  ({len(rows)} rows)")


if __name__ == "__main__":
    main()
