"""Command-line interface: SNR sweeps, fraction sweeps, fraction optimization.

Results land in a CSV file (schema 1) written atomically: the file either
appears complete or not at all. Exit codes: 0 success, 1 runtime failure,
2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
import tempfile
import time
from dataclasses import dataclass

from ia_swipt.channel import CsiScenario, Topology
from ia_swipt.sweep import SweepSpec, optimize_fraction, sweep

__all__ = [
    "CSV_FIELDS",
    "OPTIMUM_CSV_FIELDS",
    "ConfigError",
    "RunConfig",
    "main",
    "parse_config",
    "read_csv",
    "run",
    "write_csv",
]

CSV_FIELDS = (
    "protocol",
    "snr_db",
    "kappa",
    "psi",
    "alpha",
    "rho",
    "c_d_mean",
    "c_d_stderr",
    "c_p1_mean",
    "c_p1_stderr",
    "c_p2_mean",
    "c_p2_stderr",
    "trials",
    "seed",
)
OPTIMUM_CSV_FIELDS = (
    "protocol",
    "snr_db",
    "kappa",
    "psi",
    "alpha_star",
    "rho_star",
    "c_d_star",
    "trials",
    "seed",
)

_SCHEMA_COMMENT = "# schema=1"

_DEFAULTS = {
    "csi": "perfect",
    "eta": 0.8,
    "trials": 10000,
    "seed": 0,
    "antennas": 2,
    "streams": 1,
    "distance": 3.0,
    "pathloss_exponent": 2.7,
    "tolerance": 1e-3,
}


class ConfigError(Exception):
    """Invalid flag, config key or value combination."""


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved invocation: command plus every parameter it needs."""

    command: str
    protocol: str
    snr_db: tuple
    alpha: tuple | None
    rho: tuple | None
    scenario: CsiScenario
    eta: float
    trials: int
    seed: int
    antennas: int
    streams: int
    distance: float
    pathloss_exponent: float
    tolerance: float
    out: str

    @property
    def fractions(self) -> tuple | None:
        return self.alpha if self.protocol == "tsr" else self.rho


def _grid(text: str, name: str) -> tuple:
    """Parse "value" or "start:stop:step" (stop inclusive within 1e-9)."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return (float(parts[0]),)
        if len(parts) != 3:
            raise ValueError
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise ConfigError(
            f"{name}: expected a number or start:stop:step, got {text!r}"
        ) from None
    if step <= 0:
        raise ConfigError(f"{name}: step must be positive, got {step}")
    if stop < start:
        raise ConfigError(f"{name}: stop {stop} is below start {start}")
    count = int((stop - start) / step + 1e-9) + 1
    return tuple(round(start + k * step, 10) for k in range(count))


def _csi(text: str) -> CsiScenario:
    if text.strip() == "perfect":
        return CsiScenario.perfect()
    parts = text.split(",")
    if len(parts) != 2:
        raise ConfigError(f"csi: expected 'perfect' or 'kappa,psi', got {text!r}")
    try:
        kappa, psi = float(parts[0]), float(parts[1])
    except ValueError:
        raise ConfigError(f"csi: expected 'perfect' or 'kappa,psi', got {text!r}") from None
    try:
        return CsiScenario.mismatch(kappa, psi)
    except ValueError as err:
        raise ConfigError(f"csi: {err}") from None


def _read_config_file(path: str) -> dict:
    """Flat key=value file; '#' starts a comment; keys match flag names."""
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
                key, _, value = line.partition("=")
                values[key.strip().replace("-", "_")] = value.strip()
    except OSError as err:
        raise ConfigError(f"cannot read config file {path}: {err}") from None
    return values


_CONFIG_KEYS = {
    "protocol": str,
    "alpha": str,
    "rho": str,
    "snr_db": str,
    "csi": str,
    "eta": float,
    "trials": int,
    "seed": int,
    "antennas": int,
    "streams": int,
    "distance": float,
    "pathloss_exponent": float,
    "tolerance": float,
    "out": str,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ia-swipt",
        description="Ergodic-capacity Monte Carlo for the wireless-powered "
        "interference-aligned relay network",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("sweep-snr", "capacity across an SNR grid at one harvesting fraction"),
        ("sweep-fraction", "capacity across a fraction grid at one SNR"),
        ("optimize", "best harvesting fraction at one SNR"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--protocol", choices=("tsr", "psr"))
        p.add_argument("--alpha", help="TSR fraction: value or start:stop:step")
        p.add_argument("--rho", help="PSR fraction: value or start:stop:step")
        p.add_argument("--snr-db", dest="snr_db", help="value or start:stop:step")
        p.add_argument("--csi", help="'perfect' or 'kappa,psi'")
        p.add_argument("--eta", type=float, help="harvester efficiency")
        p.add_argument("--trials", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--antennas", type=int)
        p.add_argument("--streams", type=int)
        p.add_argument("--distance", type=float)
        p.add_argument("--pathloss-exponent", dest="pathloss_exponent", type=float)
        p.add_argument("--tolerance", type=float, help="fraction search tolerance")
        p.add_argument("--out", help="output CSV path")
        p.add_argument("--config", help="key=value config file")
    return parser


def parse_config(argv=None) -> RunConfig:
    """Resolve flags > config file > defaults into a validated RunConfig."""
    args = _build_parser().parse_args(argv)
    merged = {key: getattr(args, key) for key in _CONFIG_KEYS}

    if args.config:
        file_values = _read_config_file(args.config)
        for key, raw in file_values.items():
            if key not in _CONFIG_KEYS:
                raise ConfigError(f"unknown config key: {key}")
            if merged[key] is None:
                try:
                    merged[key] = _CONFIG_KEYS[key](raw)
                except ValueError:
                    raise ConfigError(f"config key {key}: invalid value {raw!r}") from None

    for key, default in _DEFAULTS.items():
        if merged[key] is None:
            merged[key] = default

    if merged["protocol"] is None:
        raise ConfigError("protocol is required (--protocol or config)")
    if merged["protocol"] not in ("tsr", "psr"):
        raise ConfigError(f"protocol must be 'tsr' or 'psr', got {merged['protocol']!r}")
    if merged["out"] is None:
        raise ConfigError("out is required (--out or config)")
    if merged["snr_db"] is None:
        raise ConfigError("snr_db is required (--snr-db or config)")

    protocol = merged["protocol"]
    command = args.command
    if protocol == "tsr" and merged["rho"] is not None:
        raise ConfigError("rho given for protocol tsr (use alpha)")
    if protocol == "psr" and merged["alpha"] is not None:
        raise ConfigError("alpha given for protocol psr (use rho)")

    snr_values = _grid(str(merged["snr_db"]), "snr_db")
    fraction_key = "alpha" if protocol == "tsr" else "rho"
    fraction_text = merged[fraction_key]
    fractions = None if fraction_text is None else _grid(str(fraction_text), fraction_key)

    if command == "optimize":
        if fractions is not None:
            raise ConfigError(f"{fraction_key} not allowed with optimize (it is the unknown)")
        if len(snr_values) != 1:
            raise ConfigError("optimize needs a single snr_db value")
    elif command == "sweep-snr":
        if fractions is None:
            raise ConfigError(f"{fraction_key} is required for sweep-snr")
        if len(fractions) != 1:
            raise ConfigError(f"sweep-snr needs a single {fraction_key} value")
    elif command == "sweep-fraction":
        if fractions is None:
            raise ConfigError(f"{fraction_key} is required for sweep-fraction")
        if len(snr_values) != 1:
            raise ConfigError("sweep-fraction needs a single snr_db value")

    if merged["trials"] < 1:
        raise ConfigError(f"trials must be at least 1, got {merged['trials']}")
    if merged["seed"] < 0:
        raise ConfigError(f"seed must be nonnegative, got {merged['seed']}")
    if not merged["tolerance"] > 0:
        raise ConfigError(f"tolerance must be positive, got {merged['tolerance']}")

    scenario = _csi(str(merged["csi"]))
    alpha = fractions if protocol == "tsr" else None
    rho = fractions if protocol == "psr" else None
    return RunConfig(
        command=command,
        protocol=protocol,
        snr_db=snr_values,
        alpha=alpha,
        rho=rho,
        scenario=scenario,
        eta=float(merged["eta"]),
        trials=int(merged["trials"]),
        seed=int(merged["seed"]),
        antennas=int(merged["antennas"]),
        streams=int(merged["streams"]),
        distance=float(merged["distance"]),
        pathloss_exponent=float(merged["pathloss_exponent"]),
        tolerance=float(merged["tolerance"]),
        out=str(merged["out"]),
    )


def _format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        raise TypeError("boolean CSV fields are not part of the schema")
    if isinstance(value, int):
        return str(value)
    return format(float(value), ".9g")


def _render_table(fields, rows) -> str:
    buf = io.StringIO()
    buf.write(_SCHEMA_COMMENT + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fields)
    for row in rows:
        writer.writerow([_format_value(row[field]) for field in fields])
    return buf.getvalue()


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".ia-swipt-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def write_csv(rows, path: str) -> None:
    """Write sweep rows as schema-1 CSV, atomically (tmp file + rename)."""
    dicts = [
        {field: getattr(row, field) for field in CSV_FIELDS} for row in rows
    ]
    _atomic_write(path, _render_table(CSV_FIELDS, dicts))


def read_csv(path: str):
    """Read a schema-1 CSV back into SweepRow objects."""
    from ia_swipt.sweep import SweepRow

    with open(path, encoding="utf-8", newline="") as fh:
        lines = [line for line in fh if not line.startswith("#")]
    reader = csv.DictReader(lines)
    if tuple(reader.fieldnames or ()) != CSV_FIELDS:
        raise ValueError(
            f"unexpected CSV header {reader.fieldnames}, want {list(CSV_FIELDS)}"
        )
    rows = []
    for rec in reader:
        rows.append(
            SweepRow(
                protocol=rec["protocol"],
                snr_db=float(rec["snr_db"]),
                kappa=float(rec["kappa"]) if rec["kappa"] else None,
                psi=float(rec["psi"]) if rec["psi"] else None,
                alpha=float(rec["alpha"]) if rec["alpha"] else None,
                rho=float(rec["rho"]) if rec["rho"] else None,
                c_d_mean=float(rec["c_d_mean"]),
                c_d_stderr=float(rec["c_d_stderr"]),
                c_p1_mean=float(rec["c_p1_mean"]),
                c_p1_stderr=float(rec["c_p1_stderr"]),
                c_p2_mean=float(rec["c_p2_mean"]),
                c_p2_stderr=float(rec["c_p2_stderr"]),
                trials=int(rec["trials"]),
                seed=int(rec["seed"]),
            )
        )
    return rows


def run(config: RunConfig) -> int:
    """Execute a resolved invocation; returns the process exit code."""
    started = time.perf_counter()
    try:
        topology = Topology.uniform(
            config.antennas, config.streams, config.distance, config.pathloss_exponent
        )
        stats: dict = {"resamples": 0}
        if config.command == "optimize":
            result = optimize_fraction(
                config.protocol,
                config.snr_db[0],
                config.scenario,
                config.trials,
                config.seed,
                config.tolerance,
                eta=config.eta,
                topology=topology,
            )
            record = {
                "protocol": result.protocol,
                "snr_db": result.snr_db,
                "kappa": result.kappa,
                "psi": result.psi,
                "alpha_star": result.fraction if config.protocol == "tsr" else None,
                "rho_star": result.fraction if config.protocol == "psr" else None,
                "c_d_star": result.capacity,
                "trials": result.trials,
                "seed": result.seed,
            }
            _atomic_write(config.out, _render_table(OPTIMUM_CSV_FIELDS, [record]))
            rows_written = 1
        else:
            spec = SweepSpec(
                protocol=config.protocol,
                snr_db=config.snr_db,
                fractions=config.fractions,
                scenario=config.scenario,
                trials=config.trials,
                seed=config.seed,
                eta=config.eta,
            )
            rows = sweep(spec, topology, stats=stats)
            write_csv(rows, config.out)
            rows_written = len(rows)
    except (ValueError, RuntimeError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    elapsed = time.perf_counter() - started
    print(
        f"wrote {config.out}: {rows_written} row(s) in {elapsed:.1f} s "
        f"({stats['resamples']} resampled draws)"
    )
    return 0


def main(argv=None) -> int:
    try:
        config = parse_config(argv)
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    return run(config)
