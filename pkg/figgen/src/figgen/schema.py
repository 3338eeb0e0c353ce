"""Schema-1 CSV reading and validation.

The column lists are the interface contract with the simulator CLI; they are
restated here on purpose so this package never imports the simulator.
"""

import csv

SWEEP_COLUMNS = (
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

# one-row output of the fraction optimizer
STAR_COLUMNS = (
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

_TEXT_FIELDS = frozenset({"protocol"})


class SchemaError(ValueError):
    """Input file does not conform to CSV schema 1."""


def _parse_row(path, line_no, header, raw):
    row = {}
    for name in header:
        value = raw.get(name)
        if value is None:
            raise SchemaError(f"{path}: row {line_no} is missing a value for '{name}'")
        value = value.strip()
        if name in _TEXT_FIELDS:
            row[name] = value
            continue
        if value == "":
            row[name] = None
            continue
        try:
            row[name] = float(value)
        except ValueError:
            raise SchemaError(
                f"{path}: row {line_no}, column '{name}': not a number: {value!r}"
            ) from None
    return row


def read_table(path):
    """Read a schema-1 file, returning ("sweep" | "star", rows).

    Rows are dicts keyed by column name, numeric fields parsed to float
    (None where the cell is empty). Raises SchemaError on any violation,
    always naming the offending column or row.
    """
    with open(path, encoding="utf-8", newline="") as fh:
        lines = [line for line in fh if not line.startswith("#")]
    reader = csv.DictReader(lines)
    header = tuple(reader.fieldnames or ())
    for kind, expected in (("sweep", SWEEP_COLUMNS), ("star", STAR_COLUMNS)):
        if header == expected:
            rows = [
                _parse_row(path, i, expected, raw) for i, raw in enumerate(reader, 2)
            ]
            if not rows:
                raise SchemaError(f"{path}: no data rows")
            return kind, rows
    for name in SWEEP_COLUMNS:
        if name not in header:
            raise SchemaError(f"{path}: missing required column '{name}'")
    raise SchemaError(f"{path}: unrecognized column order {header!r}")
