"""Deterministic capacity figures from ia-swipt sweep CSVs.

Consumes schema-1 sweep files (and the one-row optimizer files) purely as
data; no dependency on the simulator package itself.
"""

from figgen.schema import STAR_COLUMNS, SWEEP_COLUMNS, SchemaError, read_table
from figgen.plot import Series, build_series, render_figure

__all__ = [
    "STAR_COLUMNS",
    "SWEEP_COLUMNS",
    "SchemaError",
    "Series",
    "build_series",
    "read_table",
    "render_figure",
]
