"""Series assembly and deterministic rendering."""

import dataclasses
import os
import pathlib
import tempfile

import matplotlib

matplotlib.use("Agg", force=True)

import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

from figgen.schema import SchemaError  # noqa: E402

_NODE_FIELDS = {
    "d": ("c_d_mean", "c_d_stderr"),
    "p1": ("c_p1_mean", "c_p1_stderr"),
    "p2": ("c_p2_mean", "c_p2_stderr"),
}


@dataclasses.dataclass(frozen=True)
class Series:
    label: str
    xs: tuple
    ys: tuple
    errs: tuple


def _csi_text(row):
    if row["kappa"] is None:
        return "perfect"
    return f"kappa={row['kappa']:g} psi={row['psi']:g}"


def _x_field(mode, rows, path):
    if mode == "snr":
        return "snr_db"
    first = rows[0]
    for field in ("alpha", "rho"):
        if first[field] is not None:
            return field
    raise SchemaError(f"{path}: neither fraction column is populated")


def build_series(path, rows, mode, nodes, template):
    """Turn one sweep table into one Series per requested node."""
    x_field = _x_field(mode, rows, path)
    xs = [row[x_field] for row in rows]
    if any(x is None for x in xs):
        raise SchemaError(f"{path}: empty cells in x column '{x_field}'")
    if len(set(xs)) < 2:
        raise SchemaError(
            f"{path}: x column '{x_field}' needs at least 2 distinct values"
        )
    order = sorted(range(len(xs)), key=xs.__getitem__)
    first = rows[0]
    out = []
    for node in nodes:
        mean_field, err_field = _NODE_FIELDS[node]
        label = template.format(
            protocol=first["protocol"],
            csi=_csi_text(first),
            node=node,
            stem=pathlib.Path(path).stem,
        )
        out.append(
            Series(
                label=label,
                xs=tuple(xs[i] for i in order),
                ys=tuple(rows[i][mean_field] for i in order),
                errs=tuple(rows[i][err_field] for i in order),
            )
        )
    return out


def marker_positions(star_rows):
    """x* values from optimizer rows (whichever fraction column is set)."""
    positions = []
    for row in star_rows:
        x = row["alpha_star"] if row["alpha_star"] is not None else row["rho_star"]
        if x is not None:
            positions.append(x)
    return positions


def render_figure(series, markers, x_label, out_path):
    """Render series with 2-stderr bands to SVG (or PNG by extension).

    Output is a pure function of the inputs: fixed figure geometry, salted
    svg ids, no embedded dates. The file appears atomically.
    """
    plt.rcParams["svg.hashsalt"] = "figgen"
    fig, ax = plt.subplots(figsize=(6.4, 4.2), dpi=100)
    try:
        for i, s in enumerate(series):
            lo = [y - 2 * e for y, e in zip(s.ys, s.errs)]
            hi = [y + 2 * e for y, e in zip(s.ys, s.errs)]
            ax.fill_between(s.xs, lo, hi, alpha=0.18, linewidth=0, gid=f"band-{i}")
            ax.plot(s.xs, s.ys, linewidth=1.6, label=s.label, gid=f"series-{i}")
        for x in markers:
            ax.axvline(
                x, linestyle="--", linewidth=1.0, color="0.35", gid="optimum-marker"
            )
        ax.set_xlabel(x_label)
        ax.set_ylabel("capacity (bit/s/Hz)")
        ax.grid(True, alpha=0.3)
        if series:
            ax.legend(loc="best", fontsize=9)

        out = pathlib.Path(out_path)
        fmt = "png" if out.suffix.lower() == ".png" else "svg"
        fd, tmp = tempfile.mkstemp(dir=out.parent, prefix=".figgen-", suffix=".tmp")
        os.close(fd)
        try:
            fig.savefig(tmp, format=fmt, metadata={"Date": None} if fmt == "svg" else None)
            os.replace(tmp, out)
        except BaseException:
            os.unlink(tmp)
            raise
    finally:
        plt.close(fig)
