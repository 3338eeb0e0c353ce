"""figgen command line: capacity figures from sweep CSVs.

    figgen snr --in tsr.csv --in psr.csv --out fig.svg
    figgen fraction --in profile.csv --in star.csv --mark-optimum --out fig.svg

Optimizer (one-row) files contribute vertical markers, never curves.
Exit codes: 0 ok, 1 bad input or refused write, 2 usage.
"""

import argparse
import sys

from figgen.plot import build_series, marker_positions, render_figure
from figgen.schema import SchemaError, read_table

_X_LABELS = {"snr": "SNR (dB)", "fraction": "harvesting fraction"}
_DEFAULT_TEMPLATE = "{protocol} {csi} {node}"


def _parser():
    ap = argparse.ArgumentParser(prog="figgen", description=__doc__)
    sub = ap.add_subparsers(dest="mode", required=True)
    for mode in ("snr", "fraction"):
        p = sub.add_parser(mode, help=f"capacity vs {_X_LABELS[mode]}")
        p.add_argument(
            "--in",
            dest="inputs",
            action="append",
            required=True,
            metavar="CSV",
            help="input CSV (repeatable; series overlay in argument order)",
        )
        p.add_argument("--out", required=True, metavar="FILE")
        p.add_argument("--label-template", default=_DEFAULT_TEMPLATE)
        p.add_argument(
            "--nodes",
            default="d",
            help="comma list of receivers to plot per file: d,p1,p2 (default d)",
        )
        p.add_argument("--mark-optimum", action="store_true")
        p.add_argument("--force", action="store_true")
    return ap


def run(args) -> int:
    import os

    nodes = tuple(n.strip() for n in args.nodes.split(",") if n.strip())
    bad = [n for n in nodes if n not in ("d", "p1", "p2")]
    if bad or not nodes:
        print(f"error: unknown node(s) {','.join(bad) or '(none)'}", file=sys.stderr)
        return 1
    if os.path.exists(args.out) and not args.force:
        print(
            f"error: {args.out} exists, pass --force to overwrite", file=sys.stderr
        )
        return 1

    series = []
    star_rows = []
    try:
        for path in args.inputs:
            kind, rows = read_table(path)
            if kind == "star":
                star_rows.extend(rows)
            else:
                series.extend(
                    build_series(path, rows, args.mode, nodes, args.label_template)
                )
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if not series:
        print("error: no sweep input produced any series", file=sys.stderr)
        return 1

    markers = []
    if args.mark_optimum:
        if args.mode != "fraction":
            print("warning: --mark-optimum only applies to fraction figures; "
                  "no marker drawn", file=sys.stderr)
        elif not star_rows:
            print("warning: --mark-optimum given but no optimizer row among the "
                  "inputs; no marker drawn", file=sys.stderr)
        else:
            markers = marker_positions(star_rows)
    elif star_rows and args.mode == "fraction":
        print("warning: optimizer input ignored (pass --mark-optimum)", file=sys.stderr)

    render_figure(series, markers, _X_LABELS[args.mode], args.out)
    print(f"wrote {args.out}: {len(series)} series, {len(markers)} marker(s)")
    return 0


def main(argv=None) -> int:
    return run(_parser().parse_args(argv))


if __name__ == "__main__":
    raise SystemExit(main())
