"""Command line front end (`plots cost-trace|gain|graph`).

Mirrors the planner CLI's error convention: bad inputs produce a single
JSON object (fields `error`, `message`) on stderr and exit status 2.
"""

from __future__ import annotations

import argparse
import json
import sys

import matplotlib.pyplot as plt

from .figures import plot_cost_trace, plot_gain, plot_graph
from .io import InputFormatError, read_dump, read_gain, read_trace


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plots",
        description="render figures from planner benchmark outputs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ct = sub.add_parser("cost-trace", help="mean cost curves with std bands")
    ct.add_argument("input", help="trace.csv from `plan run`")
    ct.add_argument("output", help="image path (.png/.svg)")

    gn = sub.add_parser("gain", help="factorization gain curves")
    gn.add_argument(
        "inputs",
        nargs="+",
        help="gain CSVs from `plan gain`; LABEL=PATH labels a file, and "
        "all-numeric labels are read as dispersion bounds for the sweep panel",
    )
    gn.add_argument("output", help="image path (.png/.svg)")

    gr = sub.add_parser("graph", help="workspace snapshot of a graph dump")
    gr.add_argument("input", help="dump file from `plan dump`")
    gr.add_argument("output", help="image path (.png/.svg)")

    return parser


def _labeled(arg: str) -> tuple[str, str]:
    if "=" in arg:
        label, path = arg.split("=", 1)
        return label, path
    stem = arg.rsplit("/", 1)[-1]
    stem = stem[: stem.rfind(".")] if "." in stem else stem
    return stem, arg


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "cost-trace":
            res = plot_cost_trace(read_trace(args.input), args.output)
            print(f"wrote {args.output} ({len(res.curves)} algorithms)")
        elif args.command == "gain":
            pairs = [_labeled(a) for a in args.inputs]
            res = plot_gain([(lab, read_gain(path)) for lab, path in pairs], args.output)
            panels = "f-curves" + (", dispersion sweep" if res.sweep else "")
            print(f"wrote {args.output} ({panels})")
        else:
            res = plot_graph(read_dump(args.input), args.output)
            print(f"wrote {args.output} ({res.legend_text})")
        plt.close(res.figure)
        return 0
    except InputFormatError as e:
        json.dump({"error": type(e).__name__, "message": str(e)}, sys.stderr)
        sys.stderr.write("\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
