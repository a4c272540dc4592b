"""ccplot: render sweep CSVs to figure files.

Usage: ccplot render --in a.csv [b.csv ...] --group-by m|kernel
       --out fig.png [--linear-y]
"""

from __future__ import annotations

import argparse
import sys

from .figures import FigureSpec, SchemaError, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ccplot",
                                     description="Figure rendering for sweep CSVs.")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render one figure from sweep CSVs")
    p.add_argument("--in", dest="inputs", nargs="+", required=True,
                   metavar="CSV", help="input sweep CSVs")
    p.add_argument("--group-by", choices=["m", "kernel"], default="m",
                   help="series key: measurement count or kernel provenance")
    p.add_argument("--out", required=True, help="output image path")
    p.add_argument("--linear-y", action="store_true",
                   help="linear instead of logarithmic error axis")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec(csv_paths=tuple(args.inputs), group_by=args.group_by,
                      out_path=args.out, log_y=not args.linear_y)
    try:
        result = render(spec)
    except (SchemaError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {result.out_path} ({len(result.series)} series)")
    return 0


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
