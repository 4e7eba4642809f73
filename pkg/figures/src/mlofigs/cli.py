"""Command line front end: render_figs --in DIR --kind KIND --out DIR."""

from __future__ import annotations

import argparse
import sys

from mlofigs.plots import render_dir
from mlofigs.schema import SchemaError

KINDS = ("capacity", "min-mcs", "link-split", "trace")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="render_figs",
        description="Render PNG figures from simulator sweep CSVs.",
    )
    parser.add_argument("--in", dest="in_dir", required=True,
                        help="directory holding the input CSVs")
    parser.add_argument("--kind", required=True, choices=KINDS,
                        help="which family of figures to render")
    parser.add_argument("--out", dest="out_dir", required=True,
                        help="directory for the PNG output")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        written = render_dir(args.in_dir, args.kind, args.out_dir)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except AssertionError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 3
    if not written:
        print(f"error: no {args.kind} CSVs found in {args.in_dir}",
              file=sys.stderr)
        return 2
    for path in written:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
