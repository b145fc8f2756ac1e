"""`starkqfi-plot --figure <id> --data <dir> --out <dir>`"""
from __future__ import annotations

import argparse
import sys

from .data import MissingColumnError, MissingInputError
from .figures import RENDERERS, render


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="starkqfi-plot",
        description="Render reference figure panels from starkqfi CSV output",
    )
    parser.add_argument("--figure", required=True,
                        help=f"figure id ({', '.join(sorted(RENDERERS))}, or 'all')")
    parser.add_argument("--data", required=True, help="directory holding the CSVs")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--format", default="svg", choices=("svg", "png"),
                        help="output format (default svg)")
    args = parser.parse_args(argv)

    figure_ids = sorted(RENDERERS) if args.figure == "all" else [args.figure]
    try:
        for figure_id in figure_ids:
            print(render(figure_id, args.data, args.out, args.format))
    except (MissingInputError, MissingColumnError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
