"""`make-figure <recipe-id> [--data-dir DIR] [--out PATH]` entry point.

Exit codes: 0 rendered, 2 bad arguments or unreadable/ragged input.
"""
from __future__ import annotations

import argparse
import sys

from .readers import MissingInput, RaggedCsv
from .recipes import RECIPES, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="make-figure", description=__doc__)
    parser.add_argument("recipe", choices=sorted(RECIPES), help="figure to render")
    parser.add_argument("--data-dir", default=".", help="directory with the input CSVs (default .)")
    parser.add_argument("--out", default=None, help="output image path (default <recipe>.png)")
    return parser


def parse_and_dispatch(argv) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    recipe = RECIPES[args.recipe]
    out = args.out or f"{args.recipe}.png"
    try:
        render(recipe, args.data_dir, out)
    except (MissingInput, RaggedCsv) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {out}")
    return 0


def main() -> None:
    sys.exit(parse_and_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
