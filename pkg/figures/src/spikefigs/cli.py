"""Command-line renderer: one recipe per invocation.

Usage:
    spikefigs KIND INPUT.csv OUTPUT.png [--title T] [--xlabel X]
              [--ylabel Y] [--field u] [--quantity D_nuc] [--figure-id ID]

Exit codes: 0 success, 1 bad arguments, 2 schema mismatch or unreadable
input (the offending columns are printed to stderr).
"""

from __future__ import annotations

import argparse
import sys

from .recipes import KINDS, FigureRecipe, default_role, render
from .schema import SchemaMismatch


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="spikefigs",
        description="Render a figure from spikelab CSV artifacts.",
    )
    ap.add_argument("kind", choices=sorted(KINDS))
    ap.add_argument("input", help="CSV artifact path")
    ap.add_argument("output", help="PNG output path")
    ap.add_argument("--figure-id", default=None)
    ap.add_argument("--title", default="")
    ap.add_argument("--xlabel", default="")
    ap.add_argument("--ylabel", default="")
    ap.add_argument("--field", default="u",
                    help="heatmap field: u, v or w")
    ap.add_argument("--quantity", default=None,
                    help="threshold plots: quantity name in the sweep summary")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    options = {}
    if args.kind == "heatmap":
        options["field"] = args.field
    if args.kind == "threshold":
        if not args.quantity:
            print("threshold plots need --quantity", file=sys.stderr)
            return 1
        options["quantity"] = args.quantity
    recipe = FigureRecipe(
        figure_id=args.figure_id or f"{args.kind}",
        kind=args.kind,
        inputs={default_role(args.kind): args.input},
        output=args.output,
        title=args.title,
        xlabel=args.xlabel,
        ylabel=args.ylabel,
        options=options,
    )
    try:
        out = render(recipe)
    except SchemaMismatch as exc:
        print(f"schema mismatch: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
