"""Command-line rendering: one input file, one kind, one image out."""

from __future__ import annotations

import argparse
import sys

from .io import SchemaError
from .render import KINDS, PlotJob, render


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="macresolve-plots",
        description="Render experiment CSV/JSON files into figures.",
    )
    ap.add_argument("--kind", choices=KINDS, required=True)
    ap.add_argument("--input", required=True, help="sweep CSV / info JSON / derived CSV")
    ap.add_argument("--out", required=True, help="destination image (png or svg)")
    ap.add_argument("--title", default=None)
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        path = render(PlotJob(kind=args.kind, source=args.input, out=args.out, title=args.title))
    except (SchemaError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {path}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
