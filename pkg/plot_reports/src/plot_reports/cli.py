"""`plot_reports <summary_dir> <out_dir>`: render the four sweep charts."""

from __future__ import annotations

import argparse
import sys

from plot_reports.charts import ReportError, render_all


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plot_reports",
        description="Render the four sweep charts from summary CSVs",
    )
    parser.add_argument("summary_dir", help="directory holding the summary CSVs")
    parser.add_argument("out_dir", help="directory to write the PNG charts into")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        paths = render_all(args.summary_dir, args.out_dir)
    except ReportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in paths:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
