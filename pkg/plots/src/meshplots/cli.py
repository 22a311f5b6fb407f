"""plot_figures: render the four sweep CSVs into overhead and fairness figures."""

from __future__ import annotations

import argparse
import os
import sys

from .figures import FigureSpec, PlotError, render_figure

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_IO = 3

# (csv filename, x axis label) for the four sweep experiments
FIGURE_INPUTS = (
    ("fig_nodes.csv", "number of nodes"),
    ("fig_density.csv", "network density (mean degree)"),
    ("fig_interfaces.csv", "number of interfaces"),
    ("fig_pcover.csv", "coverage probability threshold"),
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plot_figures",
        description="Render overhead and Jain fairness figures from sweep CSVs",
    )
    parser.add_argument("csv_dir", help="directory holding the sweep CSV files")
    parser.add_argument("out_dir", help="directory to write the images into")
    parser.add_argument("--format", choices=("png", "svg"), default="png")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        present = [
            (name, label)
            for name, label in FIGURE_INPUTS
            if os.path.isfile(os.path.join(args.csv_dir, name))
        ]
        if not present:
            expected = ", ".join(name for name, _ in FIGURE_INPUTS)
            print(
                f"error: no sweep CSVs found in {args.csv_dir!r}; expected {expected}",
                file=sys.stderr,
            )
            return EXIT_ERROR
        os.makedirs(args.out_dir, exist_ok=True)
        for name, label in present:
            stem = os.path.splitext(name)[0]
            for metric in ("overhead", "jain"):
                spec = FigureSpec(
                    input_csv=os.path.join(args.csv_dir, name),
                    x_label=label,
                    y_metric=metric,
                    output_image=os.path.join(args.out_dir, f"{stem}_{metric}.{args.format}"),
                )
                render_figure(spec)
    except PlotError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
