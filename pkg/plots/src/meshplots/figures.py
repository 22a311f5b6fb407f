"""Figure rendering for sweep result CSVs.

Consumes the CSV contract of the simulation CLI:
``param,strategy,overhead_mean,overhead_ci,jain_mean,jain_ci,reps``
and draws one errorbar line per strategy.
"""

from __future__ import annotations

import csv
import hashlib
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

EXPECTED_COLUMNS = (
    "param",
    "strategy",
    "overhead_mean",
    "overhead_ci",
    "jain_mean",
    "jain_ci",
    "reps",
)

Y_LABELS = {
    "overhead": "broadcast overhead (transmissions per node)",
    "jain": "Jain fairness index",
}

# fixed styles so the same strategy always gets the same line across figures
_KNOWN_STYLES = {
    "StaticCommon": ("tab:blue", "o", "-"),
    "StaticPseudoRandom": ("tab:orange", "s", "--"),
    "DynamicAdaptive": ("tab:green", "^", "-."),
    "MixedCommonAdaptive": ("tab:red", "D", ":"),
    "MixedPseudoRandomAdaptive": ("tab:purple", "v", "-"),
}
_FALLBACK_COLORS = ("tab:brown", "tab:pink", "tab:gray", "tab:olive", "tab:cyan")
_FALLBACK_MARKERS = ("x", "+", "*", "p", "h")


class PlotError(Exception):
    """Base error for figure rendering."""


class SchemaError(PlotError):
    """The input CSV does not match the expected column set."""


class NoDataError(PlotError):
    """The input CSV has no data rows."""


@dataclass(frozen=True)
class FigureSpec:
    """One figure: a sweep CSV, the metric to plot and where to write it."""

    input_csv: str
    x_label: str
    y_metric: str  # "overhead" or "jain"
    output_image: str
    log_y: bool = False

    def validate(self) -> None:
        if self.y_metric not in Y_LABELS:
            raise PlotError(f"unknown metric {self.y_metric!r}; expected overhead or jain")


def style_for(strategy: str):
    """Deterministic (color, marker, linestyle) for a strategy name."""
    if strategy in _KNOWN_STYLES:
        return _KNOWN_STYLES[strategy]
    digest = int(hashlib.sha256(strategy.encode()).hexdigest(), 16)
    return (
        _FALLBACK_COLORS[digest % len(_FALLBACK_COLORS)],
        _FALLBACK_MARKERS[digest // 7 % len(_FALLBACK_MARKERS)],
        "-",
    )


def read_results(path: str) -> list[dict]:
    """Parse a sweep CSV into row dicts with numeric fields converted."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        header = tuple(reader.fieldnames or ())
        missing = [c for c in EXPECTED_COLUMNS if c not in header]
        if missing:
            raise SchemaError(f"{path}: missing column(s) {', '.join(missing)}")
        extra = [c for c in header if c not in EXPECTED_COLUMNS]
        if extra:
            raise SchemaError(f"{path}: unexpected column(s) {', '.join(extra)}")
        rows = []
        for lineno, raw in enumerate(reader, start=2):
            try:
                rows.append(
                    {
                        "param": float(raw["param"]),
                        "strategy": raw["strategy"],
                        "overhead_mean": float(raw["overhead_mean"]),
                        "overhead_ci": float(raw["overhead_ci"]),
                        "jain_mean": float(raw["jain_mean"]),
                        "jain_ci": float(raw["jain_ci"]),
                        "reps": int(raw["reps"]),
                    }
                )
            except (TypeError, ValueError):
                raise SchemaError(f"{path}:{lineno}: malformed row {raw}") from None
    if not rows:
        raise NoDataError(f"{path}: no data rows")
    return rows


def build_figure(spec: FigureSpec):
    """Build (but do not save) the matplotlib figure for a spec."""
    spec.validate()
    rows = read_results(spec.input_csv)
    by_strategy: dict[str, list[dict]] = {}
    for row in rows:
        by_strategy.setdefault(row["strategy"], []).append(row)

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    mean_key = f"{spec.y_metric}_mean"
    ci_key = f"{spec.y_metric}_ci"
    for strategy, srows in by_strategy.items():
        srows = sorted(srows, key=lambda r: r["param"])
        color, marker, linestyle = style_for(strategy)
        ax.errorbar(
            [r["param"] for r in srows],
            [r[mean_key] for r in srows],
            yerr=[r[ci_key] for r in srows],
            label=strategy,
            color=color,
            marker=marker,
            linestyle=linestyle,
            capsize=3,
        )
    if spec.log_y:
        ax.set_yscale("log")
    ax.set_xlabel(spec.x_label)
    ax.set_ylabel(Y_LABELS[spec.y_metric])
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    return fig


def render_figure(spec: FigureSpec) -> str:
    """Render a spec to its output image; returns the written path.

    Output is byte-stable across reruns: the SVG id salt is pinned and no
    timestamp metadata is embedded.
    """
    fig = build_figure(spec)
    try:
        with plt.rc_context({"svg.hashsalt": "meshplots"}):
            if spec.output_image.endswith(".svg"):
                fig.savefig(spec.output_image, metadata={"Date": None})
            else:
                fig.savefig(spec.output_image)
    finally:
        plt.close(fig)
    return spec.output_image
