"""Render the four sweep charts from summary CSVs.

This package never recomputes metrics: it plots the per-point means and
sample standard deviations exactly as the simulator's summary CSVs
report them. Every input is validated before any image is written, so a
bad CSV leaves the output directory untouched.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

POPULATION_SUMMARY = "population_sweep_summary.csv"
MOBILITY_SUMMARY = "mobility_sweep_summary.csv"


class ReportError(Exception):
    """A summary CSV is missing, malformed, or lacks a needed column."""


@dataclass(frozen=True)
class ChartSpec:
    """One chart: where its data lives and how to draw it."""

    input_csv: str
    x_column: str
    y_column: str
    error_column: str | None
    title: str
    output_path: str


@dataclass(frozen=True)
class Series:
    spec: ChartSpec
    xs: list[float]
    ys: list[float]
    errors: list[float] | None


def default_specs(summary_dir: str, out_dir: str) -> list[ChartSpec]:
    """The four standard charts; titles copy the figure captions."""
    population = os.path.join(summary_dir, POPULATION_SUMMARY)
    mobility = os.path.join(summary_dir, MOBILITY_SUMMARY)
    return [
        ChartSpec(
            input_csv=population,
            x_column="population",
            y_column="mean_exec_time_s_mean",
            error_column="mean_exec_time_s_stddev",
            title="Execution time Vs. Grid_population",
            output_path=os.path.join(out_dir, "exec_time_vs_population.png"),
        ),
        ChartSpec(
            input_csv=mobility,
            x_column="mobility_factor",
            y_column="mean_exec_time_s_mean",
            error_column="mean_exec_time_s_stddev",
            title="Execution time Vs. Mobility_factor",
            output_path=os.path.join(out_dir, "exec_time_vs_mobility_factor.png"),
        ),
        ChartSpec(
            input_csv=mobility,
            x_column="mobility_factor",
            y_column="location_updates_mean",
            error_column="location_updates_stddev",
            title="No. of updates Vs. Mobility_factor",
            output_path=os.path.join(out_dir, "updates_vs_mobility_factor.png"),
        ),
        ChartSpec(
            input_csv=mobility,
            x_column="mobility_factor",
            y_column="bandwidth_utilization_mean",
            error_column="bandwidth_utilization_stddev",
            title="Bandwidth_utilization Vs. Mobility_factor",
            output_path=os.path.join(out_dir, "bandwidth_vs_mobility_factor.png"),
        ),
    ]


def _parse_cell(path: str, row_number: int, column: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ReportError(
            f"{path}: row {row_number}: column {column!r} has "
            f"non-numeric value {raw!r}"
        ) from None


def load_series(spec: ChartSpec) -> Series:
    """Read and validate one chart's columns; no plotting side effects."""
    path = spec.input_csv
    if not os.path.exists(path):
        raise ReportError(f"summary CSV not found: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        needed = [spec.x_column, spec.y_column]
        if spec.error_column is not None:
            needed.append(spec.error_column)
        missing = [column for column in needed if column not in header]
        if missing:
            raise ReportError(
                f"{path}: missing column(s) {', '.join(sorted(missing))}"
            )
        xs: list[float] = []
        ys: list[float] = []
        errors: list[float] | None = [] if spec.error_column else None
        for row_number, row in enumerate(reader, start=2):
            xs.append(_parse_cell(path, row_number, spec.x_column, row[spec.x_column]))
            ys.append(_parse_cell(path, row_number, spec.y_column, row[spec.y_column]))
            if errors is not None:
                errors.append(
                    _parse_cell(
                        path, row_number, spec.error_column, row[spec.error_column]
                    )
                )
    if not xs:
        raise ReportError(f"{path}: no data rows")
    return Series(spec, xs, ys, errors)


def _render(series: Series) -> None:
    spec = series.spec
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    try:
        ax.errorbar(
            series.xs,
            series.ys,
            yerr=series.errors,
            marker="o",
            capsize=3,
            linewidth=1.5,
        )
        ax.set_title(spec.title)
        ax.set_xlabel(spec.x_column)
        ax.set_ylabel(spec.y_column)
        ax.grid(True, linestyle=":", linewidth=0.5)
        fig.tight_layout()
        fig.savefig(spec.output_path, dpi=150)
    finally:
        plt.close(fig)


def render_all(summary_dir: str, out_dir: str) -> list[str]:
    """Validate every chart's data, then write all four images.

    Returns the output paths. Raises :class:`ReportError` before any
    image is written if any input is unusable.
    """
    specs = default_specs(summary_dir, out_dir)
    series = [load_series(spec) for spec in specs]  # validate everything first
    os.makedirs(out_dir, exist_ok=True)
    for item in series:
        _render(item)
    return [spec.output_path for spec in specs]
