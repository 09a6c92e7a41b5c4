"""Presentation layer over the mobigrid sweep summary CSVs."""

from plot_reports.charts import ChartSpec, ReportError, default_specs, render_all

__all__ = ["ChartSpec", "ReportError", "default_specs", "render_all"]
