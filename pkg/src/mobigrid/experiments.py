"""Per-run metrics and the population / mobility-factor sweeps."""

from __future__ import annotations

import csv
import math
import statistics
from dataclasses import dataclass, replace

from mobigrid.config import ScenarioConfig
from mobigrid.engine import RunResult, run

POPULATION_POINTS = (30, 40, 50, 60, 70, 80, 90)
MOBILITY_POINTS = (0.10, 0.20, 0.30, 0.40)

POPULATION_HEADER = "population,replicate,seed,mean_exec_time_s,failure_rate"
MOBILITY_HEADER = (
    "mobility_factor,replicate,seed,mean_exec_time_s,failure_rate,"
    "location_updates,bandwidth_utilization"
)


@dataclass(frozen=True)
class RunMetrics:
    """Performance parameters of one run."""

    population: int
    mobility_factor: float
    mean_exec_time_s: float | None
    task_failure_rate: float
    location_updates: int
    bandwidth_utilization: float
    bandwidth_per_vo: dict[int, float]
    completed_jobs: int
    incomplete_jobs: int


def measure_run(result: RunResult) -> RunMetrics:
    """Shape a run's counters into its reported metrics.

    Jobs that never completed are excluded from the execution-time mean
    (reported separately); a run with no completed jobs has no mean at all.
    """
    times = result.exec_times
    bsms = result.services.bsms
    # Monitoring overhead counts every BSMS database write: movement
    # updates plus the enter/leave (de)registrations.
    updates = bsms.update_count + bsms.registration_count + bsms.deregistration_count
    return RunMetrics(
        population=result.config.population,
        mobility_factor=result.config.mobility_factor,
        mean_exec_time_s=statistics.fmean(times) if times else None,
        task_failure_rate=result.services.failure_rate(),
        location_updates=updates,
        bandwidth_utilization=result.overall_utilization(),
        bandwidth_per_vo=result.bandwidth_utilization(),
        completed_jobs=result.completed_jobs,
        incomplete_jobs=result.total_jobs - result.completed_jobs,
    )


@dataclass(frozen=True)
class SweepRow:
    point: float
    replicate: int
    seed: int
    metrics: RunMetrics


def replicate_seed(base_seed: int, point_index: int, replicate: int) -> int:
    return base_seed + 100_000 * (point_index + 1) + replicate


def population_sweep_base() -> ScenarioConfig:
    """Stationary scenario: no churn, walkers frozen in place."""
    return ScenarioConfig(mobility_factor=0.0, step_interval_s=math.inf)


def mobility_sweep_base() -> ScenarioConfig:
    """Fixed population with room to roam and a multi-job schedule.

    AO clusters of radius 3 keep coverage exits rare relative to churn,
    five jobs spaced 20 s apart make runs long enough for walk steps to
    register as location updates, and the coarser 12-way decomposition
    gives each sub job enough compute time for churn to interrupt it.
    """
    return ScenarioConfig(
        population=60,
        ao_radius=3,
        jobs_per_initiator=5,
        job_interval_s=20.0,
        step_interval_s=10.0,
        subjobs_per_job=12,
    )


def sweep_population(
    base: ScenarioConfig | None = None,
    points: tuple[int, ...] = POPULATION_POINTS,
    replicates: int = 30,
    base_seed: int = 1,
) -> list[SweepRow]:
    """Run the stationary grid-size sweep; mobility is forced off."""
    base = base if base is not None else population_sweep_base()
    base = replace(base, mobility_factor=0.0, step_interval_s=math.inf)
    rows = []
    for index, population in enumerate(points):
        config = replace(base, population=population)
        for rep in range(replicates):
            seed = replicate_seed(base_seed, index, rep)
            rows.append(SweepRow(population, rep, seed, measure_run(run(config, seed))))
    return rows


def sweep_mobility(
    base: ScenarioConfig | None = None,
    points: tuple[float, ...] = MOBILITY_POINTS,
    replicates: int = 30,
    base_seed: int = 1,
) -> list[SweepRow]:
    """Run the mobility-factor sweep at fixed population."""
    base = base if base is not None else mobility_sweep_base()
    rows = []
    for index, mf in enumerate(points):
        config = replace(base, mobility_factor=mf)
        for rep in range(replicates):
            seed = replicate_seed(base_seed, index, rep)
            rows.append(SweepRow(mf, rep, seed, measure_run(run(config, seed))))
    return rows


def _format(value: object) -> str:
    if value is None:
        return ""
    return str(value)


def _sweep_records(rows: list[SweepRow], mode: str) -> tuple[list[str], list[list]]:
    if mode == "population":
        header = POPULATION_HEADER.split(",")
        records = [
            [
                int(row.point),
                row.replicate,
                row.seed,
                row.metrics.mean_exec_time_s,
                row.metrics.task_failure_rate,
            ]
            for row in rows
        ]
    elif mode == "mobility":
        header = MOBILITY_HEADER.split(",")
        records = [
            [
                row.point,
                row.replicate,
                row.seed,
                row.metrics.mean_exec_time_s,
                row.metrics.task_failure_rate,
                row.metrics.location_updates,
                row.metrics.bandwidth_utilization,
            ]
            for row in rows
        ]
    else:
        raise ValueError(f"unknown sweep mode {mode!r}")
    return header, records


def write_sweep_csv(rows: list[SweepRow], path: str, mode: str) -> None:
    header, records = _sweep_records(rows, mode)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for record in records:
            writer.writerow([_format(v) for v in record])


def summarize(rows: list[SweepRow], mode: str) -> list[dict[str, float]]:
    """Per-sweep-point mean and sample standard deviation of each metric."""
    header, records = _sweep_records(rows, mode)
    metric_names = header[3:]
    points: dict[float, list[list]] = {}
    for record in records:
        points.setdefault(record[0], []).append(record[3:])
    summary = []
    for point in sorted(points):
        entry: dict[str, float] = {header[0]: point}
        columns = list(zip(*points[point]))
        for name, column in zip(metric_names, columns):
            values = [v for v in column if v is not None]
            entry[f"{name}_mean"] = statistics.fmean(values) if values else None
            entry[f"{name}_stddev"] = (
                statistics.stdev(values) if len(values) > 1 else 0.0
            )
        summary.append(entry)
    return summary


def write_summary_csv(rows: list[SweepRow], path: str, mode: str) -> None:
    summary = summarize(rows, mode)
    header, _ = _sweep_records(rows, mode)
    columns = [header[0]]
    for name in header[3:]:
        columns.extend((f"{name}_mean", f"{name}_stddev"))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for entry in summary:
            writer.writerow([_format(entry[c]) for c in columns])


def spearman(xs: list[float], ys: list[float]) -> float:
    """Spearman rank correlation (average ranks for ties)."""
    if len(xs) != len(ys) or len(xs) < 2:
        raise ValueError("need two sequences of equal length >= 2")

    def ranks(values: list[float]) -> list[float]:
        order = sorted(range(len(values)), key=lambda i: values[i])
        result = [0.0] * len(values)
        i = 0
        while i < len(order):
            j = i
            while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
                j += 1
            rank = (i + j) / 2 + 1
            for k in range(i, j + 1):
                result[order[k]] = rank
            i = j + 1
        return result

    rx, ry = ranks(xs), ranks(ys)
    mx, my = statistics.fmean(rx), statistics.fmean(ry)
    cov = sum((a - mx) * (b - my) for a, b in zip(rx, ry))
    vx = sum((a - mx) ** 2 for a in rx)
    vy = sum((b - my) ** 2 for b in ry)
    if vx == 0 or vy == 0:
        return 0.0
    return cov / math.sqrt(vx * vy)


def metrics_csv_row(metrics: RunMetrics, seed: int) -> tuple[str, str]:
    """Header and one data row for a single run's metrics file."""
    header = (
        "population,mobility_factor,seed,mean_exec_time_s,failure_rate,"
        "location_updates,bandwidth_utilization,completed_jobs,incomplete_jobs"
    )
    row = ",".join(
        _format(v)
        for v in (
            metrics.population,
            metrics.mobility_factor,
            seed,
            metrics.mean_exec_time_s,
            metrics.task_failure_rate,
            metrics.location_updates,
            metrics.bandwidth_utilization,
            metrics.completed_jobs,
            metrics.incomplete_jobs,
        )
    )
    return header, row
