"""Scenario configuration: defaults, flat key=value files, env overrides."""

from __future__ import annotations

import dataclasses
import math
import os
from dataclasses import dataclass

ENV_PREFIX = "MOBIGRID_"


class ConfigError(Exception):
    """Invalid configuration key, value, or combination."""


@dataclass(frozen=True)
class ScenarioConfig:
    """Every tunable of one simulation run.

    All values have defaults; a config file or environment variables
    override them key by key. `step_interval_s` may be `inf` to freeze
    walkers in place (the stationary scenario).
    """

    vo_count: int = 2
    aos_per_vo: int = 2
    ao_radius: int = 0
    population: int = 60
    bandwidth_mbps: float = 40.0
    mobility_factor: float = 0.0
    sigma_deg: float = 30.0
    cell_ri: float = 1.0
    cell_ro: float = 2.0 / math.sqrt(3.0)
    step_interval_s: float = 10.0
    churn_scan_interval_s: float = 1.0
    duration_s: float = 10000.0
    initiator_count: int = 1
    jobs_per_initiator: int = 1
    job_interval_s: float = 20.0
    subjobs_per_job: int = 120
    job_work_min: int = 200
    job_work_max: int = 1000
    cpu_rate_min: float = 5.0
    cpu_rate_max: float = 20.0
    dispatch_payload_bytes: int = 100_000
    result_payload_bytes: int = 50_000
    control_message_bytes: int = 1_000
    initiator_executes: bool = False

    def validate(self) -> None:
        c = self
        checks = [
            (c.vo_count >= 1, "vo_count must be >= 1"),
            (c.aos_per_vo >= 1, "aos_per_vo must be >= 1"),
            (c.ao_radius >= 0, "ao_radius must be >= 0"),
            (c.population >= 0, "population must be >= 0"),
            (c.bandwidth_mbps > 0, "bandwidth_mbps must be > 0"),
            (0.0 <= c.mobility_factor <= 1.0, "mobility_factor must be in [0, 1]"),
            (5.0 <= c.sigma_deg <= 90.0, "sigma_deg must be in [5, 90]"),
            (c.cell_ro > c.cell_ri > 0, "need cell_ro > cell_ri > 0"),
            (c.step_interval_s > 0, "step_interval_s must be > 0"),
            (c.churn_scan_interval_s > 0, "churn_scan_interval_s must be > 0"),
            (
                c.duration_s >= 0 and math.isfinite(c.duration_s),
                "duration_s must be finite and >= 0",
            ),
            (c.initiator_count >= 0, "initiator_count must be >= 0"),
            (
                c.initiator_count <= c.population,
                "initiator_count cannot exceed population",
            ),
            (c.jobs_per_initiator >= 0, "jobs_per_initiator must be >= 0"),
            (c.job_interval_s > 0, "job_interval_s must be > 0"),
            (c.subjobs_per_job >= 1, "subjobs_per_job must be >= 1"),
            (
                0 < c.job_work_min <= c.job_work_max,
                "need 0 < job_work_min <= job_work_max",
            ),
            (
                0 < c.cpu_rate_min <= c.cpu_rate_max,
                "need 0 < cpu_rate_min <= cpu_rate_max",
            ),
            (c.dispatch_payload_bytes > 0, "dispatch_payload_bytes must be > 0"),
            (c.result_payload_bytes > 0, "result_payload_bytes must be > 0"),
            (c.control_message_bytes > 0, "control_message_bytes must be > 0"),
        ]
        for ok, message in checks:
            if not ok:
                raise ConfigError(message)

    def as_dict(self) -> dict[str, object]:
        return dataclasses.asdict(self)


_FIELDS = {f.name: f for f in dataclasses.fields(ScenarioConfig)}


def _parse_value(key: str, raw: str) -> object:
    field = _FIELDS[key]
    text = raw.strip()
    try:
        if field.type == "bool":
            if text.lower() in ("true", "1", "yes"):
                return True
            if text.lower() in ("false", "0", "no"):
                return False
            raise ValueError(f"not a boolean: {text}")
        if field.type == "int":
            return int(text)
        return float(text)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {raw!r} ({exc})") from None


def parse_config_file(path: str) -> dict[str, object]:
    """Read a flat `key = value` file; '#' starts a comment."""
    overrides: dict[str, object] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            if "=" not in text:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            key, raw = (part.strip() for part in text.split("=", 1))
            if key not in _FIELDS:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            overrides[key] = _parse_value(key, raw)
    return overrides


def env_overrides(environ: dict[str, str] | None = None) -> dict[str, object]:
    """Overrides taken from MOBIGRID_<KEY> environment variables."""
    environ = os.environ if environ is None else environ
    overrides: dict[str, object] = {}
    for key in _FIELDS:
        raw = environ.get(ENV_PREFIX + key.upper())
        if raw is not None:
            overrides[key] = _parse_value(key, raw)
    return overrides


def make_config(
    path: str | None = None,
    environ: dict[str, str] | None = None,
    **overrides: object,
) -> ScenarioConfig:
    """Defaults, then config file, then environment, then keyword overrides."""
    values: dict[str, object] = {}
    if path is not None:
        values.update(parse_config_file(path))
    values.update(env_overrides(environ))
    for key in overrides:
        if key not in _FIELDS:
            raise ConfigError(f"unknown key {key!r}")
    values.update(overrides)
    config = ScenarioConfig(**values)  # type: ignore[arg-type]
    config.validate()
    return config


def config_snapshot(config: ScenarioConfig) -> str:
    """Stable key=value rendering of the effective configuration."""
    lines = [f"{key} = {value!r}" for key, value in sorted(config.as_dict().items())]
    return "\n".join(lines) + "\n"
