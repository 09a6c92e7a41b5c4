"""Discrete-event simulator of a wireless mobile grid.

Mobile stations move over a hexagonal cellular lattice following a
normal-walk mobility model, a brokering server decomposes and distributes
computational jobs among them, and crossings of virtual-organization
boundaries abort and reallocate the sub jobs running on the moving station.
"""

from mobigrid.config import ConfigError, ScenarioConfig, make_config
from mobigrid.engine import RunResult, Simulation, run
from mobigrid.experiments import RunMetrics, measure_run

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "RunMetrics",
    "RunResult",
    "ScenarioConfig",
    "Simulation",
    "make_config",
    "measure_run",
    "run",
]
