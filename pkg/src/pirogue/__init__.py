"""Agent-based simulator of West African artisanal fishery dynamics.

Fish populations live as biomass patches on a gridded marine environment
(bathymetry x monthly SST); fishing-unit agents run hourly trips from
coastal landing sites, migrate when fish or processing capacity run out,
and the whole system is driven by a deterministic seeded scheduler.
Includes a scenario batch runner, a Sobol/Saltelli sensitivity harness and
an HTTP steering server for interactive runs.
"""

__version__ = "0.1.0"

from pirogue.engine import run, SimulationInvariantError
from pirogue.config import RunConfig, parse_run_config

__all__ = ["run", "RunConfig", "parse_run_config", "SimulationInvariantError", "__version__"]
