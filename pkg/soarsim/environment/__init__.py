from soarsim.environment.models import (
    Environment,
    EnvironmentEvent,
    LifecyclePhases,
    Region,
    SpawnRanges,
    Target,
    Updraft,
)
from soarsim.environment.spawner import create_environment, step_environment
from soarsim.environment.updrafts import lifecycle_factor, total_wind, updraft_at, updraft_velocity

__all__ = [
    "Environment",
    "EnvironmentEvent",
    "LifecyclePhases",
    "Region",
    "SpawnRanges",
    "Target",
    "Updraft",
    "create_environment",
    "lifecycle_factor",
    "step_environment",
    "total_wind",
    "updraft_at",
    "updraft_velocity",
]
