"""Sub-missions and the waypoint queues they expand into."""

import logging
import math
from dataclasses import dataclass
from typing import List

import numpy as np

from soarsim.agents.models import SoarState, SubMissionKind
from soarsim.environment.models import Point2
from soarsim.errors import EmptyMaskError
from soarsim.maps.models import GridMap
from soarsim.planning import (
    CoverageMode,
    SubArea,
    SweepConfig,
    clamp_to_area,
    expand_sweep_waypoints,
    exploration_waypoints,
    sweep_waypoints,
)

logger = logging.getLogger(__name__)

_MODES = {
    SubMissionKind.SURVEILLANCE: (CoverageMode.SWEEP, CoverageMode.EXPAND_SWEEP),
    SubMissionKind.EXPLORATION: (CoverageMode.GLOBAL, CoverageMode.LOCAL),
}

# Distinct (sweep angle, direction) patterns handed out to agents sharing an area and mode.
PATTERNS = (
    (0.0, 1),
    (math.pi / 2, 1),
    (0.0, -1),
    (math.pi / 2, -1),
    (math.pi / 4, 1),
    (math.pi / 4, -1),
    (3 * math.pi / 4, 1),
    (3 * math.pi / 4, -1),
)


@dataclass(frozen=True)
class SubMission:
    """What an agent does when it is not soaring or avoiding."""

    kind: SubMissionKind
    mode: CoverageMode
    area_index: int = 0
    sweep_angle: float = 0.0
    direction: int = 1

    def __post_init__(self) -> None:
        if self.mode not in _MODES[self.kind]:
            raise ValueError(f"{self.kind.value} sub-mission cannot use {self.mode.value} mode")
        if self.direction not in (1, -1):
            raise ValueError("direction must be +1 or -1")

    @property
    def state(self) -> SoarState:
        if self.kind == SubMissionKind.SURVEILLANCE:
            return SoarState.FOLLOW_COVERAGE_PLANNER
        return SoarState.EXPLORE

    @property
    def pattern(self):
        return (self.sweep_angle, self.direction)


def plan_waypoints(
    task: SubMission,
    area: SubArea,
    agent_pos: Point2,
    agent_heading: float,
    coverage_width: float,
    priority: GridMap,
    local_radius: float,
    n_destinations: int,
    margin: float,
    rng: np.random.Generator,
) -> List[Point2]:
    """
    Expand a sub-mission into a waypoint queue inside its area.

    Local exploration with no cell in reach falls back to global exploration
    of the same area.
    """
    config = SweepConfig(sweep_angle=task.sweep_angle, coverage_width=coverage_width, direction=task.direction)
    if task.mode == CoverageMode.SWEEP:
        waypoints = sweep_waypoints(area, config)
    elif task.mode == CoverageMode.EXPAND_SWEEP:
        waypoints = expand_sweep_waypoints(area, config, agent_heading, agent_pos)
    else:
        try:
            waypoints = exploration_waypoints(priority, task.mode, area, agent_pos, local_radius, n_destinations, rng)
        except EmptyMaskError:
            if task.mode != CoverageMode.LOCAL:
                raise
            logger.debug(f"No local exploration cell near {agent_pos}, exploring the whole area")
            waypoints = exploration_waypoints(
                priority, CoverageMode.GLOBAL, area, agent_pos, local_radius, n_destinations, rng
            )
    return clamp_to_area(waypoints, area, margin)


# Modes an agent may draw for itself; local exploration is only a fallback.
DRAWN_MODES = (CoverageMode.SWEEP, CoverageMode.EXPAND_SWEEP, CoverageMode.GLOBAL)


def kind_of(mode: CoverageMode) -> SubMissionKind:
    for kind, modes in _MODES.items():
        if mode in modes:
            return kind
    raise ValueError(f"unknown coverage mode: {mode}")


def random_sub_mission(rng: np.random.Generator, area_index: int = 0) -> SubMission:
    """A self-chosen sub-mission for agents that get no manager assignment."""
    mode = DRAWN_MODES[int(rng.integers(len(DRAWN_MODES)))]
    angle, direction = PATTERNS[int(rng.integers(len(PATTERNS)))]
    return SubMission(kind_of(mode), mode, area_index=area_index, sweep_angle=angle, direction=direction)
