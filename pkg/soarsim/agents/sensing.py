"""Camera footprint and lift encounter detection."""

import math
from typing import List

from soarsim.agents.context import AgentContext
from soarsim.environment.models import Environment
from soarsim.maps.lift import is_mapped
from soarsim.maps.models import LiftMap


def footprint_radius(z: float, fov: float) -> float:
    """Ground radius seen by a downward camera with full view angle fov."""
    return z * math.tan(fov / 2.0)


def in_footprint(dx: float, dy: float, z: float, fov: float) -> bool:
    return dx * dx + dy * dy <= footprint_radius(z, fov) ** 2


def detect_targets(agent: AgentContext, env: Environment, t: float) -> List[int]:
    """Ids of active targets inside the agent's footprint, ascending; boundary inclusive."""
    if not agent.alive:
        return []
    x, y, z = agent.uav.position
    fov = agent.thresholds.fov
    return sorted(
        tg.id
        for tg in env.active_targets
        if tg.is_active(t) and in_footprint(tg.position[0] - x, tg.position[1] - y, z, fov)
    )


def lift_encounter_test(agent: AgentContext, climb_rate: float, sigma_u: float, lift_map: LiftMap) -> bool:
    """
    Unmapped lift under the agent.

    True when the measured climb rate exceeds the still-air expectation by
    more than sigma_u and no mapped lift lies within the merge radius.
    Sinking air never counts as an encounter.
    """
    if climb_rate - agent.expected_rate <= sigma_u:
        return False
    return not is_mapped(lift_map, agent.uav.xy)
