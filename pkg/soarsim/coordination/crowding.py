"""Per-updraft capacity and altitude separation."""

import logging
import math
from typing import Iterable, List, Optional

from soarsim.agents.context import PeerState
from soarsim.agents.models import SoarState
from soarsim.environment.models import Point2

logger = logging.getLogger(__name__)

_OCCUPYING = (SoarState.FIRST_TURN, SoarState.EXPLOIT, SoarState.CHASE_LIFT)


def lift_occupants(lift_center: Point2, peers: Iterable[PeerState], radius: float, exclude: Optional[int] = None) -> List[PeerState]:
    """Peers circling within radius of the lift centre."""
    occupants = []
    for peer in peers:
        if not peer.alive or peer.agent_id == exclude or peer.soar_state not in _OCCUPYING:
            continue
        if peer.orbit_center is None:
            continue
        if math.dist(peer.orbit_center, lift_center) <= radius:
            occupants.append(peer)
    return occupants


def crowding_check(
    lift_center: Point2,
    peers: Iterable[PeerState],
    altitude: float,
    capacity: int = 2,
    altitude_separation: float = 50.0,
    radius: float = 150.0,
    exclude: Optional[int] = None,
) -> bool:
    """
    Whether one more agent may circle in this updraft at this altitude.

    Allowed while fewer than capacity agents occupy it and every occupant
    is at least altitude_separation above or below.
    """
    occupants = lift_occupants(lift_center, peers, radius, exclude)
    if len(occupants) >= capacity:
        logger.debug(f"Updraft at ({lift_center[0]:.0f}, {lift_center[1]:.0f}) full with {len(occupants)} agents")
        return False
    return all(abs(p.position[2] - altitude) >= altitude_separation for p in occupants)
