"""Mission map updates gated against redundant re-detections."""

import dataclasses
from typing import Tuple

from soarsim.environment.models import Point2
from soarsim.maps.models import MissionMap, MissionRecord


def update_mission_map(
    mission_map: MissionMap,
    target_id: int,
    pos: Point2,
    t: float,
    delta_t: float,
    tau_t: float,
    tick: float = 1.0,
) -> Tuple[MissionMap, bool]:
    """
    Record a target detection unless it would saturate the map.

    Accepted when the target is new, or when it was last seen at least
    delta_t ago and first seen no more than tau_t ago.

    Returns:
        The map (updated in place) and the accepted flag
    """
    record = mission_map.records.get(target_id)
    if record is None:
        mission_map.records[target_id] = MissionRecord(
            target_id=target_id,
            position=(float(pos[0]), float(pos[1])),
            first_detection=t,
            last_detection=t,
            accumulated_monitoring=tick,
        )
        return mission_map, True

    if t - record.last_detection >= delta_t and t - record.first_detection <= tau_t:
        mission_map.records[target_id] = dataclasses.replace(
            record,
            position=(float(pos[0]), float(pos[1])),
            last_detection=t,
            accumulated_monitoring=record.accumulated_monitoring + tick,
        )
        return mission_map, True
    return mission_map, False
