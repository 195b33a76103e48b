from soarsim.maps.grids import build_priority_map, record_lift_detection
from soarsim.maps.lift import apply_decay, check_mapped_lift, decay_weight, is_mapped, record_lift
from soarsim.maps.mission import update_mission_map
from soarsim.maps.models import GridMap, LiftMap, LiftRecord, MissionMap, MissionRecord
from soarsim.maps.store import MapStore

__all__ = [
    "GridMap",
    "LiftMap",
    "LiftRecord",
    "MapStore",
    "MissionMap",
    "MissionRecord",
    "apply_decay",
    "build_priority_map",
    "check_mapped_lift",
    "decay_weight",
    "is_mapped",
    "record_lift",
    "record_lift_detection",
    "update_mission_map",
]
