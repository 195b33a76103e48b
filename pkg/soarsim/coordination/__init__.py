from soarsim.coordination.crowding import crowding_check, lift_occupants
from soarsim.coordination.manager import (
    GlobalManager,
    area_stats,
    coordinate_level1,
    coordinate_level2,
    coordinate_level3,
    get_manager,
    global_accept,
    level3_matrix,
    release,
    set_manager,
    substitute,
)
from soarsim.coordination.models import (
    AreaStats,
    CoordinationEvent,
    Level3Decision,
    Level3Option,
    ManagerConfig,
    ManagerPlacement,
    Recommendation,
)

__all__ = [
    "AreaStats",
    "CoordinationEvent",
    "GlobalManager",
    "Level3Decision",
    "Level3Option",
    "ManagerConfig",
    "ManagerPlacement",
    "Recommendation",
    "area_stats",
    "coordinate_level1",
    "coordinate_level2",
    "coordinate_level3",
    "crowding_check",
    "get_manager",
    "global_accept",
    "level3_matrix",
    "lift_occupants",
    "release",
    "set_manager",
    "substitute",
]
