from soarsim.planning.areas import assign_areas, coverage_width
from soarsim.planning.hwh import (
    PathMetrics,
    PlannerLimits,
    PredictedOccupancy,
    collision_risk,
    hwh_plan,
    path_metrics,
    plan_with_metrics,
    predict_obstacles,
)
from soarsim.planning.models import (
    Horizon,
    NoFlyZone,
    ObstacleKind,
    ObstacleObservation,
    PlannedPath,
    SubArea,
    SweepConfig,
    paths_frame,
)
from soarsim.planning.waypoints import (
    CoverageMode,
    clamp_to_area,
    expand_sweep_waypoints,
    exploration_waypoints,
    sweep_waypoints,
)

__all__ = [
    "CoverageMode",
    "Horizon",
    "NoFlyZone",
    "ObstacleKind",
    "ObstacleObservation",
    "PathMetrics",
    "PlannedPath",
    "PlannerLimits",
    "PredictedOccupancy",
    "SubArea",
    "SweepConfig",
    "assign_areas",
    "clamp_to_area",
    "collision_risk",
    "coverage_width",
    "expand_sweep_waypoints",
    "exploration_waypoints",
    "hwh_plan",
    "path_metrics",
    "paths_frame",
    "plan_with_metrics",
    "predict_obstacles",
    "sweep_waypoints",
]
