from soarsim.metrics.constraints import (
    CONSTRAINTS,
    ConstraintReport,
    check_constraints,
    communication_graph,
    lens_area,
    lens_area_literal,
    turn_rate_demand,
)
from soarsim.metrics.log import EVENT_COLUMNS, TRACK_COLUMNS, MissionLog, TrackRecord, event_row, synthetic_log
from soarsim.metrics.objectives import F1Accumulator, ObjectiveScores, objective_f1, objective_f2, objective_f3
from soarsim.metrics.summary import AgentSummary, RunSummary, summarize

__all__ = [
    "AgentSummary",
    "CONSTRAINTS",
    "ConstraintReport",
    "EVENT_COLUMNS",
    "F1Accumulator",
    "MissionLog",
    "ObjectiveScores",
    "RunSummary",
    "TRACK_COLUMNS",
    "TrackRecord",
    "check_constraints",
    "communication_graph",
    "event_row",
    "lens_area",
    "lens_area_literal",
    "objective_f1",
    "objective_f2",
    "objective_f3",
    "summarize",
    "synthetic_log",
    "turn_rate_demand",
]
