"""Per-tick flight track, environment registry and event rows of one run."""

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Sequence, Tuple

import pandas as pd

from soarsim.environment.models import Environment, EnvironmentEvent, Region, Target, Updraft

TRACK_COLUMNS = (
    "t",
    "agent_id",
    "x",
    "y",
    "z",
    "V_a",
    "bank",
    "mode",
    "soar_state",
    "battery_wh",
    "detected_target_ids",
    "lift_id",
    "updraft_id",
)
EVENT_COLUMNS = ("time_s", "kind", "id", "x", "y", "param", "level", "agents", "decision")


@dataclass(frozen=True)
class TrackRecord:
    """
    One agent at the end of one tick.

    lift_id is the lift-map record the agent is working (-1 for none);
    updraft_id is the environment updraft whose core radius contains an
    orbiting agent (-1 for none).
    """

    t: float
    agent_id: int
    x: float
    y: float
    z: float
    V_a: float
    bank: float
    mode: str
    soar_state: str
    battery_wh: float
    detected: Tuple[int, ...] = ()
    lift_id: int = -1
    updraft_id: int = -1

    def to_row(self) -> Dict[str, object]:
        return {
            "t": self.t,
            "agent_id": self.agent_id,
            "x": self.x,
            "y": self.y,
            "z": self.z,
            "V_a": self.V_a,
            "bank": self.bank,
            "mode": self.mode,
            "soar_state": self.soar_state,
            "battery_wh": self.battery_wh,
            "detected_target_ids": " ".join(str(i) for i in self.detected),
            "lift_id": self.lift_id,
            "updraft_id": self.updraft_id,
        }


def event_row(event: EnvironmentEvent) -> Dict[str, object]:
    return {
        "time_s": event.time_s,
        "kind": event.kind,
        "id": event.id,
        "x": event.x,
        "y": event.y,
        "param": event.param,
        "level": -1,
        "agents": "",
        "decision": "",
    }


@dataclass
class MissionLog:
    """
    Everything the objectives, constraints and summaries read.

    Records are appended tick by tick, one per agent that flew the tick.
    targets and updrafts register every entity seen during the run so
    detections can be recomputed offline from positions alone.
    """

    region: Region
    n_agents: int
    tick: float
    battery_capacity_wh: float
    mass: float
    g: float = 9.81
    fov: float = math.radians(60.0)
    records: List[TrackRecord] = field(default_factory=list)
    targets: Dict[int, Target] = field(default_factory=dict)
    updrafts: Dict[int, Updraft] = field(default_factory=dict)
    events: List[Dict[str, object]] = field(default_factory=list)

    def append(self, record: TrackRecord) -> None:
        self.records.append(record)

    def register(self, env: Environment) -> None:
        """Remember the targets and updrafts active in env."""
        for target in env.active_targets:
            self.targets.setdefault(target.id, target)
        for updraft in env.active_updrafts:
            self.updrafts.setdefault(updraft.id, updraft)

    def add_events(self, rows: Iterable[Dict[str, object]]) -> None:
        self.events.extend(rows)

    def times(self) -> List[float]:
        return sorted({r.t for r in self.records})

    def by_tick(self) -> Dict[float, List[TrackRecord]]:
        grouped: Dict[float, List[TrackRecord]] = defaultdict(list)
        for record in self.records:
            grouped[record.t].append(record)
        return dict(sorted(grouped.items()))

    def by_agent(self) -> Dict[int, List[TrackRecord]]:
        grouped: Dict[int, List[TrackRecord]] = defaultdict(list)
        for record in self.records:
            grouped[record.agent_id].append(record)
        for rows in grouped.values():
            rows.sort(key=lambda r: r.t)
        return dict(sorted(grouped.items()))

    def active_target_ids(self, t: float) -> List[int]:
        return sorted(i for i, target in self.targets.items() if target.is_active(t))

    def track_frame(self) -> pd.DataFrame:
        return pd.DataFrame([r.to_row() for r in self.records], columns=list(TRACK_COLUMNS))

    def events_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.events, columns=list(EVENT_COLUMNS))
        if not frame.empty:
            frame = frame.sort_values(["time_s"], kind="stable").reset_index(drop=True)
        return frame


def synthetic_log(
    region: Region,
    rows: Sequence[TrackRecord],
    n_agents: int,
    tick: float = 1.0,
    battery_capacity_wh: float = 50.0,
    mass: float = 1.6,
    targets: Sequence[Target] = (),
    fov: float = math.radians(60.0),
) -> MissionLog:
    """Build a log from hand-written records, for audits and offline checks."""
    log = MissionLog(region=region, n_agents=n_agents, tick=tick, battery_capacity_wh=battery_capacity_wh, mass=mass, fov=fov)
    for record in rows:
        log.append(record)
    for target in targets:
        log.targets[target.id] = target
    return log
