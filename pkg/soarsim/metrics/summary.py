"""Per-run summary tables built from the mission log."""

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Set, Tuple

from soarsim.agents.models import FlightMode, SoarState
from soarsim.metrics.log import MissionLog, TrackRecord

_ORBITING = {s.value for s in SoarState if s.is_orbit}
_SOARING = {s.value for s in SoarState if s.is_soaring}


@dataclass
class AgentSummary:
    agent_id: int
    unpowered_climb_min: float
    powered_climb_min: float
    flight_min: float
    residual_battery: float
    mean_power_w: float


@dataclass
class RunSummary:
    agents: List[AgentSummary]
    updrafts_spawned: int
    updrafts_detected: int
    updrafts_exploited: int
    detection_multiplicity: Dict[int, int]
    exploitation_multiplicity: Dict[int, int]
    unique_targets: int
    targets_spawned: int
    detection_histogram: Dict[int, int]
    objectives: Dict[str, float] = field(default_factory=dict)
    constraint_violations: Dict[str, int] = field(default_factory=dict)

    @property
    def updraft_detection_rate(self) -> float:
        return self.updrafts_detected / self.updrafts_spawned if self.updrafts_spawned else 0.0

    @property
    def updraft_exploitation_rate(self) -> float:
        return self.updrafts_exploited / self.updrafts_spawned if self.updrafts_spawned else 0.0

    def _mean(self, name: str) -> float:
        if not self.agents:
            return 0.0
        return sum(getattr(a, name) for a in self.agents) / len(self.agents)

    def scalars(self) -> Dict[str, float]:
        """Flat numeric metrics, the unit of ensemble aggregation."""
        values = {
            "unpowered_climb_min": self._mean("unpowered_climb_min"),
            "powered_climb_min": self._mean("powered_climb_min"),
            "flight_min": self._mean("flight_min"),
            "residual_battery": self._mean("residual_battery"),
            "battery_consumed": 1.0 - self._mean("residual_battery") if self.agents else 0.0,
            "mean_power_w": self._mean("mean_power_w"),
            "updrafts_spawned": float(self.updrafts_spawned),
            "updrafts_detected": float(self.updrafts_detected),
            "updrafts_exploited": float(self.updrafts_exploited),
            "updraft_detection_rate": self.updraft_detection_rate,
            "updraft_exploitation_rate": self.updraft_exploitation_rate,
            "unique_targets": float(self.unique_targets),
            "targets_spawned": float(self.targets_spawned),
        }
        values.update({k: float(v) for k, v in self.objectives.items()})
        values.update({f"violations_{k}": float(v) for k, v in self.constraint_violations.items()})
        return values

    def to_dict(self) -> Dict[str, object]:
        return {
            "agents": [vars(a) for a in self.agents],
            "detection_multiplicity": {str(k): v for k, v in sorted(self.detection_multiplicity.items())},
            "exploitation_multiplicity": {str(k): v for k, v in sorted(self.exploitation_multiplicity.items())},
            "detection_histogram": {str(k): v for k, v in sorted(self.detection_histogram.items())},
            "metrics": self.scalars(),
        }

    def to_text(self) -> str:
        """Aligned tables for the console."""
        lines = [f"{'agent':>5} {'unpowered min':>14} {'powered min':>12} {'flight min':>11} {'battery left':>13} {'power W':>8}"]
        for a in self.agents:
            lines.append(
                f"{a.agent_id:>5} {a.unpowered_climb_min:>14.1f} {a.powered_climb_min:>12.1f} "
                f"{a.flight_min:>11.1f} {a.residual_battery:>13.1%} {a.mean_power_w:>8.2f}"
            )
        lines.append("")
        for name, value in self.scalars().items():
            lines.append(f"{name:<28} {value:>12.4f}")
        return "\n".join(lines)


def _climb_minutes(rows: List[TrackRecord], tick: float) -> Tuple[float, float]:
    unpowered = powered = 0
    for prev, cur in zip(rows, rows[1:]):
        if cur.z <= prev.z:
            continue
        if cur.mode == FlightMode.ENGINE.value:
            powered += 1
        else:
            unpowered += 1
    return unpowered * tick / 60.0, powered * tick / 60.0


def _episodes(log: MissionLog, states: Set[str]) -> Counter:
    """Contiguous runs of an agent inside one updraft while in one of states, per updraft."""
    episodes: Counter = Counter()
    for rows in log.by_agent().values():
        current = -1
        for r in rows:
            inside = r.updraft_id if r.soar_state in states else -1
            if inside >= 0 and inside != current:
                episodes[inside] += 1
            current = inside
    return episodes


def summarize(log: MissionLog) -> RunSummary:
    """
    Climb time split, updraft use and target statistics of one run.

    Multiplicity maps k to the number of updrafts entered in exactly k
    separate episodes; the detection histogram maps k to the number of
    targets seen by exactly k distinct agents.
    """
    agents = []
    for agent_id, rows in log.by_agent().items():
        unpowered, powered = _climb_minutes(rows, log.tick)
        flight_s = len(rows) * log.tick
        consumed_wh = log.battery_capacity_wh - rows[-1].battery_wh
        agents.append(
            AgentSummary(
                agent_id=agent_id,
                unpowered_climb_min=unpowered,
                powered_climb_min=powered,
                flight_min=flight_s / 60.0,
                residual_battery=rows[-1].battery_wh / log.battery_capacity_wh,
                mean_power_w=max(consumed_wh, 0.0) * 3600.0 / flight_s if flight_s > 0 else 0.0,
            )
        )

    detected = _episodes(log, _ORBITING)
    exploited = _episodes(log, _SOARING)

    seen_by: Dict[int, Set[int]] = defaultdict(set)
    for r in log.records:
        for target_id in r.detected:
            seen_by[target_id].add(r.agent_id)

    return RunSummary(
        agents=agents,
        updrafts_spawned=len(log.updrafts),
        updrafts_detected=len(detected),
        updrafts_exploited=len(exploited),
        detection_multiplicity=dict(Counter(detected.values())),
        exploitation_multiplicity=dict(Counter(exploited.values())),
        unique_targets=len(seen_by),
        targets_spawned=len(log.targets),
        detection_histogram=dict(Counter(len(agents_) for agents_ in seen_by.values())),
    )
