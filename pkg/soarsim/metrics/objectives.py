"""Mission objectives: detection score, hours aloft and energy score."""

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, Mapping, Sequence

from soarsim.agents.sensing import in_footprint
from soarsim.metrics.log import MissionLog

logger = logging.getLogger(__name__)


class F1Accumulator:
    """
    Detection score accumulated tick by tick.

    A detection counts while the target is new or has been monitored for less
    than tau_t; it earns max(t_m, tau_t) / (tau_t * N_t) where N_t is the
    number of active targets in the tick. Monitoring time grows by one tick
    for every target seen by at least one agent, after the tick is scored.
    """

    def __init__(self, tau_t: float, tick: float):
        if tau_t <= 0 or tick <= 0:
            raise ValueError("tau_t and tick must be positive")
        self.tau_t = tau_t
        self.tick = tick
        self.monitoring: Dict[int, float] = {}
        self.score = 0.0

    def update(self, active_ids: Iterable[int], detections: Mapping[int, Iterable[int]]) -> float:
        """
        Score one tick.

        Args:
            active_ids: Targets active at the end of the tick
            detections: Target ids seen by each agent

        Returns:
            This tick's contribution
        """
        active = set(active_ids)
        if not active:
            return 0.0
        n_t = len(active)
        contribution = 0.0
        seen = set()
        for agent_id in sorted(detections):
            for target_id in sorted(set(detections[agent_id]) & active):
                seen.add(target_id)
                t_m = self.monitoring.get(target_id, 0.0)
                if target_id not in self.monitoring or t_m < self.tau_t:
                    contribution += max(t_m, self.tau_t) / (self.tau_t * n_t)
        for target_id in seen:
            self.monitoring[target_id] = self.monitoring.get(target_id, 0.0) + self.tick
        self.score += contribution
        return contribution


def detections_from_track(log: MissionLog, t: float, records: Sequence) -> Dict[int, list]:
    """Re-derive each agent's detections at t from its logged position."""
    active = [log.targets[i] for i in log.active_target_ids(t)]
    return {
        r.agent_id: [
            tg.id for tg in active if in_footprint(tg.position[0] - r.x, tg.position[1] - r.y, r.z, log.fov)
        ]
        for r in records
    }


def objective_f1(log: MissionLog, tau_t: float) -> float:
    """Detection score recomputed offline from positions and the target registry."""
    accumulator = F1Accumulator(tau_t, log.tick)
    for t, records in log.by_tick().items():
        accumulator.update(log.active_target_ids(t), detections_from_track(log, t, records))
    return accumulator.score


def objective_f2(log: MissionLog, battery_reserve: float) -> float:
    """Mean hours each agent spent aloft with at least the reserve left."""
    if log.n_agents == 0:
        return 0.0
    seconds = sum(
        log.tick
        for r in log.records
        if r.battery_wh / log.battery_capacity_wh >= battery_reserve
    )
    return seconds / 3600.0 / log.n_agents


def objective_f3(log: MissionLog, lam: float = 1.0) -> float:
    """
    Energy score, averaged over agents.

    Climbing ticks without battery drain earn m g z / 3600; climbing ticks
    that drain the battery cost lam times the electric power in watts.
    Level or sinking ticks contribute nothing.
    """
    if log.n_agents == 0:
        return 0.0
    total = 0.0
    for rows in log.by_agent().values():
        for prev, cur in zip(rows, rows[1:]):
            if cur.z <= prev.z:
                continue
            drained = cur.battery_wh < prev.battery_wh
            if drained:
                power = (prev.battery_wh - cur.battery_wh) * 3600.0 / log.tick
                total -= lam * power
            else:
                total += log.mass * log.g * cur.z / 3600.0
    return total / log.n_agents


@dataclass
class ObjectiveScores:
    f1: float
    f2: float
    f3: float
    constraint_violations: Dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, object]:
        return {"f1": self.f1, "f2": self.f2, "f3": self.f3, "constraint_violations": dict(self.constraint_violations)}
