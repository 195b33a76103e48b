"""Global manager: task allocation, soaring substitution and sub-mission turnover."""

import dataclasses
import logging
import math
from typing import Callable, Dict, List, Optional, Sequence, Set, Tuple

import numpy as np
import shapely

from soarsim.agents.context import AgentContext, Substitution
from soarsim.agents.models import CONTINUE, SubMissionKind
from soarsim.agents.tasks import DRAWN_MODES, PATTERNS, SubMission, kind_of
from soarsim.coordination.models import (
    AreaStats,
    CoordinationEvent,
    Level3Decision,
    Level3Option,
    ManagerConfig,
    Recommendation,
)
from soarsim.decision import ActionCandidate, DecisionMatrix, select_action
from soarsim.maps.models import GridMap
from soarsim.maps.store import MapStore
from soarsim.planning import CoverageMode, SubArea

logger = logging.getLogger(__name__)

# Global manager instance
_manager: Optional["GlobalManager"] = None


def get_manager() -> Optional["GlobalManager"]:
    """Get global manager instance."""
    return _manager


def set_manager(manager: Optional["GlobalManager"]) -> None:
    """Set global manager instance."""
    global _manager
    _manager = manager


def global_accept(recommendation: Recommendation, current_local_rewards: Dict[int, float], config: ManagerConfig) -> bool:
    """
    Screen a joint action.

    Accepted when at least quorum agents are predicted to do no worse than
    now and the global reward strictly exceeds risk_tolerance times the
    global risk.
    """
    not_worse = sum(
        1
        for agent_id, predicted in recommendation.predicted_local.items()
        if predicted >= current_local_rewards.get(agent_id, 0.0)
    )
    if not_worse < config.quorum:
        return False
    return recommendation.global_reward > config.risk_tolerance * recommendation.global_risk


def coordinate_level1(areas: Sequence[SubArea], n_u: int, rng: np.random.Generator) -> List[SubMission]:
    """
    Initial sub-missions.

    Agent 0 always sweeps; the others draw a mode. Agents sharing an area
    and mode get distinct (sweep angle, direction) patterns.
    """
    if n_u < 1:
        raise ValueError("need at least one agent")
    if len(areas) != n_u:
        raise ValueError("one area per agent is required")
    used: Dict[Tuple, int] = {}
    tasks = []
    for i in range(n_u):
        mode = CoverageMode.SWEEP if i == 0 else DRAWN_MODES[int(rng.integers(len(DRAWN_MODES)))]
        key = (areas[i].vertices, mode)
        k = used.get(key, 0)
        used[key] = k + 1
        angle, direction = PATTERNS[k % len(PATTERNS)]
        tasks.append(SubMission(kind_of(mode), mode, area_index=i, sweep_angle=angle, direction=direction))
    logger.info("Level-1 tasks: " + ", ".join(f"{i}:{t.mode.value}" for i, t in enumerate(tasks)))
    return tasks


def _local_reward(agent: AgentContext) -> float:
    """Share of its sub-mission an agent still has to fly; zero while not on it."""
    if not agent.alive or not agent.soar_state.is_sub_mission or agent.total_waypoints == 0:
        return 0.0
    return 1.0 - agent.progress


def _risk_count(agents: Sequence[AgentContext]) -> float:
    return float(
        sum(
            1
            for a in agents
            if a.critical or a.battery_fraction < 2.0 * a.thresholds.battery_reserve or a.uav.z < a.thresholds.z_threshold
        )
    )


def _holds_last_surveillance(agent: AgentContext, soaring_agent: AgentContext, agents: Sequence[AgentContext]) -> bool:
    """True when taking over the soaring agent's task would leave no alive agent on surveillance."""
    if agent.task.kind != SubMissionKind.SURVEILLANCE or soaring_agent.task.kind == SubMissionKind.SURVEILLANCE:
        return False
    return not any(a is not agent and a.alive and a.task.kind == SubMissionKind.SURVEILLANCE for a in agents)


def substitute_candidates(soaring_agent: AgentContext, agents: Sequence[AgentContext]) -> List[AgentContext]:
    return [
        a
        for a in agents
        if a is not soaring_agent
        and a.alive
        and not a.critical
        and a.soar_state.is_sub_mission
        and a.substitution is None
        and not _holds_last_surveillance(a, soaring_agent, agents)
    ]


def coordinate_level2(soaring_agent: AgentContext, agents: Sequence[AgentContext], region_diagonal: float) -> Optional[AgentContext]:
    """
    Pick the agent that covers the area of a soaring peer.

    Candidates are scored on distance to the vacated work, altitude,
    battery and whether they would abandon a surveillance task.

    Returns:
        The substitute, or None when no agent is eligible
    """
    candidates = substitute_candidates(soaring_agent, agents)
    if not candidates:
        logger.warning(f"No substitute available for soaring agent {soaring_agent.agent_id}")
        return None
    if len(candidates) == 1:
        return candidates[0]
    target = soaring_agent.waypoints[0] if soaring_agent.waypoints else soaring_agent.area.centroid
    rows = []
    for a in candidates:
        th = a.thresholds
        rows.append(
            [
                math.dist(a.uav.xy, target) / region_diagonal,
                (a.uav.z - th.z_min) / (th.z_max - th.z_min),
                a.battery_fraction,
                1.0 if a.task.kind == SubMissionKind.SURVEILLANCE else 0.0,
            ]
        )
    matrix = DecisionMatrix(
        values=np.asarray(rows),
        maximize=(False, True, True, False),
        candidates=[ActionCandidate(f"agent-{a.agent_id}") for a in candidates],
    )
    return candidates[select_action(matrix)]


def substitute(agent: AgentContext, soaring_agent: AgentContext) -> None:
    """
    Hand the soaring agent's remaining work to agent, remembering agent's own.

    The substitute is recommended to continue its borrowed sub-mission
    rather than divert to mapped lift until it is released.
    """
    agent.substitution = Substitution(
        soaring_agent=soaring_agent.agent_id,
        task=agent.task,
        area=agent.area,
        waypoints=tuple(agent.waypoints),
        total_waypoints=agent.total_waypoints,
    )
    agent.task = soaring_agent.task
    agent.area = soaring_agent.area
    remaining = tuple(soaring_agent.waypoints) or (soaring_agent.area.centroid,)
    agent.set_waypoints(remaining)
    agent.recommendation = CONTINUE


def release(agent: AgentContext) -> None:
    """Restore the task and waypoint queue stored at substitution."""
    stored = agent.substitution
    if stored is None:
        return
    agent.task = stored.task
    agent.area = stored.area
    agent.set_waypoints(stored.waypoints)
    agent.total_waypoints = stored.total_waypoints
    agent.substitution = None
    agent.recommendation = None


def area_stats(area: SubArea, maps: MapStore, priority: GridMap) -> AreaStats:
    """Shares of known targets, mapped lifts and exploration priority inside an area."""
    polygon = area.polygon
    targets = [r.position for r in maps.mission.records.values()]
    lifts = [r.estimated_center for r in maps.lift]

    def share(points) -> float:
        if not points:
            return 0.0
        pts = np.asarray(points, dtype=float)
        return float(shapely.intersects_xy(polygon, pts[:, 0], pts[:, 1]).sum()) / len(points)

    xs, ys = priority.cell_centers()
    inside = shapely.intersects_xy(polygon, xs, ys)
    total = float(priority.values.sum())
    mass = float(priority.values[inside].sum()) / total if total > 0 else 0.0
    return AreaStats(targets=share(targets), lifts=share(lifts), priority=mass)


def level3_matrix(own: AreaStats, partners: Sequence[Tuple[int, AreaStats, float]], allow_new: bool = True) -> DecisionMatrix:
    """
    Options for an agent that finished its sub-mission.

    Rows are repeat, new mission (when allowed) and one swap per partner;
    columns are target share, lift share, priority share, novelty and the
    normalized distance to the option's area.
    """
    rows = [[own.targets, own.lifts, own.priority, 0.0, 0.0]]
    candidates = [ActionCandidate(Level3Option.REPEAT.value)]
    if allow_new:
        rows.append([own.targets, own.lifts, own.priority, 1.0, 0.0])
        candidates.append(ActionCandidate(Level3Option.NEW_MISSION.value))
    for partner_id, stats, distance in partners:
        rows.append([stats.targets, stats.lifts, stats.priority, 0.5, distance])
        candidates.append(ActionCandidate(Level3Option.SWAP.value, payload=partner_id))
    return DecisionMatrix(values=np.asarray(rows), maximize=(True, True, True, True, False), candidates=candidates)


def _new_task(task: SubMission) -> SubMission:
    if task.kind == SubMissionKind.SURVEILLANCE:
        return SubMission(SubMissionKind.EXPLORATION, CoverageMode.GLOBAL, area_index=task.area_index)
    return SubMission(SubMissionKind.SURVEILLANCE, CoverageMode.SWEEP, area_index=task.area_index)


def coordinate_level3(
    completed_agents: Sequence[AgentContext],
    agents: Sequence[AgentContext],
    maps: MapStore,
    priority: GridMap,
    config: ManagerConfig,
    region_diagonal: float,
) -> List[Level3Decision]:
    """
    Decide repeat, new mission or area swap for each finished agent.

    Swaps need a partner working a different area that is alive, not
    critical and not soaring. A new mission is not offered to the last
    surveillance agent. Swaps and new missions go through global_accept;
    a rejected option falls back to repeat.
    """
    decisions = []
    current = {a.agent_id: _local_reward(a) for a in agents if a.alive}
    for agent in completed_agents:
        if agent.critical:
            decisions.append(Level3Decision(agent.agent_id, Level3Option.REPEAT))
            continue
        surveyors = [a for a in agents if a.alive and a.task.kind == SubMissionKind.SURVEILLANCE]
        allow_new = not (agent.task.kind == SubMissionKind.SURVEILLANCE and len(surveyors) <= 1)
        own = area_stats(agent.area, maps, priority)
        partners = []
        for other in agents:
            if other is agent or not other.alive or other.critical or other.substitution is not None:
                continue
            if not other.soar_state.is_sub_mission or other.area.vertices == agent.area.vertices:
                continue
            stats = area_stats(other.area, maps, priority)
            partners.append((other.agent_id, stats, math.dist(agent.uav.xy, other.area.centroid) / region_diagonal))
        matrix = level3_matrix(own, partners, allow_new)
        chosen = matrix.candidates[select_action(matrix)]
        option = Level3Option(chosen.id)
        decision = Level3Decision(agent.agent_id, option, partner=chosen.payload)
        if option != Level3Option.REPEAT:
            involved = [agent] + [a for a in agents if a.agent_id == chosen.payload]
            predicted = dict(current)
            for a in involved:
                predicted[a.agent_id] = 1.0
            row = matrix.values[matrix.candidates.index(chosen)]
            gain = float(row[:3].sum() - matrix.values[0, :3].sum())
            recommendation = Recommendation(
                level=3,
                actions={a.agent_id: option.value for a in involved},
                predicted_local=predicted,
                global_reward=1.0 + max(gain, 0.0),
                global_risk=_risk_count(involved),
                description=f"agent {agent.agent_id} {option.value}",
            )
            if not global_accept(recommendation, current, config):
                decision = Level3Decision(agent.agent_id, Level3Option.REPEAT, accepted=False)
        decisions.append(decision)
    return decisions


class GlobalManager:
    """
    Coordinates sub-missions across agents once per tick.

    The manager is the single writer of agent tasks. Replanning of waypoint
    queues is delegated to the replan callback owned by the simulation.
    """

    def __init__(
        self,
        config: ManagerConfig,
        areas: Sequence[SubArea],
        region_diagonal: float,
        replan: Callable[[AgentContext], None],
    ):
        """
        Initialize manager.

        Args:
            config: Acceptance settings
            areas: Sub-area per agent, indexed by agent id
            region_diagonal: Distance normalizer for decision matrices
            replan: Rebuilds an agent's waypoint queue from its task and area
        """
        self.config = config
        self.areas = list(areas)
        self.region_diagonal = region_diagonal
        self.replan = replan
        self.events: List[CoordinationEvent] = []
        self._covered: Dict[int, int] = {}

    def _log(self, t: float, level: int, agents: Sequence[int], decision: str) -> None:
        self.events.append(CoordinationEvent(t, level, tuple(agents), decision))
        logger.info(f"t={t:.0f} level {level} [{', '.join(map(str, agents))}]: {decision}")

    def assign_initial(self, agents: Sequence[AgentContext], rng: np.random.Generator, t: float = 0.0) -> None:
        tasks = coordinate_level1(self.areas, len(agents), rng)
        for agent, task in zip(agents, tasks):
            agent.task = task
            agent.area = self.areas[task.area_index]
            agent.set_state(task.state, t)
            self.replan(agent)
            self._log(t, 1, [agent.agent_id], f"{task.kind.value}/{task.mode.value} pattern {task.pattern}")

    def _release_finished(self, agents: Sequence[AgentContext], t: float) -> None:
        by_id = {a.agent_id: a for a in agents}
        for agent in agents:
            stored = agent.substitution
            if stored is None:
                continue
            soaring = by_id.get(stored.soaring_agent)
            done = soaring is None or not soaring.alive or not soaring.soar_state.is_soaring
            if done or agent.completed or not agent.alive:
                release(agent)
                self._covered.pop(stored.soaring_agent, None)
                self._log(t, 2, [agent.agent_id, stored.soaring_agent], "release")
        for soaring_id in list(self._covered):
            soaring = by_id.get(soaring_id)
            if soaring is None or not soaring.soar_state.is_soaring:
                del self._covered[soaring_id]

    def _substitute_soaring(self, agents: Sequence[AgentContext], t: float) -> None:
        alive = [a for a in agents if a.alive]
        for soaring in alive:
            if not soaring.soar_state.is_soaring or soaring.agent_id in self._covered:
                continue
            if soaring.substitution is not None:
                # A substitute that starts soaring gives its borrowed work back first.
                release(soaring)
            self._covered[soaring.agent_id] = -1
            chosen = coordinate_level2(soaring, alive, self.region_diagonal)
            if chosen is None:
                continue
            current = {a.agent_id: _local_reward(a) for a in alive}
            predicted = dict(current)
            predicted[chosen.agent_id] = max(current[chosen.agent_id], 1.0 - soaring.progress)
            covered_area = sum(area.area for area in {a.area for a in alive})
            vacated = soaring.area.area / max(covered_area, 1e-9)
            recommendation = Recommendation(
                level=2,
                actions={chosen.agent_id: f"cover-{soaring.agent_id}"},
                predicted_local=predicted,
                global_reward=vacated,
                global_risk=_risk_count([chosen]),
                description=f"agent {chosen.agent_id} covers agent {soaring.agent_id}",
            )
            if not global_accept(recommendation, current, self.config):
                self._log(t, 2, [chosen.agent_id, soaring.agent_id], "substitution rejected")
                continue
            substitute(chosen, soaring)
            self._covered[soaring.agent_id] = chosen.agent_id
            self._log(t, 2, [chosen.agent_id, soaring.agent_id], "substitute")

    def _turn_over(self, agents: Sequence[AgentContext], maps: MapStore, priority: GridMap, t: float) -> None:
        completed = [
            a for a in agents if a.alive and a.completed and a.substitution is None and a.soar_state.is_sub_mission
        ]
        if not completed:
            return
        decisions = coordinate_level3(completed, agents, maps, priority, self.config, self.region_diagonal)
        by_id = {a.agent_id: a for a in agents}
        busy: Set[int] = set()
        for decision in decisions:
            agent = by_id[decision.agent_id]
            if decision.agent_id in busy:
                continue
            if decision.option == Level3Option.SWAP and decision.partner not in busy:
                partner = by_id[decision.partner]
                agent.area, partner.area = partner.area, agent.area
                own_index, partner_index = agent.task.area_index, partner.task.area_index
                agent.task = dataclasses.replace(agent.task, area_index=partner_index)
                partner.task = dataclasses.replace(partner.task, area_index=own_index)
                self.replan(agent)
                self.replan(partner)
                busy.update({agent.agent_id, partner.agent_id})
                self._log(t, 3, [agent.agent_id, partner.agent_id], "swap")
                continue
            if decision.option == Level3Option.NEW_MISSION:
                agent.task = _new_task(agent.task)
            self.replan(agent)
            busy.add(agent.agent_id)
            note = "" if decision.accepted else " (recommendation rejected)"
            self._log(t, 3, [agent.agent_id], f"{Level3Option.REPEAT.value if decision.option == Level3Option.SWAP else decision.option.value}{note}")

    def tick(self, agents: Sequence[AgentContext], maps: MapStore, priority: GridMap, t: float) -> None:
        """Run release, level-2 substitution and level-3 turnover for this tick."""
        self._release_finished(agents, t)
        self._substitute_soaring(agents, t)
        self._turn_over(agents, maps, priority, t)
