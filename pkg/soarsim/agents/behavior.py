"""
Per-tick agent behavior.

Each tick an agent first checks for conflicts, then runs the handler of its
current state, which may move it along one legal edge and returns the
guidance command for the tick. advance_agent wraps the decision, the flight
model and the post-flight sensing and map updates.
"""

import dataclasses
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from soarsim.agents.context import AgentContext, PeerState
from soarsim.agents.flight import flight_mode_switch, fly_tick, six_dof_tick
from soarsim.agents.models import CONTINUE, FlightMode, PolicyKind, SoarState
from soarsim.agents.sensing import detect_targets, lift_encounter_test
from soarsim.agents.soaring import (
    OrbitTracker,
    exploit_controller,
    first_turn_controller,
    goto_command,
    orbit_command,
    orbit_radius,
    turn_rate_limit,
)
from soarsim.control.models import CommandSet
from soarsim.coordination.crowding import crowding_check, lift_occupants
from soarsim.decision import ActionCandidate, CandidateKind, DecisionMatrix, decision_rows, select_action
from soarsim.environment.models import Environment, Point2
from soarsim.errors import TrappedError
from soarsim.maps.grids import record_lift_detection
from soarsim.maps.lift import decay_weight, forget_lift, mark_entered, record_lift
from soarsim.maps.mission import update_mission_map
from soarsim.maps.models import LiftMap, LiftRecord
from soarsim.maps.store import MapStore
from soarsim.planning import Horizon, PlannerLimits, hwh_plan
from soarsim.vehicle.aero import max_thrust
from soarsim.vehicle.models import AirframeParams

logger = logging.getLogger(__name__)

REWARD_COLUMNS = ("energy_gain", "detection_gain", "distance_cost", "battery_cost", "risk")
REWARD_MAXIMIZE = (True, True, False, False, False)
MAX_CHASE_ORBITS = 2


@dataclass
class TickInputs:
    """Read-only inputs an agent sees during one tick."""

    env: Environment
    peers: Sequence[PeerState]
    t: float
    params: AirframeParams
    tick: float = 1.0
    decision_log: Optional[list] = None


def apply_policy_filter(policy: PolicyKind, shared_maps: MapStore, own_maps: MapStore) -> MapStore:
    """
    The maps an agent reads and writes under a policy.

    Proposed policies use the shared store; semi-cooperative agents share
    only the lift map; non-cooperative agents keep their own maps; the
    zero-knowledge baseline has a disabled lift map.
    """
    if policy in (PolicyKind.PROPOSED_SPLIT, PolicyKind.PROPOSED_SHARED):
        return shared_maps
    if policy == PolicyKind.SEMI_COOPERATIVE:
        return MapStore(lift=shared_maps.lift, lift_prob=own_maps.lift_prob, mission=own_maps.mission)
    if policy == PolicyKind.NON_COOPERATIVE:
        return own_maps
    return MapStore(
        lift=LiftMap(merge_radius=own_maps.lift.merge_radius, enabled=False),
        lift_prob=own_maps.lift_prob,
        mission=own_maps.mission,
    )


def _safe_center(agent: AgentContext, center: Point2, radius: float) -> Point2:
    """Keep an orbit of this radius clear of the region boundary."""
    return agent.region.clamp(center[0], center[1], radius + agent.thresholds.boundary_margin / 2.0)


def _left_center(agent: AgentContext, radius: float) -> Point2:
    """Centre of a counterclockwise circle through the current position."""
    psi = agent.uav.psi
    return (agent.uav.x - radius * math.sin(psi), agent.uav.y + radius * math.cos(psi))


def _rate_limit(agent: AgentContext, params: AirframeParams) -> float:
    return turn_rate_limit(agent.uav.V_a, params.psi_dot_max, params.R_min)


def _hold(agent: AgentContext) -> CommandSet:
    return CommandSet(psi_cmd=agent.uav.psi, z_cmd=agent.uav.z, Va_cmd=agent.uav.V_a)


def _peer_distance(agent: AgentContext, peer: PeerState) -> Tuple[float, float]:
    horizontal = math.hypot(peer.position[0] - agent.uav.x, peer.position[1] - agent.uav.y)
    return horizontal, abs(peer.position[2] - agent.uav.z)


def safety_threats(agent: AgentContext, peers: Sequence[PeerState]) -> List[PeerState]:
    """Peers inside the inflated safety disc and altitude band."""
    th = agent.thresholds
    threats = []
    for peer in peers:
        if peer.agent_id == agent.agent_id or not peer.alive:
            continue
        horizontal, vertical = _peer_distance(agent, peer)
        if horizontal <= th.r_safe * th.rho_factor and vertical < th.altitude_separation:
            threats.append(peer)
    return threats


def _near_boundary(agent: AgentContext) -> bool:
    return not agent.region.contains(agent.uav.x, agent.uav.y, agent.thresholds.boundary_margin / 2.0)


def _abort_orbit(agent: AgentContext, t: float) -> None:
    if agent.orbit is not None:
        logger.debug(f"t={t:.0f} agent {agent.agent_id}: {agent.soar_state.value} aborted by safety")
    agent.orbit = None
    agent.target_lift = None
    agent.orbits_flown = 0
    agent.soar_cooldown_until = t + agent.thresholds.delta_l


def resume_sub_mission(agent: AgentContext, t: float) -> SoarState:
    agent.orbit = None
    agent.target_lift = None
    agent.orbits_flown = 0
    agent.release_requested = False
    agent.set_state(agent.task.state, t)
    return agent.soar_state


def _reject(agent: AgentContext, t: float) -> SoarState:
    if agent.target_lift is not None:
        agent.rejected_lifts[agent.target_lift] = t + 2.0 * agent.thresholds.delta_l
    agent.soar_cooldown_until = t + agent.thresholds.delta_l
    return resume_sub_mission(agent, t)


def _leave_soaring(agent: AgentContext, maps: MapStore, t: float, reason: str) -> SoarState:
    if agent.target_lift is not None:
        mark_entered(maps.lift, agent.target_lift, t)
    agent.soar_cooldown_until = t + agent.thresholds.delta_l
    logger.debug(f"t={t:.0f} agent {agent.agent_id} leaves lift: {reason}")
    return resume_sub_mission(agent, t)


def _start_orbit(agent: AgentContext, center: Point2, radius: float, state: SoarState, t: float) -> None:
    agent.orbit = OrbitTracker(center=_safe_center(agent, center, radius), radius=radius, direction=1)
    agent.orbits_flown = 0
    agent.set_state(state, t)


def _crowding_ok(agent: AgentContext, center: Point2, peers: Sequence[PeerState]) -> bool:
    th = agent.thresholds
    return crowding_check(
        center,
        peers,
        agent.uav.z,
        capacity=th.updraft_capacity,
        altitude_separation=th.altitude_separation,
        radius=th.search_orbit_radius,
        exclude=agent.agent_id,
    )


def _may_start_soaring(agent: AgentContext, t: float) -> bool:
    th = agent.thresholds
    return t >= agent.soar_cooldown_until and agent.uav.z < th.z_max - 2.0 * th.altitude_tolerance


# ---------------------------------------------------------------- decisions


def reward_row(agent: AgentContext, candidate: ActionCandidate, peers: Sequence[PeerState]) -> np.ndarray:
    """
    Short-term rewards of a candidate, each in [0, 1].

    Continuing the sub-mission earns detection gain and pays the engine time
    a low agent will need; going to a mapped lift earns the expected altitude
    gain and pays distance, the worst-case engine time if the lift is gone
    and the crowding risk. A predicted lift visit after the next waypoint
    earns detection gain for the share of the route flown on the sub-mission.
    """
    th = agent.thresholds
    z = agent.uav.z
    band = th.z_threshold - th.z_min
    if candidate.payload is None:
        battery = min(max((th.z_threshold - z) / band, 0.0), 1.0)
        return np.array([0.0, 1.0, 0.0, battery, 0.0])
    record, distance, *on_task = candidate.payload
    detection = on_task[0] / distance if on_task and distance > 0 else 0.0
    sink = max(-agent.expected_rate, 0.3)
    z_arrival = z - sink * distance / agent.speeds.cruise
    gain = (th.z_max - max(z_arrival, th.z_min)) / (th.z_max - th.z_min)
    energy = min(max(gain, 0.0), 1.0) * record.weight
    battery = min(max((th.z_min - z_arrival) / band, 0.0), 1.0)
    occupants = lift_occupants(record.estimated_center, peers, th.search_orbit_radius, exclude=agent.agent_id)
    risk = min(len(occupants) / th.updraft_capacity, 1.0)
    return np.array([energy, min(detection, 1.0), min(distance / th.delta_map, 1.0), battery, risk])


def local_decide(
    agent: AgentContext,
    candidates: Sequence[ActionCandidate],
    peers: Sequence[PeerState] = (),
    recommendation: Optional[str] = None,
    tick: int = 0,
    decision_log: Optional[list] = None,
) -> ActionCandidate:
    """
    Pick an action by rational choice over the reward columns.

    A manager recommendation naming one of the candidates is followed unless
    the agent is critical, in which case the local choice stands.

    Raises:
        ValueError: No candidates
    """
    if not candidates:
        raise ValueError("local decision needs at least one candidate")
    if recommendation is not None and not agent.critical:
        for candidate in candidates:
            if candidate.id == recommendation:
                return candidate
    if len(candidates) == 1:
        return candidates[0]
    matrix = DecisionMatrix(
        values=np.vstack([reward_row(agent, c, peers) for c in candidates]),
        maximize=REWARD_MAXIMIZE,
        candidates=list(candidates),
    )
    chosen = select_action(matrix)
    if decision_log is not None:
        decision_log.extend(decision_rows(tick, agent.agent_id, matrix, chosen))
    return candidates[chosen]


def lift_candidates(agent: AgentContext, maps: MapStore, peers: Sequence[PeerState], t: float) -> List[Tuple[LiftRecord, float]]:
    """
    Mapped lifts worth a detour, nearest first.

    A lift qualifies when it is within gliding reach, not rejected and not
    crowded, and any one of three triggers holds: it is within delta_map,
    it has gone unvisited for delta_l, or the agent needs lift.
    """
    if not maps.lift.enabled or not len(maps.lift):
        return []
    th = agent.thresholds
    x, y, z = agent.uav.position
    reach = _glide_reach(agent)
    needs_lift = agent.lift_needed or z <= th.z_threshold
    found = []
    for record in maps.lift:
        if record.weight <= 0.0 or agent.rejected_lifts.get(record.lift_id, -math.inf) > t:
            continue
        d = math.hypot(record.estimated_center[0] - x, record.estimated_center[1] - y)
        if d > reach:
            continue
        near = d <= th.delta_map
        unvisited = t - record.last_entered >= th.delta_l
        if not (near or unvisited or needs_lift):
            continue
        if not _crowding_ok(agent, record.estimated_center, peers):
            continue
        found.append((record, d))
    found.sort(key=lambda item: (item[1], item[0].lift_id))
    return found


def _glide_reach(agent: AgentContext) -> float:
    sink = max(-agent.expected_rate, 0.3)
    return max(agent.uav.z - agent.thresholds.z_min, 0.0) * agent.speeds.cruise / sink


def soaring_candidates(agent: AgentContext, lifts: Sequence[Tuple[LiftRecord, float]], t: float) -> List[ActionCandidate]:
    """
    Decision rows for a sub-mission agent that knows of qualifying lifts.

    Available actions come first: continuing (unless the agent is at or
    below the threshold altitude) and a direct visit to each lift. Then, when
    continuing is possible and a waypoint is queued, one predicted action
    per lift: reach the waypoint first and take the lift afterwards, with
    its weight forecast at the later arrival time.
    """
    th = agent.thresholds
    can_continue = agent.uav.z > th.z_threshold
    candidates = [ActionCandidate(CONTINUE)] if can_continue else []
    candidates += [ActionCandidate(f"lift-{rec.lift_id}", payload=(rec, d)) for rec, d in lifts]
    if not can_continue or not agent.waypoints:
        return candidates
    waypoint = agent.waypoints[0]
    leg = math.dist(agent.uav.xy, waypoint)
    reach = _glide_reach(agent)
    for record, _ in lifts:
        route = leg + math.dist(waypoint, record.estimated_center)
        if route > reach:
            continue
        arrival = t + route / agent.speeds.cruise
        forecast = dataclasses.replace(record, weight=decay_weight(arrival - record.first_seen, th.lift_memory))
        if forecast.weight <= 0.0:
            continue
        candidates.append(
            ActionCandidate(f"later-lift-{record.lift_id}", kind=CandidateKind.PREDICTED, payload=(forecast, route, leg))
        )
    return candidates


# ---------------------------------------------------------------- state handlers


def _follow_waypoints(agent: AgentContext, inputs: TickInputs) -> CommandSet:
    th = agent.thresholds
    while agent.waypoints and math.dist(agent.waypoints[0], agent.uav.xy) <= th.arrival_radius:
        agent.waypoints.popleft()
    rate_limit = _rate_limit(agent, inputs.params)
    if not agent.waypoints:
        # Idle circle until a new sub-mission arrives.
        center = _safe_center(agent, _left_center(agent, th.search_orbit_radius), th.search_orbit_radius)
        return orbit_command(agent.uav, center, th.search_orbit_radius, 1, agent.speeds.thermal, rate_limit)
    return goto_command(agent.uav, agent.waypoints[0], agent.speeds.cruise, rate_limit)


def _sub_mission(agent: AgentContext, maps: MapStore, inputs: TickInputs) -> CommandSet:
    th, t = agent.thresholds, inputs.t
    if agent.soar_state != agent.task.state:
        agent.set_state(agent.task.state, t)
    if _may_start_soaring(agent, t):
        if lift_encounter_test(agent, agent.climb_rate, th.sigma_u, maps.lift):
            center = _left_center(agent, orbit_radius(agent, inputs.params.R_min))
            if _crowding_ok(agent, center, inputs.peers):
                _start_orbit(agent, center, orbit_radius(agent, inputs.params.R_min), SoarState.FIRST_TURN, t)
                return first_turn_controller(agent, agent.orbit.center, inputs.params.R_min, inputs.params.psi_dot_max)
        lifts = lift_candidates(agent, maps, inputs.peers, t)
        if lifts:
            chosen = local_decide(
                agent,
                soaring_candidates(agent, lifts, t),
                inputs.peers,
                recommendation=agent.recommendation,
                tick=int(t),
                decision_log=inputs.decision_log,
            )
            # A predicted visit keeps the agent on its sub-mission this tick.
            if chosen.kind == CandidateKind.AVAILABLE and chosen.payload is not None:
                agent.target_lift = chosen.payload[0].lift_id
                agent.set_state(SoarState.GO_TO_MAPPED_LIFT, t)
                return goto_command(
                    agent.uav, chosen.payload[0].estimated_center, agent.speeds.cruise, _rate_limit(agent, inputs.params)
                )
    return _follow_waypoints(agent, inputs)


def _go_to_mapped_lift(agent: AgentContext, maps: MapStore, inputs: TickInputs) -> CommandSet:
    th, t, params = agent.thresholds, inputs.t, inputs.params
    record = maps.lift.records.get(agent.target_lift) if agent.target_lift is not None else None
    if record is None:
        resume_sub_mission(agent, t)
        return _follow_waypoints(agent, inputs)
    radius = orbit_radius(agent, params.R_min)
    if lift_encounter_test(agent, agent.climb_rate, th.sigma_u, maps.lift):
        agent.target_lift = None
        _start_orbit(agent, _left_center(agent, radius), radius, SoarState.FIRST_TURN, t)
        return first_turn_controller(agent, agent.orbit.center, params.R_min, params.psi_dot_max)
    center = record.estimated_center
    if math.dist(center, agent.uav.xy) <= th.arrival_radius:
        mark_entered(maps.lift, record.lift_id, t)
        if agent.climb_rate - agent.expected_rate > th.sigma_u:
            _start_orbit(agent, center, radius, SoarState.FIRST_TURN, t)
            return first_turn_controller(agent, agent.orbit.center, params.R_min, params.psi_dot_max)
        _start_orbit(agent, center, th.search_orbit_radius, SoarState.SEARCHING_ORBIT, t)
        return orbit_command(
            agent.uav, agent.orbit.center, th.search_orbit_radius, 1, agent.speeds.thermal, _rate_limit(agent, params)
        )
    return goto_command(agent.uav, center, agent.speeds.cruise, _rate_limit(agent, params))


def _searching_orbit(agent: AgentContext, maps: MapStore, inputs: TickInputs) -> CommandSet:
    th, t, params = agent.thresholds, inputs.t, inputs.params
    if agent.climb_rate - agent.expected_rate > th.sigma_u:
        radius = orbit_radius(agent, params.R_min)
        _start_orbit(agent, _left_center(agent, radius), radius, SoarState.FIRST_TURN, t)
        return first_turn_controller(agent, agent.orbit.center, params.R_min, params.psi_dot_max)
    if agent.orbit.complete:
        if agent.target_lift is not None:
            logger.debug(f"t={t:.0f} agent {agent.agent_id}: lift {agent.target_lift} not found, forgetting it")
            forget_lift(maps.lift, agent.target_lift)
        agent.soar_cooldown_until = t + th.delta_l
        resume_sub_mission(agent, t)
        return _follow_waypoints(agent, inputs)
    return orbit_command(
        agent.uav, agent.orbit.center, agent.orbit.radius, agent.orbit.direction, agent.speeds.thermal, _rate_limit(agent, params)
    )


def _first_turn(agent: AgentContext, maps: MapStore, inputs: TickInputs) -> CommandSet:
    th, t, params = agent.thresholds, inputs.t, inputs.params
    if not agent.orbit.complete:
        return first_turn_controller(agent, agent.orbit.center, params.R_min, params.psi_dot_max)
    evaluation = agent.orbit.evaluate()
    if evaluation.w_c > 0.0:
        record_lift_detection(maps.lift_prob, *evaluation.center)
    rejected = evaluation.w_c < 0.0 or not _crowding_ok(agent, evaluation.center, inputs.peers)
    logger.debug(
        f"t={t:.0f} agent {agent.agent_id}: first turn w_c={evaluation.w_c:.2f} m/s"
        f"{' rejected' if rejected else ''}"
    )
    radius = orbit_radius(agent, params.R_min)
    if not rejected and evaluation.w_c >= th.w_c_min:
        record = record_lift(maps.lift, evaluation.center, evaluation.w_c, t)
        agent.target_lift = record.lift_id if record is not None else None
        agent.orbit.restart(_safe_center(agent, evaluation.center, radius))
        agent.set_state(SoarState.EXPLOIT, t)
        return exploit_controller(agent, agent.orbit.center, agent.e_ddot, params.R_min, params.psi_dot_max)
    if not rejected and agent.lift_needed:
        agent.orbit.restart(_safe_center(agent, evaluation.strongest, radius))
        agent.orbits_flown = 0
        agent.set_state(SoarState.CHASE_LIFT, t)
        return orbit_command(agent.uav, agent.orbit.center, radius, agent.orbit.direction, agent.speeds.thermal, _rate_limit(agent, params))
    _reject(agent, t)
    return _follow_waypoints(agent, inputs)


def _exploit(agent: AgentContext, maps: MapStore, inputs: TickInputs) -> CommandSet:
    th, t, params = agent.thresholds, inputs.t, inputs.params
    if agent.uav.z >= th.z_max:
        _leave_soaring(agent, maps, t, "ceiling reached")
        return _follow_waypoints(agent, inputs)
    if agent.release_requested:
        _leave_soaring(agent, maps, t, "released by manager")
        return _follow_waypoints(agent, inputs)
    if agent.orbit.complete:
        evaluation = agent.orbit.evaluate()
        if evaluation.w_c < 0.0:
            _leave_soaring(agent, maps, t, f"lift decayed to {evaluation.w_c:.2f} m/s")
            return _follow_waypoints(agent, inputs)
        record = record_lift(maps.lift, evaluation.center, evaluation.w_c, t)
        if record is not None:
            agent.target_lift = record.lift_id
        agent.orbit.restart(_safe_center(agent, evaluation.center, agent.orbit.radius))
    return exploit_controller(agent, agent.orbit.center, agent.e_ddot, params.R_min, params.psi_dot_max)


def _chase_lift(agent: AgentContext, maps: MapStore, inputs: TickInputs) -> CommandSet:
    th, t, params = agent.thresholds, inputs.t, inputs.params
    if agent.uav.z >= th.z_max or agent.release_requested:
        _leave_soaring(agent, maps, t, "ceiling reached" if agent.uav.z >= th.z_max else "released by manager")
        return _follow_waypoints(agent, inputs)
    radius = agent.orbit.radius
    if agent.orbit.complete:
        evaluation = agent.orbit.evaluate()
        agent.orbits_flown += 1
        if evaluation.w_c >= th.w_c_min:
            record = record_lift(maps.lift, evaluation.center, evaluation.w_c, t)
            agent.target_lift = record.lift_id if record is not None else agent.target_lift
            agent.orbit.restart(_safe_center(agent, evaluation.center, radius))
            agent.set_state(SoarState.EXPLOIT, t)
            return exploit_controller(agent, agent.orbit.center, agent.e_ddot, params.R_min, params.psi_dot_max)
        if evaluation.w_c < 0.0 or agent.orbits_flown >= MAX_CHASE_ORBITS or not agent.lift_needed:
            _reject(agent, t)
            return _follow_waypoints(agent, inputs)
        agent.orbit.restart(_safe_center(agent, evaluation.strongest, radius))
    return orbit_command(agent.uav, agent.orbit.center, radius, agent.orbit.direction, agent.speeds.thermal, _rate_limit(agent, params))


def _maintain_safety(agent: AgentContext, threats: Sequence[PeerState], inputs: TickInputs) -> CommandSet:
    """
    One receding-horizon hop past the threats, toward the current goal.

    Near the boundary the agent turns for the region centre. When the
    planner is trapped the agent turns hard away from the closest threat.
    """
    th, params = agent.thresholds, inputs.params
    rate_limit = _rate_limit(agent, params)
    center = agent.region.center
    if _near_boundary(agent) or not threats:
        return goto_command(agent.uav, center, agent.speeds.cruise, rate_limit)
    goal_xy = agent.waypoints[0] if agent.waypoints else center
    goal = (goal_xy[0], goal_xy[1], agent.uav.z)
    limits = PlannerLimits(
        v_min=params.V_a_min,
        v_max=agent.speeds.v_cap,
        psi_dot_max=rate_limit,
        r_safe=th.r_safe,
        rho_factor=th.rho_factor,
    )
    horizon = Horizon(length=th.horizon_length, duration=th.horizon_duration)
    hop: Optional[Tuple[float, ...]] = None
    speed = agent.speeds.cruise
    try:
        path = hwh_plan(
            agent.uav.position,
            goal,
            horizon,
            [p.as_obstacle() for p in threats],
            agent.region,
            agent.uav.V_a,
            inputs.tick,
            limits=limits,
            initial_heading=agent.uav.psi,
            max_hops=1,
        )
        if path.waypoints:
            hop, speed = path.waypoints[0], path.speeds[0]
    except TrappedError as e:
        if e.partial_path:
            hop = e.partial_path[0]
    except ValueError as e:
        logger.debug(f"Agent {agent.agent_id} avoidance skipped planner: {e}")
    if hop is None:
        nearest = min(threats, key=lambda p: _peer_distance(agent, p)[0])
        away = math.atan2(agent.uav.y - nearest.position[1], agent.uav.x - nearest.position[0])
        hop = (agent.uav.x + 50.0 * math.cos(away), agent.uav.y + 50.0 * math.sin(away))
    return goto_command(agent.uav, (hop[0], hop[1]), speed, rate_limit)


_HANDLERS = {
    SoarState.FOLLOW_COVERAGE_PLANNER: _sub_mission,
    SoarState.EXPLORE: _sub_mission,
    SoarState.GO_TO_MAPPED_LIFT: _go_to_mapped_lift,
    SoarState.SEARCHING_ORBIT: _searching_orbit,
    SoarState.FIRST_TURN: _first_turn,
    SoarState.EXPLOIT: _exploit,
    SoarState.CHASE_LIFT: _chase_lift,
}


def transition(
    agent: AgentContext, env: Environment, maps: MapStore, peers: Sequence[PeerState], t: float, params: AirframeParams, tick: float = 1.0, decision_log: Optional[list] = None
) -> Tuple[SoarState, CommandSet]:
    """
    One behavior decision.

    Safety preempts everything: a peer inside the inflated safety disc or a
    boundary approach moves the agent to MaintainSafety, aborting any orbit
    without evaluation. Otherwise the handler of the current state runs.

    Returns:
        The agent's state after the decision and the guidance command
    """
    if not agent.alive:
        agent.set_state(SoarState.IDLE, t)
        return agent.soar_state, _hold(agent)
    inputs = TickInputs(env=env, peers=peers, t=t, params=params, tick=tick, decision_log=decision_log)
    agent.lift_needed = agent.uav.z <= agent.thresholds.lift_needed_altitude

    threats = safety_threats(agent, peers)
    if threats or _near_boundary(agent):
        if agent.soar_state.is_orbit or agent.soar_state == SoarState.GO_TO_MAPPED_LIFT:
            _abort_orbit(agent, t)
        agent.set_state(SoarState.MAINTAIN_SAFETY, t)
        return agent.soar_state, _maintain_safety(agent, threats, inputs)
    if agent.soar_state == SoarState.MAINTAIN_SAFETY:
        resume_sub_mission(agent, t)

    command = _HANDLERS[agent.soar_state](agent, maps, inputs)
    return agent.soar_state, command


def advance_agent(
    agent: AgentContext,
    env: Environment,
    peers: Sequence[PeerState],
    t: float,
    params: AirframeParams,
    tick: float = 1.0,
    dt: float = 0.1,
    decision_log: Optional[list] = None,
) -> List[int]:
    """
    Decide, fly one tick and sense.

    Returns:
        Ids of targets detected at the end of the tick
    """
    maps = agent.maps
    state, command = transition(agent, env, maps, peers, t, params, tick, decision_log)
    if not agent.alive:
        agent.detected = ()
        return []
    engine = agent.flight_mode == FlightMode.ENGINE
    if agent.autopilot is not None:
        uav, climb, expected = six_dof_tick(agent.uav, command, engine, env, t, params, tick, dt, agent.autopilot, max_thrust(params))
    else:
        uav, climb, expected = fly_tick(agent.uav, command, engine, env, t, params, tick, dt, agent.speeds.v_cap)
    agent.uav = uav
    agent.climb_rate = climb
    agent.expected_rate = expected
    agent.e_ddot = agent.energy.update(t + tick, uav).E_ddot
    if agent.orbit is not None and state.is_orbit:
        agent.orbit.record(uav, climb, expected)

    t_end = t + tick
    th = agent.thresholds
    detected = detect_targets(agent, env, t_end)
    targets = env.targets_by_id
    for target_id in detected:
        update_mission_map(maps.mission, target_id, targets[target_id].position, t_end, th.delta_t, th.tau_t, tick)
    agent.detected = tuple(detected)

    agent.flight_mode = flight_mode_switch(agent)
    if not agent.alive:
        if agent.soar_state.is_orbit:
            _abort_orbit(agent, t_end)
        agent.set_state(SoarState.IDLE, t_end)
    return detected
