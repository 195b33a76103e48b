"""The deterministic tick loop of one mission."""

import dataclasses
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np

from soarsim.agents.behavior import advance_agent, apply_policy_filter
from soarsim.agents.context import AgentContext, SpeedProfile, Thresholds
from soarsim.agents.models import FlightMode, FlightModel, SubMissionKind
from soarsim.agents.tasks import SubMission, plan_waypoints, random_sub_mission
from soarsim.config import Settings
from soarsim.control import Autopilot, PidGains, load_gains
from soarsim.coordination import GlobalManager, ManagerConfig, ManagerPlacement, set_manager
from soarsim.environment import (
    Environment,
    EnvironmentEvent,
    SpawnRanges,
    create_environment,
    step_environment,
    updraft_at,
)
from soarsim.errors import InvariantBreach
from soarsim.maps import MapStore, apply_decay, build_priority_map
from soarsim.metrics import (
    F1Accumulator,
    MissionLog,
    ObjectiveScores,
    RunSummary,
    TrackRecord,
    check_constraints,
    event_row,
    objective_f1,
    objective_f2,
    objective_f3,
    summarize,
)
from soarsim.planning import CoverageMode, SubArea, assign_areas
from soarsim.vehicle import AirframeParams, best_glide_speed, load_airframe, speed_to_fly, trim_glide
from soarsim.vehicle.models import UavState

logger = logging.getLogger(__name__)

# Expected climb (m/s) the cruise speed-to-fly is tuned for.
CRUISE_CLIMB = 1.0


@dataclass
class SeedStreams:
    """Independent random streams derived from the scenario seed."""

    env: np.random.Generator
    policy: np.random.Generator
    planner: np.random.Generator
    tuner: np.random.Generator

    @classmethod
    def from_seed(cls, seed: int) -> "SeedStreams":
        env, policy, planner, tuner = np.random.SeedSequence(seed).spawn(4)
        return cls(
            env=np.random.default_rng(env),
            policy=np.random.default_rng(policy),
            planner=np.random.default_rng(planner),
            tuner=np.random.default_rng(tuner),
        )


@dataclass
class MissionResult:
    settings: Settings
    log: MissionLog
    summary: RunSummary
    scores: ObjectiveScores
    online_f1: float
    agents: List[AgentContext]
    decision_rows: List[Dict] = field(default_factory=list)
    wall_clock_s: float = 0.0


def speed_profile(params: AirframeParams) -> SpeedProfile:
    """Thermal and cruise airspeeds under the cap that keeps R_min turns feasible."""
    # V / R_min must stay below psi_dot_max; keep 1 m/s of margin.
    v_cap = min(params.V_a_max, params.psi_dot_max * params.R_min - 1.0)
    if v_cap <= params.V_a_min:
        v_cap = params.V_a_max
    thermal = min(best_glide_speed(params), v_cap)
    cruise = speed_to_fly(params, CRUISE_CLIMB, v_cap=v_cap)
    return SpeedProfile(thermal=thermal, cruise=max(cruise, thermal), v_cap=v_cap)


def spawn_ranges(settings: Settings) -> SpawnRanges:
    env = settings.environment
    return SpawnRanges(
        radius=(env.updraft_radius_min, env.updraft_radius_max),
        strength=(env.updraft_strength_min, env.updraft_strength_max),
        lifecycle=(env.updraft_lifecycle_min, env.updraft_lifecycle_max),
        target_duration=(env.target_duration_min, env.target_duration_max),
        updraft_rate_per_km2_h=env.updraft_rate_per_km2_h,
        target_rate_per_km2_h=env.target_rate_per_km2_h,
    )


def _autopilot_gains(settings: Settings) -> PidGains:
    path = settings.gains_path
    if path is None:
        logger.info("Flying the 6-DOF plant with default autopilot gains")
        return PidGains()
    logger.info(f"Flying the 6-DOF plant with gains from {path}")
    return load_gains(path)


def launch_agents(
    settings: Settings,
    params: AirframeParams,
    areas: List[SubArea],
    shared_maps: MapStore,
) -> List[AgentContext]:
    """
    Agents spread along the lower edge, heading into the region.

    With the 6-DOF flight model every agent starts from the glide trim at
    cruise speed and gets its own autopilot.

    Raises:
        ConfigError: Unreadable or malformed gains file
    """
    region = settings.region_obj
    thresholds = Thresholds.from_settings(settings)
    speeds = speed_profile(params)
    n_u = settings.run.n_u
    x0, y0 = region.lower_bound
    six_dof = settings.vehicle.model == FlightModel.SIX_DOF
    gains = _autopilot_gains(settings) if six_dof else None
    if six_dof:
        start, _ = trim_glide(params, speeds.cruise, z=settings.agents.initial_altitude)
    else:
        start = UavState(V_a=speeds.cruise, z=settings.agents.initial_altitude)
    agents = []
    for i in range(n_u):
        uav = dataclasses.replace(
            start,
            psi=math.pi / 2,
            x=x0 + (i + 1) * region.width / (n_u + 1),
            y=y0 + thresholds.boundary_margin,
            battery_wh=params.battery_capacity_wh,
        )
        own = MapStore.empty(region, settings.maps.cell_size, settings.maps.merge_radius)
        agents.append(
            AgentContext(
                agent_id=i,
                uav=uav,
                area=areas[i],
                task=SubMission(SubMissionKind.SURVEILLANCE, CoverageMode.SWEEP, area_index=i),
                region=region,
                thresholds=thresholds,
                maps=apply_policy_filter(settings.run.policy, shared_maps, own),
                speeds=speeds,
                battery_capacity_wh=params.battery_capacity_wh,
                autopilot=Autopilot(gains, params) if gains is not None else None,
            )
        )
    return agents


def _replanner(rng: np.random.Generator) -> Callable[[AgentContext], None]:
    def replan(agent: AgentContext) -> None:
        th = agent.thresholds
        priority = build_priority_map(agent.maps.lift_prob, agent.maps.mission.records.values())
        waypoints = plan_waypoints(
            agent.task,
            agent.area,
            agent.uav.xy,
            agent.uav.psi,
            th.coverage_width,
            priority,
            th.local_radius,
            th.exploration_destinations,
            th.boundary_margin,
            rng,
        )
        agent.set_waypoints(waypoints)
        logger.debug(f"Agent {agent.agent_id} planned {len(waypoints)} waypoints for {agent.task.mode.value}")

    return replan


def _check_invariants(agents: List[AgentContext], k: int) -> None:
    for agent in agents:
        if not agent.alive:
            continue
        if not agent.uav.is_finite():
            raise InvariantBreach("non-finite vehicle state", tick=k, agent_id=agent.agent_id)
        if agent.uav.battery_wh < 0.0:
            raise InvariantBreach("negative battery energy", tick=k, agent_id=agent.agent_id)
        if agent.uav.z <= 0.0:
            raise InvariantBreach(f"altitude {agent.uav.z:.1f} m at or below ground", tick=k, agent_id=agent.agent_id)


def _record(agent: AgentContext, env: Environment, t: float, mode: FlightMode) -> TrackRecord:
    """Agent at the end of a tick; mode is the flight mode it flew the tick in."""
    uav = agent.uav
    updraft = updraft_at(env, uav.xy, t) if agent.soar_state.is_orbit else None
    return TrackRecord(
        t=t,
        agent_id=agent.agent_id,
        x=uav.x,
        y=uav.y,
        z=uav.z,
        V_a=uav.V_a,
        bank=uav.mu,
        mode=mode.value,
        soar_state=agent.soar_state.value,
        battery_wh=uav.battery_wh,
        detected=agent.detected,
        lift_id=agent.target_lift if agent.target_lift is not None else -1,
        updraft_id=updraft.id if updraft is not None else -1,
    )


def run_mission(settings: Settings, params: Optional[AirframeParams] = None) -> MissionResult:
    """
    Run one mission from launch to the configured duration.

    Each tick the environment advances first, every alive agent then decides
    and flies against the same start-of-tick peer snapshot, and finally the
    manager coordinates and the lift maps decay. The run ends early when
    every agent has landed.

    Args:
        settings: Validated scenario
        params: Airframe (loaded from settings.run.airframe when None)

    Returns:
        Log, summary and objective scores of the run

    Raises:
        InvariantBreach: A runtime invariant failed; carries tick and agent
    """
    started = time.perf_counter()
    params = params or load_airframe(settings.airframe_path)
    run = settings.run
    region = settings.region_obj
    streams = SeedStreams.from_seed(run.seed)
    logger.info(
        f"Starting mission: seed={run.seed} policy={run.policy.value} n_u={run.n_u} "
        f"duration={run.duration_min} min"
    )

    env_events: List[EnvironmentEvent] = []
    env = create_environment(
        region,
        streams.env,
        ranges=spawn_ranges(settings),
        phases=settings.phases,
        max_updraft_count=settings.environment.max_updraft_count,
        rng_seed=run.seed,
        initial_population=settings.environment.initial_population,
        events=env_events,
    )

    areas = assign_areas(settings.effective_roi_rho, run.n_u, region)
    shared_maps = MapStore.empty(region, settings.maps.cell_size, settings.maps.merge_radius)
    agents = launch_agents(settings, params, areas, shared_maps)
    replan = _replanner(streams.planner)

    manager: Optional[GlobalManager] = None
    config = ManagerConfig.from_settings(settings)
    if run.policy.coordinated:
        diagonal = math.hypot(region.width, region.height)
        manager = GlobalManager(config, areas, diagonal, replan)
        set_manager(manager)
        manager.assign_initial(agents, streams.policy)
    else:
        for agent in agents:
            agent.task = random_sub_mission(streams.policy, agent.task.area_index)
            agent.set_state(agent.task.state, 0.0)
            replan(agent)

    log = MissionLog(
        region=region,
        n_agents=run.n_u,
        tick=run.tick,
        battery_capacity_wh=params.battery_capacity_wh,
        mass=params.m,
        g=params.g,
        fov=agents[0].thresholds.fov,
    )
    log.register(env)
    accumulator = F1Accumulator(settings.agents.tau_t, run.tick)
    decision_rows: Optional[List[Dict]] = [] if run.debug_decisions else None
    lift_maps = {id(a.maps.lift): a.maps.lift for a in agents}
    leader_lost = False

    for k in range(settings.ticks):
        t = k * run.tick
        t_end = t + run.tick
        env = step_environment(env, t_end, streams.env, env_events)
        log.register(env)

        peers = [a.snapshot() for a in agents]
        detections: Dict[int, List[int]] = {}
        for agent in agents:
            if not agent.alive:
                continue
            mode = agent.flight_mode
            detections[agent.agent_id] = advance_agent(
                agent, env, peers, t, params, run.tick, run.dynamics_dt, decision_rows
            )
            log.append(_record(agent, env, t_end, mode))
        accumulator.update([tg.id for tg in env.active_targets], detections)
        _check_invariants(agents, k)

        if manager is not None and not leader_lost and config.placement == ManagerPlacement.LEADER_AGENT:
            if not agents[0].alive:
                leader_lost = True
                logger.warning(f"t={t_end:.0f} leader agent landed, agents continue without a manager")
        if manager is not None and not leader_lost:
            priority = build_priority_map(shared_maps.lift_prob, shared_maps.mission.records.values())
            manager.tick(agents, shared_maps, priority, t_end)
        else:
            for agent in agents:
                if agent.alive and agent.completed and agent.soar_state.is_sub_mission:
                    agent.task = random_sub_mission(streams.policy, agent.task.area_index)
                    replan(agent)

        for lift_map in lift_maps.values():
            apply_decay(lift_map, t_end, settings.maps.c_max)

        if not any(a.alive for a in agents):
            logger.info(f"All agents landed at t={t_end:.0f} s")
            break

    log.add_events(event_row(e) for e in env_events)
    if manager is not None:
        log.add_events(e.to_row() for e in manager.events)
        set_manager(None)

    report = check_constraints(log, params, settings.agents.battery_reserve, settings.metrics.comm_range)
    f1 = objective_f1(log, settings.agents.tau_t)
    if not math.isclose(f1, accumulator.score, rel_tol=1e-6, abs_tol=1e-9):
        raise InvariantBreach(f"offline detection score {f1} differs from online {accumulator.score}")
    scores = ObjectiveScores(
        f1=f1,
        f2=objective_f2(log, settings.agents.battery_reserve),
        f3=objective_f3(log, settings.metrics.lam),
        constraint_violations=report.violations,
    )
    summary = summarize(log)
    summary.objectives = {"f1": scores.f1, "f2": scores.f2, "f3": scores.f3}
    summary.constraint_violations = dict(report.violations)
    elapsed = time.perf_counter() - started
    logger.info(
        f"Mission done in {elapsed:.1f} s: {summary.unique_targets} targets, "
        f"F1={scores.f1:.2f} F2={scores.f2:.3f} h F3={scores.f3:.1f}"
    )
    return MissionResult(
        settings=settings,
        log=log,
        summary=summary,
        scores=scores,
        online_f1=accumulator.score,
        agents=agents,
        decision_rows=decision_rows or [],
        wall_clock_s=elapsed,
    )
