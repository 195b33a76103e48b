"""Tests for the agent state machine, flight model and sensing."""

import dataclasses
import math

import numpy as np
import pytest

from soarsim.agents.behavior import (
    advance_agent,
    apply_policy_filter,
    lift_candidates,
    local_decide,
    reward_row,
    soaring_candidates,
    transition,
)
from soarsim.agents.context import PeerState, Thresholds
from soarsim.agents.flight import flight_mode_switch, fly_tick, point_mass_step, six_dof_tick
from soarsim.agents.models import CONTINUE, FlightMode, PolicyKind, SoarState, SubMissionKind, is_legal
from soarsim.agents.sensing import detect_targets, in_footprint, lift_encounter_test
from soarsim.agents.soaring import OrbitTracker, bank_for_rate, orbit_command
from soarsim.agents.tasks import DRAWN_MODES, SubMission, random_sub_mission
from soarsim.config import build_settings
from soarsim.control import Autopilot, CommandSet, PidGains
from soarsim.coordination.crowding import crowding_check
from soarsim.decision import ActionCandidate, CandidateKind
from soarsim.environment import Environment, Target
from soarsim.errors import IllegalTransitionError
from soarsim.maps import MapStore, record_lift
from soarsim.maps.models import LiftRecord
from soarsim.planning import CoverageMode
from soarsim.vehicle.aero import max_thrust, sink_rate
from soarsim.vehicle.dynamics import trim_glide
from soarsim.vehicle.models import UavState


@pytest.fixture
def env(square_region):
    return Environment(region=square_region)


def _completed_orbit(center, climb, expected=0.0):
    tracker = OrbitTracker(center=center, radius=40.0)
    tracker.turned = 2.0 * math.pi + 0.1
    tracker.samples = [(center[0], center[1] + 20.0, climb, climb - expected)]
    return tracker


def test_staying_put_is_always_legal():
    """Every state may stay where it is, Idle included."""
    for state in SoarState:
        assert is_legal(state, state)


def test_idle_is_terminal():
    """Nothing leaves Idle."""
    assert not any(is_legal(SoarState.IDLE, s) for s in SoarState if s != SoarState.IDLE)


def test_set_state_rejects_illegal_edge(make_agent):
    """A sub-mission cannot jump straight into exploiting."""
    agent = make_agent()
    with pytest.raises(IllegalTransitionError):
        agent.set_state(SoarState.EXPLOIT, 0.0)
    assert agent.soar_state == SoarState.FOLLOW_COVERAGE_PLANNER


def test_set_state_records_transition(make_agent):
    """Legal moves are appended to the transition history."""
    agent = make_agent()
    agent.set_state(SoarState.FIRST_TURN, 5.0)
    assert agent.transitions == [(5.0, SoarState.FOLLOW_COVERAGE_PLANNER, SoarState.FIRST_TURN)]


def test_policy_properties():
    """Only the proposed policies coordinate; zero knowledge has no lift map."""
    assert PolicyKind.PROPOSED_SPLIT.coordinated
    assert PolicyKind.PROPOSED_SHARED.shares_mission_map
    assert PolicyKind.SEMI_COOPERATIVE.shares_lift_map
    assert not PolicyKind.SEMI_COOPERATIVE.shares_mission_map
    assert not PolicyKind.NON_COOPERATIVE.shares_lift_map
    assert not PolicyKind.ZERO_KNOWLEDGE.has_lift_map


def test_thresholds_validation():
    """The threshold altitude must sit inside the operating band."""
    with pytest.raises(ValueError):
        Thresholds(z_threshold=100.0)
    assert Thresholds().lift_needed_altitude == pytest.approx(687.5)


def test_thresholds_sit_one_tolerance_inside_region():
    """Engine floor and soaring ceiling are the region limits moved in by the altitude tolerance."""
    settings = build_settings({"region.z_min": 150, "region.z_max": 900, "agents.altitude_tolerance": 40})
    thresholds = Thresholds.from_settings(settings)
    assert thresholds.z_min == pytest.approx(190.0)
    assert thresholds.z_max == pytest.approx(860.0)


def test_sub_mission_mode_must_match_kind():
    """Surveillance cannot explore and exploration cannot sweep."""
    with pytest.raises(ValueError):
        SubMission(SubMissionKind.SURVEILLANCE, CoverageMode.GLOBAL)
    with pytest.raises(ValueError):
        SubMission(SubMissionKind.EXPLORATION, CoverageMode.SWEEP)
    with pytest.raises(ValueError):
        SubMission(SubMissionKind.SURVEILLANCE, CoverageMode.SWEEP, direction=0)
    assert SubMission(SubMissionKind.EXPLORATION, CoverageMode.LOCAL).state == SoarState.EXPLORE


def test_random_sub_mission_is_seeded():
    """Equal seeds draw equal sub-missions, always from the drawable modes."""
    a = [random_sub_mission(np.random.default_rng(7), i) for i in range(5)]
    b = [random_sub_mission(np.random.default_rng(7), i) for i in range(5)]
    assert a == b
    assert all(m.mode in DRAWN_MODES for m in a)
    assert [m.area_index for m in a] == list(range(5))


def test_in_footprint():
    """A 90 degree camera at 100 m sees just under 100 m around it."""
    fov = math.radians(90.0)
    assert in_footprint(50.0, 50.0, 100.0, fov)
    assert not in_footprint(150.0, 0.0, 100.0, fov)


def test_detect_targets_sorted_and_active_only(make_agent, square_region):
    """Only active targets inside the footprint are reported, ascending."""
    env = Environment(
        region=square_region,
        active_targets=(
            Target(id=3, position=(560.0, 500.0), birth_time=0.0, duration=1000.0),
            Target(id=1, position=(450.0, 520.0), birth_time=0.0, duration=1000.0),
            Target(id=2, position=(900.0, 900.0), birth_time=0.0, duration=1000.0),
            Target(id=4, position=(500.0, 500.0), birth_time=100.0, duration=1000.0),
        ),
    )
    agent = make_agent()
    assert detect_targets(agent, env, 50.0) == [1, 3]
    agent.alive = False
    assert detect_targets(agent, env, 50.0) == []


def test_lift_encounter_test(make_agent):
    """Climb above expectation counts unless the lift is already mapped."""
    agent = make_agent()
    agent.expected_rate = -0.5
    assert lift_encounter_test(agent, 0.0, 0.2, agent.maps.lift)
    assert not lift_encounter_test(agent, -0.5, 0.2, agent.maps.lift)
    record_lift(agent.maps.lift, (510.0, 500.0), 1.0, 0.0)
    assert not lift_encounter_test(agent, 0.0, 0.2, agent.maps.lift)


def test_flight_mode_hysteresis(make_agent):
    """Engine starts at the floor and keeps running until the threshold altitude."""
    agent = make_agent(z=500.0)
    assert flight_mode_switch(agent) == FlightMode.GLIDE
    agent.uav = UavState(z=220.0, battery_wh=50.0)
    assert flight_mode_switch(agent) == FlightMode.ENGINE
    agent.uav = UavState(z=300.0, battery_wh=50.0)
    agent.flight_mode = FlightMode.ENGINE
    assert flight_mode_switch(agent) == FlightMode.ENGINE
    agent.flight_mode = FlightMode.GLIDE
    assert flight_mode_switch(agent) == FlightMode.GLIDE


def test_flight_mode_grounds_agent_below_reserve(make_agent):
    """Below the battery reserve the agent lands and never runs the engine."""
    agent = make_agent(z=220.0, battery_wh=4.0)
    assert flight_mode_switch(agent) == FlightMode.GLIDE
    assert not agent.alive


def test_point_mass_glide_sinks_at_polar_rate(airframe):
    """Straight gliding loses the polar sink rate and no battery."""
    state = UavState(V_a=12.0, z=500.0, battery_wh=50.0)
    new, expected = point_mass_step(state, CommandSet(Va_cmd=12.0), False, 0.0, airframe, 1.0, 14.0)
    sink = sink_rate(airframe, 12.0, 0.0)
    assert expected == pytest.approx(-sink)
    assert new.z == pytest.approx(500.0 - sink)
    assert new.x == pytest.approx(12.0 * math.cos(new.gamma))
    assert new.battery_wh == 50.0


def test_point_mass_engine_and_wind(airframe):
    """The engine climbs at its rated rate and vertical wind adds on top."""
    state = UavState(V_a=12.0, z=500.0, battery_wh=50.0)
    new, expected = point_mass_step(state, CommandSet(Va_cmd=12.0), True, 0.5, airframe, 1.0, 14.0)
    assert expected == pytest.approx(airframe.engine_climb_rate)
    assert new.z == pytest.approx(500.0 + airframe.engine_climb_rate + 0.5)
    assert new.battery_wh == pytest.approx(50.0 - airframe.engine_power_w / 3600.0)


def test_point_mass_turn_rate_capped(airframe):
    """A steep bank command is limited to V / R_min."""
    state = UavState(V_a=12.0, z=500.0)
    new, _ = point_mass_step(state, CommandSet(phi_cmd=1.2, Va_cmd=12.0), False, 0.0, airframe, 1.0, 14.0)
    assert new.r == pytest.approx(0.6)
    assert new.psi == pytest.approx(0.6)


def test_point_mass_airspeed_capped(airframe):
    """Commanded speed above the cap is clipped."""
    state = UavState(V_a=14.0, z=500.0)
    new, _ = point_mass_step(state, CommandSet(Va_cmd=25.0), False, 0.0, airframe, 1.0, 14.0)
    assert new.V_a == pytest.approx(14.0)


def test_fly_tick_still_air_climb_matches_expectation(airframe, env):
    """With no updrafts the measured climb equals the still-air expectation."""
    state = UavState(V_a=12.0, x=500.0, y=500.0, z=500.0)
    new, climb, expected = fly_tick(state, CommandSet(Va_cmd=12.0), False, env, 0.0, airframe, 1.0, 0.1, 14.0)
    assert climb == pytest.approx(expected)
    assert new.z < 500.0


def _trimmed(airframe, battery_wh=40.0):
    trim, _ = trim_glide(airframe, 12.0, z=500.0)
    return dataclasses.replace(trim, x=500.0, y=500.0, battery_wh=battery_wh)


def test_six_dof_tick_glides_with_closed_throttle(airframe, env):
    """Gliding on the 6-DOF plant descends without touching the battery."""
    state = _trimmed(airframe)
    autopilot = Autopilot(PidGains(), airframe)
    cmd = CommandSet(psi_cmd=0.0, z_cmd=500.0, Va_cmd=12.0)
    new, climb, expected = six_dof_tick(state, cmd, False, env, 0.0, airframe, 1.0, 0.05, autopilot, max_thrust(airframe))
    assert np.all(np.isfinite(new.as_array()))
    assert new.battery_wh == 40.0
    assert expected < 0.0
    assert new.z < 500.0
    assert climb == pytest.approx(new.z - 500.0)


def test_six_dof_tick_engine_draws_battery(airframe, env):
    """Under power the autopilot opens the throttle and the battery drains."""
    state = _trimmed(airframe)
    autopilot = Autopilot(PidGains(), airframe)
    cmd = CommandSet(psi_cmd=0.0, z_cmd=500.0, Va_cmd=12.0)
    new, _, expected = six_dof_tick(state, cmd, True, env, 0.0, airframe, 1.0, 0.05, autopilot, max_thrust(airframe))
    assert expected == airframe.engine_climb_rate
    assert new.battery_wh < 40.0


def test_orbit_tracker_completes_after_full_turn():
    """Heading change accumulates across samples until one full circle."""
    tracker = OrbitTracker(center=(0.0, 0.0), radius=40.0)
    for k in range(16):
        tracker.record(UavState(psi=k * math.pi / 8.0), 1.0, 0.0)
    assert not tracker.complete
    tracker.record(UavState(psi=16 * math.pi / 8.0), 1.0, 0.0)
    tracker.record(UavState(psi=17 * math.pi / 8.0), 1.0, 0.0)
    assert tracker.complete


def test_orbit_tracker_evaluate():
    """Mean climb and a centre weighted by rising air."""
    tracker = OrbitTracker(center=(5.0, 5.0), radius=40.0)
    tracker.record(UavState(x=0.0, y=0.0), 2.0, 0.0)
    tracker.record(UavState(x=10.0, y=0.0, psi=0.1), 0.0, 0.0)
    evaluation = tracker.evaluate()
    assert evaluation.w_c == pytest.approx(1.0)
    assert evaluation.center == pytest.approx((0.0, 0.0))
    assert evaluation.strongest == pytest.approx((0.0, 0.0))
    assert evaluation.samples == 2


def test_orbit_tracker_keeps_center_without_rising_air():
    """No rising sample leaves the centre where it was."""
    tracker = OrbitTracker(center=(5.0, 5.0), radius=40.0)
    tracker.record(UavState(x=0.0, y=0.0), -1.0, -0.5)
    assert tracker.evaluate().center == (5.0, 5.0)


def test_orbit_command_on_circle():
    """On the circle and tangent, the command is the plain orbit rate."""
    state = UavState(V_a=12.0, x=140.0, y=100.0, psi=math.pi / 2)
    cmd = orbit_command(state, (100.0, 100.0), 40.0, 1, 9.0, 0.6)
    assert cmd.phi_cmd == pytest.approx(bank_for_rate(12.0, 0.3))
    assert cmd.psi_cmd == pytest.approx(math.pi / 2)
    assert cmd.Va_cmd == 9.0


def _exploiting_peer(z, agent_id=1, state=SoarState.EXPLOIT):
    return PeerState(
        agent_id=agent_id,
        position=(100.0, 100.0, z),
        airspeed=9.0,
        heading=0.0,
        path_angle=0.0,
        soar_state=state,
        orbit_center=(100.0, 100.0),
    )


def test_crowding_check():
    """Capacity and altitude separation gate another agent into an updraft."""
    peers = [_exploiting_peer(500.0)]
    assert not crowding_check((100.0, 100.0), peers, 520.0)
    assert crowding_check((100.0, 100.0), peers, 600.0)
    assert not crowding_check((100.0, 100.0), peers, 600.0, capacity=1)
    assert crowding_check((100.0, 100.0), peers, 520.0, exclude=1)
    assert crowding_check((100.0, 100.0), [_exploiting_peer(500.0, state=SoarState.EXPLORE)], 520.0)


def test_transition_boundary_forces_safety(make_agent, env, airframe):
    """An agent at the region edge turns back under MaintainSafety."""
    agent = make_agent(x=10.0, y=500.0)
    state, cmd = transition(agent, env, agent.maps, [], 0.0, airframe)
    assert state == SoarState.MAINTAIN_SAFETY
    assert cmd.psi_cmd == pytest.approx(math.atan2(0.0, 490.0))


def test_transition_close_peer_forces_safety(make_agent, env, airframe):
    """A peer inside the inflated safety disc preempts the sub-mission."""
    agent = make_agent()
    peer = make_agent(agent_id=1, x=520.0)
    state, _ = transition(agent, env, agent.maps, [agent.snapshot(), peer.snapshot()], 0.0, airframe)
    assert state == SoarState.MAINTAIN_SAFETY


def test_transition_safety_aborts_orbit(make_agent, env, airframe):
    """An orbit interrupted by a conflict is dropped and soaring cools down."""
    agent = make_agent(x=10.0)
    agent.soar_state = SoarState.EXPLOIT
    agent.orbit = OrbitTracker(center=(60.0, 500.0), radius=40.0)
    transition(agent, env, agent.maps, [], 30.0, airframe)
    assert agent.orbit is None
    assert agent.soar_cooldown_until == pytest.approx(30.0 + agent.thresholds.delta_l)


def test_transition_dead_agent_goes_idle(make_agent, env, airframe):
    """A landed agent ends in Idle."""
    agent = make_agent()
    agent.alive = False
    state, _ = transition(agent, env, agent.maps, [], 0.0, airframe)
    assert state == SoarState.IDLE


def test_transition_resumes_after_conflict(make_agent, env, airframe):
    """With the conflict gone the agent returns to its sub-mission."""
    agent = make_agent()
    agent.soar_state = SoarState.MAINTAIN_SAFETY
    state, _ = transition(agent, env, agent.maps, [], 0.0, airframe)
    assert state == SoarState.FOLLOW_COVERAGE_PLANNER


def test_transition_lift_encounter_starts_first_turn(make_agent, env, airframe):
    """Unexpected climb starts an evaluation circle."""
    agent = make_agent()
    agent.climb_rate = 1.0
    state, _ = transition(agent, env, agent.maps, [], 0.0, airframe)
    assert state == SoarState.FIRST_TURN
    assert agent.orbit is not None


def test_transition_cooldown_blocks_soaring(make_agent, env, airframe):
    """During the cooldown an encounter is ignored."""
    agent = make_agent()
    agent.climb_rate = 1.0
    agent.soar_cooldown_until = 100.0
    state, _ = transition(agent, env, agent.maps, [], 50.0, airframe)
    assert state == SoarState.FOLLOW_COVERAGE_PLANNER


def test_first_turn_strong_lift_is_exploited(make_agent, env, airframe):
    """A completed circle above w_c_min is mapped and exploited."""
    agent = make_agent()
    agent.soar_state = SoarState.FIRST_TURN
    agent.orbit = _completed_orbit((500.0, 500.0), 1.5)
    state, _ = transition(agent, env, agent.maps, [], 10.0, airframe)
    assert state == SoarState.EXPLOIT
    assert len(agent.maps.lift) == 1
    assert agent.target_lift == 0
    assert agent.maps.lift_prob.values.sum() == 1.0


def test_first_turn_weak_lift_is_chased_when_needed(make_agent, env, airframe):
    """Weak positive lift is chased by an agent that needs altitude."""
    agent = make_agent(z=500.0)
    agent.soar_state = SoarState.FIRST_TURN
    agent.orbit = _completed_orbit((500.0, 500.0), 0.3)
    state, _ = transition(agent, env, agent.maps, [], 10.0, airframe)
    assert state == SoarState.CHASE_LIFT
    assert len(agent.maps.lift) == 0


def test_first_turn_sink_is_rejected(make_agent, env, airframe):
    """Sinking air sends the agent back with a cooldown."""
    agent = make_agent()
    agent.soar_state = SoarState.FIRST_TURN
    agent.orbit = _completed_orbit((500.0, 500.0), -0.5)
    state, _ = transition(agent, env, agent.maps, [], 10.0, airframe)
    assert state == SoarState.FOLLOW_COVERAGE_PLANNER
    assert agent.orbit is None
    assert agent.soar_cooldown_until == pytest.approx(10.0 + agent.thresholds.delta_l)


def test_exploit_leaves_at_ceiling(make_agent, env, airframe):
    """Reaching the soaring ceiling ends the climb and stamps the lift."""
    agent = make_agent(z=980.0)
    record = record_lift(agent.maps.lift, (500.0, 500.0), 1.5, 0.0)
    agent.soar_state = SoarState.EXPLOIT
    agent.orbit = OrbitTracker(center=(500.0, 500.0), radius=40.0)
    agent.target_lift = record.lift_id
    state, _ = transition(agent, env, agent.maps, [], 200.0, airframe)
    assert state == SoarState.FOLLOW_COVERAGE_PLANNER
    assert agent.maps.lift.records[record.lift_id].last_entered == 200.0


def test_local_decide_needs_candidates(make_agent):
    """An empty candidate set is a programming error."""
    with pytest.raises(ValueError):
        local_decide(make_agent(), [])


def test_local_decide_single_candidate(make_agent):
    """One candidate is returned as is."""
    only = ActionCandidate("continue")
    assert local_decide(make_agent(), [only], recommendation="lift-0") is only


def test_local_decide_follows_recommendation(make_agent):
    """A non-critical agent takes the recommended candidate."""
    record = LiftRecord(lift_id=0, estimated_center=(600.0, 500.0), estimated_strength=1.0, first_seen=0.0, last_entered=0.0)
    candidates = [ActionCandidate("continue"), ActionCandidate("lift-0", payload=(record, 100.0))]
    assert local_decide(make_agent(), candidates, recommendation="lift-0").id == "lift-0"


def test_local_decide_logs_matrix(make_agent):
    """A matrix decision writes one debug row per candidate."""
    record = LiftRecord(lift_id=0, estimated_center=(600.0, 500.0), estimated_strength=1.0, first_seen=0.0, last_entered=0.0)
    candidates = [ActionCandidate("continue"), ActionCandidate("lift-0", payload=(record, 100.0))]
    log = []
    chosen = local_decide(make_agent(), candidates, decision_log=log)
    assert chosen in candidates
    assert len(log) == 2
    assert sum(row["chosen"] for row in log) == 1


def test_high_agent_gets_nearby_mapped_lift(make_agent, env, airframe):
    """Proximity alone qualifies a lift, without the agent needing altitude."""
    agent = make_agent(z=900.0)
    record = record_lift(agent.maps.lift, (700.0, 500.0), 3.0, 0.0)
    transition(agent, env, agent.maps, [], 10.0, airframe)
    assert not agent.lift_needed
    lifts = lift_candidates(agent, agent.maps, [], 10.0)
    assert len(lifts) == 1
    assert lifts[0][0].lift_id == record.lift_id
    assert lifts[0][1] == pytest.approx(200.0)
    candidates = soaring_candidates(agent, lifts, 10.0)
    assert f"lift-{record.lift_id}" in [c.id for c in candidates if c.kind == CandidateKind.AVAILABLE]


def test_distant_lift_qualifies_once_unvisited(make_agent):
    """A lift beyond delta_map is offered to a high agent only after delta_l without a visit."""
    agent = make_agent(x=900.0, y=900.0, z=900.0)
    record_lift(agent.maps.lift, (100.0, 100.0), 3.0, 0.0)
    assert lift_candidates(agent, agent.maps, [], 10.0) == []
    assert len(lift_candidates(agent, agent.maps, [], agent.thresholds.delta_l + 1.0)) == 1


def test_soaring_candidates_add_predicted_visits(make_agent):
    """Available rows come first; a predicted visit routes via the next waypoint."""
    agent = make_agent(z=900.0)
    agent.set_waypoints([(500.0, 800.0)])
    record = record_lift(agent.maps.lift, (700.0, 500.0), 3.0, 0.0)
    candidates = soaring_candidates(agent, [(record, 200.0)], 10.0)
    assert [(c.id, c.kind) for c in candidates] == [
        ("continue", CandidateKind.AVAILABLE),
        (f"lift-{record.lift_id}", CandidateKind.AVAILABLE),
        (f"later-lift-{record.lift_id}", CandidateKind.PREDICTED),
    ]
    forecast, route, leg = candidates[2].payload
    assert leg == pytest.approx(300.0)
    assert route == pytest.approx(300.0 + math.hypot(200.0, 300.0))
    assert forecast.weight == pytest.approx(1.0 - (10.0 + route / 12.0) / agent.thresholds.lift_memory)


def test_reward_rows_of_both_candidate_kinds(make_agent):
    """A direct visit earns no detection; a predicted visit earns the on-task share of its route."""
    agent = make_agent(z=900.0)
    agent.set_waypoints([(500.0, 800.0)])
    record = record_lift(agent.maps.lift, (700.0, 500.0), 3.0, 0.0)
    direct, later = soaring_candidates(agent, [(record, 200.0)], 10.0)[1:]
    route = 300.0 + math.hypot(200.0, 300.0)
    assert reward_row(agent, direct, [])[1] == 0.0
    assert reward_row(agent, later, [])[1] == pytest.approx(300.0 / route)
    assert reward_row(agent, later, [])[2] == pytest.approx(route / agent.thresholds.delta_map)
    log = []
    local_decide(agent, soaring_candidates(agent, [(record, 200.0)], 10.0), decision_log=log)
    assert [row["candidate"] for row in log] == ["continue", f"lift-{record.lift_id}", f"later-lift-{record.lift_id}"]


def test_low_agent_has_no_predicted_visits(make_agent):
    """At the threshold altitude only direct visits are offered."""
    agent = make_agent(z=350.0)
    agent.set_waypoints([(500.0, 800.0)])
    record = record_lift(agent.maps.lift, (700.0, 500.0), 3.0, 0.0)
    candidates = soaring_candidates(agent, [(record, 200.0)], 10.0)
    assert [c.id for c in candidates] == [f"lift-{record.lift_id}"]


def test_recommended_continue_keeps_sub_mission(make_agent, env, airframe):
    """An agent told to continue passes a nearby lift it would otherwise weigh."""
    agent = make_agent(z=500.0)
    agent.set_waypoints([(500.0, 800.0)])
    agent.recommendation = CONTINUE
    record_lift(agent.maps.lift, (700.0, 500.0), 3.0, 0.0)
    state, _ = transition(agent, env, agent.maps, [], 10.0, airframe)
    assert agent.lift_needed
    assert state == SoarState.FOLLOW_COVERAGE_PLANNER
    assert agent.target_lift is None


def test_critical_agent_overrides_recommendation(make_agent, env, airframe):
    """Near the engine floor the agent goes for lift whatever it was told."""
    agent = make_agent(z=260.0)
    agent.set_waypoints([(500.0, 800.0)])
    agent.recommendation = CONTINUE
    record = record_lift(agent.maps.lift, (700.0, 500.0), 3.0, 0.0)
    assert agent.critical
    state, _ = transition(agent, env, agent.maps, [], 10.0, airframe)
    assert state == SoarState.GO_TO_MAPPED_LIFT
    assert agent.target_lift == record.lift_id


def test_apply_policy_filter(square_region):
    """Each policy sees the maps it is allowed to share."""
    shared = MapStore.empty(square_region)
    own = MapStore.empty(square_region)
    assert apply_policy_filter(PolicyKind.PROPOSED_SPLIT, shared, own) is shared
    semi = apply_policy_filter(PolicyKind.SEMI_COOPERATIVE, shared, own)
    assert semi.lift is shared.lift
    assert semi.mission is own.mission
    assert apply_policy_filter(PolicyKind.NON_COOPERATIVE, shared, own) is own
    assert not apply_policy_filter(PolicyKind.ZERO_KNOWLEDGE, shared, own).lift.enabled


def test_advance_agent_detects_target_below(make_agent, square_region, airframe):
    """A target under the agent is detected and written to the mission map."""
    env = Environment(
        region=square_region,
        active_targets=(Target(id=0, position=(500.0, 500.0), birth_time=0.0, duration=1000.0),),
    )
    agent = make_agent()
    detected = advance_agent(agent, env, [agent.snapshot()], 0.0, airframe)
    assert detected == [0]
    assert agent.detected == (0,)
    assert 0 in agent.maps.mission
    assert agent.uav.z < 500.0
