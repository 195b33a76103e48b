"""Tests for objectives, constraint audit and run summaries."""

import math

import pytest

from soarsim.environment import Region, Target, Updraft
from soarsim.metrics import (
    F1Accumulator,
    TrackRecord,
    check_constraints,
    objective_f1,
    objective_f2,
    objective_f3,
    summarize,
    synthetic_log,
)
from soarsim.metrics.constraints import communication_graph, lens_area, turn_rate_demand

REGION = Region(lower_bound=(0.0, 0.0), upper_bound=(1000.0, 1000.0), z_min=200.0, z_max=1000.0)
TARGET = Target(id=0, position=(500.0, 500.0), birth_time=0.0, duration=1000.0)


def _row(t, agent_id=0, x=500.0, y=500.0, z=500.0, V_a=12.0, battery_wh=50.0, mode="glide", state="follow_coverage_planner", **kw):
    return TrackRecord(
        t=t,
        agent_id=agent_id,
        x=x,
        y=y,
        z=z,
        V_a=V_a,
        bank=0.0,
        mode=mode,
        soar_state=state,
        battery_wh=battery_wh,
        **kw,
    )


def _hover_log(ticks, agents=(0,), late_agents=(), join_at=4):
    rows = []
    for t in range(1, ticks + 1):
        for a in agents:
            rows.append(_row(float(t), agent_id=a))
        for a in late_agents:
            x = 500.0 if t >= join_at else 100.0
            rows.append(_row(float(t), agent_id=a, x=x, y=100.0 if t < join_at else 500.0))
    return synthetic_log(REGION, rows, n_agents=len(agents) + len(late_agents), targets=[TARGET])


def test_f1_brute_force_single_target():
    """One target watched every tick scores only while under-monitored."""
    assert objective_f1(_hover_log(10), tau_t=3.0) == pytest.approx(3.0)


def test_f1_counts_each_agent_while_gate_open():
    """Two agents on one new target both score until it is monitored tau_t."""
    assert objective_f1(_hover_log(10, agents=(0, 1)), tau_t=3.0) == pytest.approx(6.0)


def test_f1_duplicate_detection_past_tau_is_free():
    """A second agent arriving after tau_t of monitoring adds nothing."""
    alone = objective_f1(_hover_log(10), tau_t=3.0)
    joined = objective_f1(_hover_log(10, late_agents=(1,), join_at=4), tau_t=3.0)
    assert joined == pytest.approx(alone)


def test_f1_split_over_active_targets():
    """Each contribution is divided by the number of active targets."""
    other = Target(id=1, position=(900.0, 900.0), birth_time=0.0, duration=1000.0)
    log = synthetic_log(REGION, [_row(1.0)], n_agents=1, targets=[TARGET, other])
    assert objective_f1(log, tau_t=3.0) == pytest.approx(0.5)


def test_f1_online_equals_offline():
    """Accumulating ticks as they happen matches the offline recomputation."""
    log = _hover_log(10, agents=(0, 1), late_agents=(2,), join_at=2)
    online = F1Accumulator(tau_t=3.0, tick=1.0)
    for t, records in log.by_tick().items():
        online.update(
            log.active_target_ids(t),
            {r.agent_id: ([0] if (r.x, r.y) == (500.0, 500.0) else []) for r in records},
        )
    assert online.score == objective_f1(log, tau_t=3.0)


def test_f1_accumulator_validation():
    """tau_t and tick must be positive."""
    with pytest.raises(ValueError):
        F1Accumulator(0.0, 1.0)


def test_f2_counts_time_above_reserve():
    """Hours aloft count only ticks with at least the reserve, averaged over agents."""
    rows = [_row(float(t), battery_wh=50.0 if t <= 6 else 4.0) for t in range(1, 11)]
    log = synthetic_log(REGION, rows, n_agents=2)
    assert objective_f2(log, battery_reserve=0.1) == pytest.approx(6.0 / 3600.0 / 2)


def test_f3_signs():
    """Free climbs earn potential energy; powered climbs cost power; sinking is neutral."""
    free = synthetic_log(REGION, [_row(1.0, z=500.0), _row(2.0, z=510.0)], n_agents=1)
    assert objective_f3(free) == pytest.approx(1.6 * 9.81 * 510.0 / 3600.0)

    powered = synthetic_log(
        REGION, [_row(1.0, z=500.0, battery_wh=50.0), _row(2.0, z=502.0, battery_wh=49.99)], n_agents=1
    )
    assert objective_f3(powered, lam=2.0) == pytest.approx(-2.0 * 36.0)

    sinking = synthetic_log(REGION, [_row(1.0, z=500.0), _row(2.0, z=499.0)], n_agents=1)
    assert objective_f3(sinking) == 0.0


def test_lens_area_cases():
    """Disjoint, tangent, contained and partial overlaps."""
    assert lens_area(3.0, 1.0, 1.0) == 0.0
    assert lens_area(2.0, 1.0, 1.0) == 0.0
    assert lens_area(0.0, 1.0, 2.0) == pytest.approx(math.pi)
    assert lens_area(0.0, 1.5, 1.5) == pytest.approx(math.pi * 2.25)
    exact = 2.0 * math.acos(0.5) - 0.5 * math.sqrt(3.0)
    assert lens_area(1.0, 1.0, 1.0) == pytest.approx(exact)


def test_turn_rate_demand_is_speed_over_radius(airframe):
    """The demand of an R_min turn reduces to V / R_min at any bank."""
    for bank in (0.0, 0.3, 0.6):
        assert turn_rate_demand(airframe, 12.0, bank) == pytest.approx(12.0 / airframe.R_min)


def test_communication_graph_uses_3d_range():
    """Edges join agents within range, altitude included."""
    rows = [_row(1.0, agent_id=0, x=100.0), _row(1.0, agent_id=1, x=200.0), _row(1.0, agent_id=2, x=300.0)]
    assert communication_graph(rows, 150.0).number_of_edges() == 2
    assert communication_graph(rows, 50.0).number_of_edges() == 0
    stacked = [_row(1.0, agent_id=0, z=300.0), _row(1.0, agent_id=1, z=600.0)]
    assert communication_graph(stacked, 200.0).number_of_edges() == 0


def test_constraints_clean_log(airframe):
    """Separated, contained, charged agents violate nothing."""
    rows = [_row(1.0, agent_id=0, x=100.0, y=100.0), _row(1.0, agent_id=1, x=900.0, y=900.0)]
    report = check_constraints(synthetic_log(REGION, rows, n_agents=2), airframe, 0.1, 2000.0)
    assert report.clean
    assert report.ticks == 1
    assert report.edge_count_ok == 1


def test_constraints_injected_violations(airframe):
    """Each injected fault is counted once under its own constraint."""
    rows = [
        _row(1.0, agent_id=0, x=100.0, y=100.0),
        _row(1.0, agent_id=1, x=900.0, y=900.0),
        _row(2.0, agent_id=0, x=-10.0, y=100.0),
        _row(2.0, agent_id=1, x=900.0, y=900.0, V_a=20.0, battery_wh=4.0),
        _row(3.0, agent_id=0),
        _row(3.0, agent_id=1),
    ]
    report = check_constraints(synthetic_log(REGION, rows, n_agents=2), airframe, 0.1, 2000.0)
    assert report.violations == {
        "containment": 1,
        "battery_reserve": 1,
        "connectivity": 0,
        "fov_overlap": 1,
        "turn_rate": 1,
    }


def test_constraints_disconnected_ticks(airframe):
    """Agents beyond communication range break connectivity every tick."""
    rows = [_row(float(t), agent_id=a, x=100.0 + 800.0 * a, y=100.0 + 800.0 * a) for t in (1, 2) for a in (0, 1)]
    report = check_constraints(synthetic_log(REGION, rows, n_agents=2), airframe, 0.1, 500.0)
    assert report.violations["connectivity"] == 2
    assert report.edge_count_ok == 0


def test_summarize_climb_split():
    """Rising ticks split into unpowered and powered minutes by flight mode."""
    rows = [_row(60.0 * (k + 1), z=300.0 + 10.0 * k, mode="engine" if k == 11 else "glide") for k in range(12)]
    summary = summarize(synthetic_log(REGION, rows, n_agents=1, tick=60.0))
    agent = summary.agents[0]
    assert (agent.unpowered_climb_min, agent.powered_climb_min) == pytest.approx((10.0, 1.0))
    assert agent.flight_min == pytest.approx(12.0)
    assert agent.residual_battery == 1.0
    assert agent.mean_power_w == 0.0


def test_summarize_updraft_episodes():
    """Re-entering the same updraft counts as a second episode."""
    rows = [
        _row(1.0, state="exploit", updraft_id=5),
        _row(2.0, state="exploit", updraft_id=5),
        _row(3.0),
        _row(4.0, state="exploit", updraft_id=5),
        _row(5.0, state="first_turn", updraft_id=7),
    ]
    log = synthetic_log(REGION, rows, n_agents=1)
    log.updrafts[5] = Updraft(id=5, center=(500.0, 500.0), radius=80.0, core_strength=2.0, birth_time=0.0, lifecycle=600.0)
    log.updrafts[7] = Updraft(id=7, center=(500.0, 500.0), radius=80.0, core_strength=2.0, birth_time=0.0, lifecycle=600.0)
    summary = summarize(log)
    assert summary.exploitation_multiplicity == {2: 1}
    assert summary.detection_multiplicity == {2: 1, 1: 1}
    assert summary.updrafts_exploited == 1
    assert summary.updraft_detection_rate == 1.0
    assert summary.updraft_exploitation_rate == 0.5


def test_summarize_detection_histogram():
    """Targets are binned by how many distinct agents saw them."""
    rows = [
        _row(1.0, agent_id=0, detected=(3,)),
        _row(1.0, agent_id=1, detected=(3, 4)),
        _row(2.0, agent_id=0, detected=(3,)),
    ]
    summary = summarize(synthetic_log(REGION, rows, n_agents=2))
    assert summary.unique_targets == 2
    assert summary.detection_histogram == {2: 1, 1: 1}


def test_summary_scalars_include_objectives_and_violations():
    """Scalars flatten agent means, objectives and violation counts."""
    summary = summarize(synthetic_log(REGION, [_row(1.0), _row(2.0)], n_agents=1))
    summary.objectives = {"f1": 1.5}
    summary.constraint_violations = {"containment": 0}
    scalars = summary.scalars()
    assert scalars["f1"] == 1.5
    assert scalars["violations_containment"] == 0.0
    assert scalars["battery_consumed"] == pytest.approx(0.0)
    assert "agents" in summary.to_dict()
