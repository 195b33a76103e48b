"""Integration tests for the mission loop, run outputs and seeded ensembles."""

import json

import pandas as pd
import pytest

from soarsim.agents.models import PolicyKind
from soarsim.config import REPO_ROOT, build_settings, load_scenario, parse_scenario_text
from soarsim.control import ChannelGains, PidGains, save_gains
from soarsim.errors import ConfigError, InvariantBreach
from soarsim.metrics import TRACK_COLUMNS
from soarsim.simulation import (
    SeedStreams,
    aggregate,
    mission,
    parse_seed_range,
    run_ensemble,
    run_mission,
    speed_profile,
    write_outputs,
)


def _settings(**overrides):
    flat = {"run.n_u": 2, "run.duration_min": 2, "run.seed": 11}
    flat.update(overrides)
    return build_settings(flat)


@pytest.fixture(scope="module")
def short_run():
    return run_mission(_settings())


def test_scenario_parser_rejects_bad_lines():
    """Lines need a namespaced key and appear once."""
    with pytest.raises(ConfigError):
        parse_scenario_text("seed = 3")
    with pytest.raises(ConfigError):
        parse_scenario_text("run.seed 3")
    with pytest.raises(ConfigError):
        parse_scenario_text("run.seed = 3\nrun.seed = 4")
    assert parse_scenario_text("run.seed = 3  # comment\n\n") == {"run.seed": "3"}


def test_settings_reject_unknown_and_inconsistent_keys():
    """Unknown keys and out-of-order altitudes are configuration errors."""
    with pytest.raises(ConfigError):
        build_settings({"run.warp_speed": 9})
    with pytest.raises(ConfigError):
        build_settings({"agents.z_threshold": 1500})
    with pytest.raises(ConfigError):
        build_settings({"run.roi_rho": 2})


@pytest.mark.parametrize(
    "key, value",
    [
        ("environment.updraft_lifecycle_max", 1200),
        ("environment.updraft_lifecycle_min", 300),
        ("environment.updraft_strength_max", 5.0),
        ("environment.updraft_radius_min", 20.0),
        ("environment.target_duration_max", 3600.0),
    ],
)
def test_environment_ranges_stay_in_envelope(key, value):
    """Updraft and target ranges outside their allowed envelope are configuration errors."""
    with pytest.raises(ConfigError):
        build_settings({key: value})


def test_quorum_defaults_to_half_the_agents():
    """An unset quorum resolves to ceil(n_u / 2)."""
    assert build_settings({"run.n_u": 5}).resolved_quorum == 3


def test_uncoordinated_policies_share_one_area():
    """Only the split proposed policy partitions the region."""
    assert _settings().effective_roi_rho == 1
    assert _settings(**{"run.policy": "proposed_shared"}).effective_roi_rho == 0
    assert _settings(**{"run.policy": "non_cooperative"}).effective_roi_rho == 0


def test_scenario_files_load():
    """Shipped scenarios validate."""
    desk = load_scenario(REPO_ROOT / "scenarios" / "desk.conf")
    full = load_scenario(REPO_ROOT / "scenarios" / "full.conf")
    assert desk.run.n_u == 3
    assert desk.environment.updraft_lifecycle_max <= 600.0
    assert full.region_obj.width == 6000.0


def test_seed_streams_are_independent_and_repeatable():
    """Streams differ from each other but repeat for the same seed."""
    a, b = SeedStreams.from_seed(4), SeedStreams.from_seed(4)
    assert a.env.random() == b.env.random()
    assert SeedStreams.from_seed(4).env.random() != SeedStreams.from_seed(4).policy.random()


def test_speed_profile_respects_turn_limit(airframe):
    """The airspeed cap keeps V / R_min under the turn-rate limit."""
    speeds = speed_profile(airframe)
    assert speeds.v_cap == pytest.approx(14.0)
    assert speeds.v_cap / airframe.R_min < airframe.psi_dot_max
    assert airframe.V_a_min <= speeds.thermal <= speeds.cruise <= speeds.v_cap


def test_zero_duration_writes_empty_track(tmp_path):
    """No ticks means a header-only track and zero objectives."""
    result = run_mission(_settings(**{"run.duration_min": 0}))
    output = write_outputs(result, tmp_path)
    track = pd.read_csv(output.track_csv)
    assert list(track.columns) == list(TRACK_COLUMNS)
    assert track.empty
    assert result.scores.f1 == 0.0
    assert result.scores.f2 == 0.0


def test_detection_score_mismatch_is_a_breach(monkeypatch):
    """Online and offline detection scores must agree at the end of a run."""
    monkeypatch.setattr(mission, "objective_f1", lambda log, tau_t: -1.0)
    with pytest.raises(InvariantBreach, match="detection score"):
        run_mission(_settings(**{"run.duration_min": 0}))


def test_short_run_track_shape(short_run):
    """One record per alive agent per tick, stamped at the tick end."""
    track = short_run.log.track_frame()
    ticks = short_run.settings.ticks
    assert len(track) <= ticks * 2
    assert track["t"].min() == pytest.approx(1.0)
    assert track["t"].max() <= ticks * 1.0
    assert (track["z"] > 0).all()
    assert set(track["mode"]) <= {"glide", "engine"}


def test_short_run_scores(short_run):
    """The online detection score matches the offline one and hard constraints hold."""
    assert short_run.online_f1 == pytest.approx(short_run.scores.f1)
    assert short_run.scores.f2 > 0.0
    assert short_run.scores.constraint_violations["containment"] == 0
    assert short_run.scores.constraint_violations["turn_rate"] == 0


def test_coordinated_run_logs_level1_events(short_run):
    """The manager records one initial assignment per agent."""
    events = short_run.log.events_frame()
    level1 = events[events["kind"] == "coordination_level1"]
    assert len(level1) == 2


def test_runs_are_deterministic(tmp_path):
    """The same scenario and seed give a byte-identical track."""
    first = write_outputs(run_mission(_settings()), tmp_path / "a")
    second = write_outputs(run_mission(_settings()), tmp_path / "b")
    assert first.track_csv.read_bytes() == second.track_csv.read_bytes()
    assert first.events_csv.read_bytes() == second.events_csv.read_bytes()


@pytest.mark.parametrize("policy", [p.value for p in PolicyKind])
def test_every_policy_runs(policy):
    """Each comparison policy completes a short mission."""
    result = run_mission(_settings(**{"run.policy": policy, "run.duration_min": 1}))
    assert result.summary.agents
    assert result.settings.run.policy.value == policy


def test_six_dof_mission_flies_the_autopilot():
    """With the 6-DOF model every agent carries an autopilot and the run stays valid."""
    result = run_mission(_settings(**{"vehicle.model": "6dof", "run.duration_min": 1}))
    assert all(agent.autopilot is not None for agent in result.agents)
    track = result.log.track_frame()
    assert len(track) > 0
    assert (track["z"] > 0).all()
    assert result.online_f1 == pytest.approx(result.scores.f1)


def test_six_dof_mission_reads_gains_file(tmp_path):
    """Autopilot gains come from the configured file."""
    gains = PidGains(roll=ChannelGains(2.0, 0.2, 0.3))
    path = tmp_path / "gains.txt"
    save_gains(path, gains)
    result = run_mission(_settings(**{"vehicle.model": "6dof", "vehicle.gains_file": str(path), "run.duration_min": 0}))
    assert result.agents[0].autopilot.gains == gains


def test_six_dof_mission_rejects_bad_gains_file(tmp_path):
    """An unreadable gains file is a configuration error."""
    settings = _settings(**{"vehicle.model": "6dof", "vehicle.gains_file": str(tmp_path / "missing.txt"), "run.duration_min": 0})
    with pytest.raises(ConfigError):
        run_mission(settings)


def test_outputs_echo_config(tmp_path, short_run):
    """The written scenario reloads to the same configuration."""
    output = write_outputs(short_run, tmp_path)
    summary = json.loads(output.summary_json.read_text())
    assert summary["seed"] == 11
    assert summary["policy"] == "proposed_split"
    assert "metrics" in summary
    assert load_scenario(output.scenario_conf).to_flat() == short_run.settings.to_flat()


def test_debug_decisions_dump(tmp_path):
    """Decision rows are only written when asked for."""
    result = run_mission(_settings(**{"run.debug_decisions": "true", "run.duration_min": 1}))
    write_outputs(result, tmp_path)
    assert (tmp_path / "decisions.csv").exists() == bool(result.decision_rows)


def test_parse_seed_range():
    """Inclusive ranges and single seeds; anything else is a config error."""
    assert parse_seed_range("1..3") == [1, 2, 3]
    assert parse_seed_range("5") == [5]
    with pytest.raises(ConfigError):
        parse_seed_range("3..1")
    with pytest.raises(ConfigError):
        parse_seed_range("a..b")


def test_aggregate_uses_population_stdev():
    """Spread is the population standard deviation."""
    mean, stdev = aggregate({1: {"x": 1.0}, 2: {"x": 3.0}})
    assert mean == {"x": 2.0}
    assert stdev == {"x": 1.0}
    assert aggregate({}) == ({}, {})


@pytest.mark.asyncio
async def test_ensemble_rejects_empty_seed_list():
    """An ensemble needs seeds."""
    with pytest.raises(ConfigError):
        await run_ensemble(_settings(), [])


@pytest.mark.asyncio
async def test_single_seed_ensemble_matches_run():
    """A one-member ensemble reports that run's metrics with zero spread."""
    settings = _settings(**{"run.duration_min": 1})
    report = await run_ensemble(settings, [3])
    expected = run_mission(_settings(**{"run.duration_min": 1, "run.seed": 3})).summary.scalars()
    assert report.mean == pytest.approx(expected)
    assert all(v == 0.0 for v in report.stdev.values())
    assert not report.failures


@pytest.mark.asyncio
async def test_ensemble_is_independent_of_worker_count(tmp_path):
    """Members run in parallel give the same report as run serially."""
    settings = _settings(**{"run.duration_min": 1})
    serial = await run_ensemble(settings, [1, 2], workers=1)
    parallel = await run_ensemble(settings, [1, 2], workers=2, out_dir=tmp_path)
    assert serial.members == parallel.members
    assert sorted(serial.frame().index) == [1, 2]
    assert (tmp_path / "seed_2" / "track.csv").exists()


@pytest.mark.slow
def test_desk_scenario_mission():
    """A full desk-scale mission keeps the hard constraints."""
    result = run_mission(load_scenario(REPO_ROOT / "scenarios" / "desk.conf"))
    assert result.summary.updrafts_spawned > 0
    assert result.scores.constraint_violations["containment"] == 0
    assert result.scores.constraint_violations["turn_rate"] == 0
    assert result.online_f1 == pytest.approx(result.scores.f1)


@pytest.mark.slow
@pytest.mark.asyncio
async def test_desk_scenario_ensemble():
    """Ten desk missions aggregate without failures."""
    settings = load_scenario(REPO_ROOT / "scenarios" / "desk.conf")
    report = await run_ensemble(settings, list(range(1, 11)), workers=4)
    assert not report.failures
    assert len(report.members) == 10
    assert report.mean["flight_min"] > 0.0
