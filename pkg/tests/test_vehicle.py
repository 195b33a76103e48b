"""Tests for the 6-DOF vehicle model, allocation and energy estimates."""

import dataclasses
import math

import numpy as np
import pytest

from soarsim.errors import ConfigError, ModelValidityError, SingularAllocationError
from soarsim.vehicle import (
    ControlSurfaces,
    EnergyTracker,
    UavState,
    aero_coefficients,
    battery_after,
    best_glide_speed,
    dynamics_derivative,
    glide_sink,
    integrate_step,
    parse_airframe_text,
    rk4,
    rotational_terms,
    sdre_allocate,
    sink_rate,
    speed_to_fly,
    specific_energy,
    trim_glide,
)
from soarsim.vehicle.aero import drag_coefficient


def _random_state(rng):
    return UavState(
        p=rng.uniform(-0.5, 0.5),
        q=rng.uniform(-0.5, 0.5),
        r=rng.uniform(-0.5, 0.5),
        V_a=rng.uniform(8.0, 20.0),
        gamma=rng.uniform(-0.2, 0.2),
        psi=rng.uniform(-math.pi, math.pi),
        alpha=rng.uniform(-0.1, 0.1),
        beta=rng.uniform(-0.1, 0.1),
        mu=rng.uniform(-0.5, 0.5),
    )


def test_aero_symmetric_zero_terms(airframe):
    """Zero incidence gives C_L0, zero lateral terms give no roll or yaw moment."""
    c = aero_coefficients(UavState(alpha=0.0), ControlSurfaces(), airframe)
    assert c.C_L == pytest.approx(airframe.C_L0)
    assert c.C_l == 0.0
    assert c.C_n == 0.0
    assert c.C_Y == 0.0
    assert drag_coefficient(0.0, airframe) == airframe.C_D0


def test_aero_rejects_zero_airspeed(airframe):
    """Rate terms divide by airspeed."""
    with pytest.raises(ValueError):
        aero_coefficients(UavState(V_a=0.0), ControlSurfaces(), airframe)


def test_no_heading_rate_wings_level(airframe):
    """Zero bank and sideslip leave the heading unchanged."""
    d = dynamics_derivative(UavState(alpha=0.05, gamma=-0.05), ControlSurfaces(delta_r=0.0), 0.0, airframe)
    assert d[5] == pytest.approx(0.0, abs=1e-15)


def test_sideslip_rate_projects_yaw_rate_with_cosine(airframe):
    """Yaw rate enters the sideslip rate as -r cos(alpha), roll rate as p sin(alpha)."""
    alpha = 0.3
    base = UavState(alpha=alpha)
    k_force = airframe.rho * base.V_a * airframe.S / (2.0 * airframe.m)
    d0 = dynamics_derivative(base, ControlSurfaces(), 0.0, airframe)
    c0 = aero_coefficients(base, ControlSurfaces(), airframe)
    yawing = dataclasses.replace(base, r=0.2)
    d_r = dynamics_derivative(yawing, ControlSurfaces(), 0.0, airframe)
    c_r = aero_coefficients(yawing, ControlSurfaces(), airframe)
    assert d_r[7] - d0[7] == pytest.approx(k_force * (c_r.C_Y - c0.C_Y) - 0.2 * math.cos(alpha))
    rolling = dataclasses.replace(base, p=0.2)
    d_p = dynamics_derivative(rolling, ControlSurfaces(), 0.0, airframe)
    c_p = aero_coefficients(rolling, ControlSurfaces(), airframe)
    assert d_p[7] - d0[7] == pytest.approx(k_force * (c_p.C_Y - c0.C_Y) + 0.2 * math.sin(alpha))


def test_dynamics_rejects_invalid_attitude(airframe):
    """Non-positive airspeed or vertical flight path is outside the model."""
    with pytest.raises(ModelValidityError) as exc:
        dynamics_derivative(UavState(V_a=0.0), ControlSurfaces(), 0.0, airframe)
    assert exc.value.field == "V_a"
    with pytest.raises(ModelValidityError) as exc:
        dynamics_derivative(UavState(gamma=math.pi / 2), ControlSurfaces(), 0.0, airframe)
    assert exc.value.field == "gamma"


def test_trim_glide_residuals(airframe):
    """Trimmed glide has vanishing rate and path derivatives."""
    state, surfaces = trim_glide(airframe, 12.0)
    d = dynamics_derivative(state, surfaces, 0.0, airframe)
    assert np.all(np.abs(d[:5]) < 1e-6)
    assert state.gamma < 0.0
    assert abs(surfaces.delta_e) < 0.5


def test_vertical_wind_is_additive(airframe):
    """Rising air adds one-for-one to the climb rate."""
    state, surfaces = trim_glide(airframe, 12.0)
    still = dynamics_derivative(state, surfaces, 0.0, airframe)
    lifted = dynamics_derivative(state, surfaces, 2.0, airframe)
    assert lifted[11] - still[11] == pytest.approx(2.0)
    np.testing.assert_array_equal(lifted[:11], still[:11])


def test_rk4_zero_derivative():
    """A zero vector field leaves the state unchanged."""
    y = np.arange(12, dtype=float)
    np.testing.assert_array_equal(rk4(lambda v: np.zeros_like(v), y, 0.1), y)


def test_rk4_fourth_order(airframe):
    """Halving dt shrinks the error against a fine-step oracle roughly sixteenfold."""
    trim, surfaces = trim_glide(airframe, 12.0)
    start = dataclasses.replace(trim, mu=0.1, p=0.05, q=0.02).as_array()

    def f(y):
        return dynamics_derivative(trim.with_array(y), surfaces, 0.0, airframe, thrust_max=0.0)

    def run(steps):
        y = start.copy()
        for _ in range(steps):
            y = rk4(f, y, 1.0 / steps)
        return y

    oracle = run(1000)
    coarse = np.linalg.norm(run(25) - oracle)
    fine = np.linalg.norm(run(50) - oracle)
    assert coarse / fine >= 2**3.5


def test_battery_drain_arithmetic(airframe):
    """One minute at 100 W costs 100/60 Wh; a closed throttle costs nothing."""
    params = dataclasses.replace(airframe, engine_power_w=100.0)
    assert battery_after(50.0, 1.0, params, 60.0) == pytest.approx(50.0 - 100.0 / 60.0)
    assert battery_after(50.0, 0.0, params, 60.0) == 50.0
    assert battery_after(0.5, 1.0, params, 60.0) == 0.0


def test_integrate_step_drains_battery_under_power(airframe):
    """A powered step draws engine_power * dt / 3600 Wh."""
    state, surfaces = trim_glide(airframe, 12.0)
    powered = dataclasses.replace(surfaces, throttle=1.0)
    after = integrate_step(state, powered, 0.0, airframe, 0.1)
    assert after.battery_wh == pytest.approx(state.battery_wh - airframe.engine_power_w * 0.1 / 3600.0)
    glided = integrate_step(state, surfaces, 0.0, airframe, 0.1)
    assert glided.battery_wh == state.battery_wh


def test_integrate_step_envelope(airframe):
    """Leaving the airspeed envelope names the offending field."""
    with pytest.raises(ModelValidityError) as exc:
        integrate_step(UavState(V_a=60.0), ControlSurfaces(), 0.0, airframe, 0.1)
    assert exc.value.field == "V_a"
    with pytest.raises(ValueError):
        integrate_step(UavState(), ControlSurfaces(), 0.0, airframe, 0.0)


def test_glide_energy_non_increasing(airframe):
    """Without wind or thrust the specific energy only falls."""
    state, surfaces = trim_glide(airframe, 12.0)
    state = dataclasses.replace(state, mu=0.05)
    energies = []
    for _ in range(50):
        state = integrate_step(state, surfaces, 0.0, airframe, 0.1)
        energies.append(specific_energy(state, airframe.g).E)
    assert np.all(np.diff(energies) <= 1e-6)


def test_sdre_round_trip_random_states(airframe):
    """F + G U reproduces the desired rates on random states."""
    rng = np.random.default_rng(7)
    for _ in range(1000):
        state = _random_state(rng)
        F, G = rotational_terms(state, airframe)
        desired = rng.uniform(-3.0, 3.0, size=3)
        U = np.linalg.solve(G, desired - F)
        np.testing.assert_allclose(F + G @ U, desired, rtol=0.0, atol=1e-9)


def test_sdre_recovers_unsaturated_deflections(airframe):
    """Rates produced by in-limit deflections are inverted exactly."""
    rng = np.random.default_rng(11)
    for _ in range(100):
        state = _random_state(rng)
        U_true = rng.uniform(-0.4, 0.4, size=3)
        F, G = rotational_terms(state, airframe)
        out = sdre_allocate(state, tuple(F + G @ U_true), airframe)
        assert not out.saturated
        np.testing.assert_allclose([out.delta_e, out.delta_a, out.delta_r], U_true, atol=1e-9)


def test_sdre_zero_residual(airframe):
    """Desired rates equal to the free response need no deflection."""
    state = _random_state(np.random.default_rng(3))
    F, _ = rotational_terms(state, airframe)
    out = sdre_allocate(state, tuple(F), airframe)
    assert (out.delta_e, out.delta_a, out.delta_r) == pytest.approx((0.0, 0.0, 0.0), abs=1e-12)


def test_sdre_saturation_flag(airframe):
    """Demands beyond the deflection limit are clamped and flagged."""
    state = UavState(V_a=12.0, alpha=0.05)
    F, G = rotational_terms(state, airframe)
    out = sdre_allocate(state, tuple(F + G @ np.array([1.0, 0.0, 0.0])), airframe)
    assert out.saturated
    assert out.delta_e == 0.5


def test_sdre_singular_at_zero_airspeed(airframe):
    """Control effectiveness vanishes at zero airspeed."""
    with pytest.raises(SingularAllocationError):
        sdre_allocate(UavState(V_a=0.0), (0.0, 0.0, 0.0), airframe)


def test_specific_energy_values():
    """Energy height examples."""
    assert specific_energy(UavState(V_a=0.0, z=100.0)).E == 100.0
    assert specific_energy(UavState(V_a=20.0, z=0.0), g=9.81).E == pytest.approx(20.387, abs=1e-3)
    assert specific_energy(UavState(V_a=15.0), V_dot=0.0, z_dot=0.0).E_dot == 0.0
    assert specific_energy(UavState()).E_dot is None


def test_energy_tracker_history():
    """Rates appear once enough samples have been seen."""
    tracker = EnergyTracker(g=9.81)
    first = tracker.update(0.0, UavState(V_a=12.0, z=500.0))
    assert first.E_dot is None
    second = tracker.update(1.0, UavState(V_a=12.0, z=501.0))
    assert second.E_dot == pytest.approx(1.0)
    assert second.E_ddot is None
    third = tracker.update(2.0, UavState(V_a=12.0, z=503.0))
    assert third.E_dot == pytest.approx(2.0)
    assert third.E_ddot == pytest.approx(1.0)


def test_glide_sink_examples():
    """Sink is linear in airspeed and vanishes without drag."""
    assert glide_sink(10.0, 0.05, 1.0) == pytest.approx(-0.5)
    assert glide_sink(10.0, 0.0, 1.0) == 0.0
    assert glide_sink(20.0, 0.05, 1.0) == pytest.approx(2 * glide_sink(10.0, 0.05, 1.0))
    with pytest.raises(ValueError):
        glide_sink(10.0, 0.05, 0.0)


def test_best_glide_speed_matches_scan(airframe):
    """Minimizer agrees with a 1 cm/s brute-force scan and beats the endpoints."""
    best = best_glide_speed(airframe)
    scan = np.arange(airframe.V_a_min, airframe.V_a_max + 1e-9, 0.01)
    sinks = [sink_rate(airframe, v) for v in scan]
    v_scan = scan[int(np.argmin(sinks))]
    assert abs(best - v_scan) <= 0.01
    assert sink_rate(airframe, best) <= min(sinks) + 1e-9
    assert sink_rate(airframe, best) <= sink_rate(airframe, airframe.V_a_min)
    assert sink_rate(airframe, best) <= sink_rate(airframe, airframe.V_a_max)
    assert best_glide_speed(airframe) == best


def test_speed_to_fly_rises_with_expected_climb(airframe):
    """Stronger expected lift means faster cruise between thermals."""
    v0 = speed_to_fly(airframe, 0.0)
    v1 = speed_to_fly(airframe, 1.0)
    v3 = speed_to_fly(airframe, 3.0)
    assert v0 == pytest.approx(best_glide_speed(airframe), abs=1e-3)
    assert v0 < v1 < v3 <= airframe.V_a_max


def test_airframe_parser_rejects_bad_files():
    """Unknown, duplicate and non-numeric entries are configuration errors."""
    with pytest.raises(ConfigError):
        parse_airframe_text("wingspan 2.4 m\n")
    with pytest.raises(ConfigError):
        parse_airframe_text("S 0.44 m^2\nS 0.45 m^2\n")
    with pytest.raises(ConfigError):
        parse_airframe_text("S big m^2\n")
    assert parse_airframe_text("# comment\nS 0.44 m^2\n") == {"S": 0.44}
