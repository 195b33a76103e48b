"""Per-tick flight: the point-mass guidance model, the autopilot-flown 6-DOF plant and the glide/engine switch."""

import dataclasses
import functools
import logging
import math
from typing import Tuple

from soarsim.agents.context import AgentContext
from soarsim.agents.models import FlightMode
from soarsim.agents.soaring import GRAVITY, turn_rate_limit
from soarsim.control.models import CommandSet
from soarsim.control.pid import Autopilot, wrap_angle
from soarsim.environment.models import Environment
from soarsim.environment.updrafts import total_wind
from soarsim.errors import ModelValidityError, SingularAllocationError
from soarsim.vehicle.aero import sink_rate
from soarsim.vehicle.dynamics import battery_after, integrate_step, trim_glide
from soarsim.vehicle.models import AirframeParams, UavState

logger = logging.getLogger(__name__)

# Airspeed slew rate, m/s^2.
SPEED_SLEW = 1.0


def point_mass_step(
    state: UavState,
    cmd: CommandSet,
    engine: bool,
    wind_vz: float,
    params: AirframeParams,
    dt: float,
    v_cap: float,
) -> Tuple[UavState, float]:
    """
    Advance a point-mass glider by dt.

    The commanded bank sets the turn rate g tan(phi) / V, capped by psi_dot_max
    and V / R_min. Gliding sinks at the polar sink rate for the current speed
    and bank; the engine climbs at engine_climb_rate instead. Vertical wind
    adds to either.

    Returns:
        New state and the still-air climb rate the agent expected over dt
    """
    v_target = min(max(cmd.Va_cmd, params.V_a_min), v_cap)
    dv = max(-SPEED_SLEW * dt, min(SPEED_SLEW * dt, v_target - state.V_a))
    V = min(max(state.V_a + dv, params.V_a_min), v_cap)

    limit = turn_rate_limit(V, params.psi_dot_max, params.R_min)
    rate = max(-limit, min(limit, GRAVITY * math.tan(cmd.phi_cmd) / V))
    bank = math.atan(V * rate / GRAVITY)
    psi = wrap_angle(state.psi + rate * dt)

    expected = params.engine_climb_rate if engine else -sink_rate(params, V, bank)
    z_dot = expected + wind_vz
    gamma = math.asin(max(-1.0, min(1.0, z_dot / V)))
    ground = V * math.cos(gamma)
    battery = battery_after(state.battery_wh, 1.0 if engine else 0.0, params, dt)
    new_state = dataclasses.replace(
        state,
        V_a=V,
        psi=psi,
        mu=bank,
        gamma=gamma,
        r=rate,
        x=state.x + ground * math.cos(psi) * dt,
        y=state.y + ground * math.sin(psi) * dt,
        z=state.z + z_dot * dt,
        battery_wh=battery,
    )
    return new_state, expected


def fly_tick(
    state: UavState,
    cmd: CommandSet,
    engine: bool,
    env: Environment,
    t: float,
    params: AirframeParams,
    tick: float,
    dt: float,
    v_cap: float,
) -> Tuple[UavState, float, float]:
    """
    Integrate one behavior tick on dt sub-steps.

    Returns:
        Final state, measured climb rate and mean expected still-air climb rate
    """
    steps = max(1, int(round(tick / dt)))
    h = tick / steps
    z0 = state.z
    expected_sum = 0.0
    for k in range(steps):
        wind = total_wind(env, state.xy, t + k * h)
        state, expected = point_mass_step(state, cmd, engine, wind, params, h, v_cap)
        expected_sum += expected
    return state, (state.z - z0) / tick, expected_sum / steps


@functools.lru_cache(maxsize=64)
def _glide_trim(params: AirframeParams, speed: float) -> UavState:
    trim, _ = trim_glide(params, speed)
    return trim


def six_dof_tick(
    state: UavState,
    cmd: CommandSet,
    engine: bool,
    env: Environment,
    t: float,
    params: AirframeParams,
    tick: float,
    dt: float,
    autopilot: Autopilot,
    thrust: float,
) -> Tuple[UavState, float, float]:
    """
    Integrate one behavior tick on the 6-DOF plant under the autopilot.

    The guidance heading and airspeed pass through unchanged. The pitch
    reference is the glide trim attitude (its angle of attack alone under
    power) and the altitude command sits where the still-air model expects
    the aircraft a tick ahead, so the altitude loop follows the glide slope
    or the engine climb instead of fighting it. Gliding closes the
    throttle. A sub-step that leaves the model envelope is replaced by the
    glide trim at the current position and the autopilot is reset.

    Returns:
        Final state, measured climb rate and mean expected still-air climb rate
    """
    steps = max(1, int(round(tick / dt)))
    h = tick / steps
    z0 = state.z
    trim = _glide_trim(params, round(min(max(cmd.Va_cmd, params.V_a_min), params.V_a_max), 1))
    pitch = trim.alpha if engine else trim.theta
    expected_sum = 0.0
    for k in range(steps):
        wind = total_wind(env, state.xy, t + k * h)
        expected = params.engine_climb_rate if engine else -sink_rate(params, state.V_a, state.mu)
        guided = dataclasses.replace(cmd, theta_cmd=pitch, z_cmd=state.z + expected * tick)
        try:
            surfaces = autopilot.step(guided, state, h)
            if not engine:
                surfaces = dataclasses.replace(surfaces, throttle=0.0)
            state = integrate_step(state, surfaces, wind, params, h, thrust)
        except (ModelValidityError, SingularAllocationError) as e:
            logger.warning(f"6-DOF plant re-trimmed at t={t + k * h:.1f} s: {e}")
            state = dataclasses.replace(trim, psi=state.psi, x=state.x, y=state.y, z=state.z, battery_wh=state.battery_wh)
            autopilot.reset()
        expected_sum += expected
    return state, (state.z - z0) / tick, expected_sum / steps


def flight_mode_switch(agent: AgentContext) -> FlightMode:
    """
    Glide/engine hysteresis between the engine floor and the threshold altitude.

    An agent whose battery fell below the reserve is grounded: it is marked
    dead and never runs the engine again.
    """
    th = agent.thresholds
    if agent.battery_fraction < th.battery_reserve:
        if agent.alive:
            logger.warning(
                f"Agent {agent.agent_id} battery at {agent.battery_fraction:.1%} below reserve, landing"
            )
        agent.alive = False
        return FlightMode.GLIDE
    z = agent.uav.z
    if z >= th.z_threshold:
        return FlightMode.GLIDE
    if agent.flight_mode == FlightMode.ENGINE:
        return FlightMode.ENGINE
    if z <= th.z_min:
        return FlightMode.ENGINE
    return FlightMode.GLIDE
