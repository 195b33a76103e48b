"""PID channels, tracking errors, the soaring turn-rate law and the autopilot cascade."""

import math
from typing import Dict, Optional, Tuple

import numpy as np

from soarsim.control.models import CHANNELS, ChannelGains, CommandSet, PidGains, PidState
from soarsim.vehicle.dynamics import sdre_allocate
from soarsim.vehicle.models import AirframeParams, ControlSurfaces, UavState


def wrap_angle(angle: float) -> float:
    """Wrap to (-pi, pi]."""
    return math.pi - (math.pi - angle) % (2.0 * math.pi)


def pid_step(
    gains: ChannelGains,
    error: float,
    state: PidState,
    dt: float,
    limit: Optional[float] = None,
) -> Tuple[float, PidState]:
    """
    One PID update with trapezoidal integral and first-difference derivative.

    The derivative is zero on the first call. When limit is given and the
    output saturates, the integral is not advanced (conditional integration).

    Returns:
        (output, next controller state)
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    prev = error if state.prev_error is None else state.prev_error
    integral = state.integral + 0.5 * (error + prev) * dt
    derivative = 0.0 if state.prev_error is None else (error - state.prev_error) / dt
    u = gains.kp * error + gains.ki * integral + gains.kd * derivative
    if limit is not None and abs(u) > limit:
        integral = state.integral
        u = math.copysign(limit, u)
    return u, PidState(integral=integral, prev_error=error)


def tracking_errors(cmd: CommandSet, state: UavState) -> np.ndarray:
    """Command minus actual for (roll, pitch, yaw, altitude, airspeed); angles wrapped."""
    return np.array(
        [
            wrap_angle(cmd.phi_cmd - state.phi),
            wrap_angle(cmd.theta_cmd - state.theta),
            wrap_angle(cmd.psi_cmd - state.psi),
            cmd.z_cmd - state.z,
            cmd.Va_cmd - state.V_a,
        ]
    )


def turn_rate_command(
    V_a: float,
    R_cmd: float,
    E_ddot: float,
    K_psi: float,
    psi_dot_max: Optional[float] = None,
) -> float:
    """Steady orbit rate V/R corrected by the specific-energy acceleration."""
    if R_cmd <= 0.0:
        raise ValueError("R_cmd must be positive")
    rate = V_a / R_cmd - K_psi * E_ddot
    if psi_dot_max is not None:
        rate = max(-psi_dot_max, min(psi_dot_max, rate))
    return rate


# Outer-loop scaling from the dimensionless channel outputs to physical commands.
_MAX_BANK = 0.6
_MAX_PITCH = 0.35
_ALTITUDE_TO_PITCH = 0.02
_RATE_STIFFNESS = 16.0
_RATE_DAMPING = 8.0
_YAW_DAMPER = 2.0
_THROTTLE_TRIM = 0.15
_THROTTLE_PER_UNIT = 0.1


class Autopilot:
    """
    Five-channel cascade feeding body-rate derivative demands to the SDRE allocator.

    heading -> bank, bank -> roll acceleration, altitude -> pitch,
    pitch -> pitch acceleration, airspeed -> throttle. The yaw rate is
    driven toward the coordinated-turn rate.
    """

    def __init__(self, gains: PidGains, params: AirframeParams):
        self.gains = gains
        self.params = params
        self.reset()

    def reset(self) -> None:
        self._states: Dict[str, PidState] = {c: PidState() for c in CHANNELS}
        self.last_errors = np.zeros(len(CHANNELS))

    def _run(self, channel: str, error: float, dt: float, limit: Optional[float] = None) -> float:
        u, self._states[channel] = pid_step(getattr(self.gains, channel), error, self._states[channel], dt, limit)
        return u

    def step(self, cmd: CommandSet, state: UavState, dt: float) -> ControlSurfaces:
        """Control surfaces for one dynamics step; last_errors holds the inner-loop errors."""
        e_psi = wrap_angle(cmd.psi_cmd - state.psi)
        phi_des = cmd.phi_cmd + self._run("yaw", e_psi, dt, _MAX_BANK)
        phi_des = max(-_MAX_BANK, min(_MAX_BANK, phi_des))
        e_phi = wrap_angle(phi_des - state.phi)
        p_dot = _RATE_STIFFNESS * self._run("roll", e_phi, dt) - _RATE_DAMPING * state.p

        e_z = cmd.z_cmd - state.z
        theta_des = cmd.theta_cmd + _ALTITUDE_TO_PITCH * self._run("altitude", e_z, dt, _MAX_PITCH / _ALTITUDE_TO_PITCH)
        theta_des = max(-_MAX_PITCH, min(_MAX_PITCH, theta_des))
        e_theta = wrap_angle(theta_des - state.theta)
        q_dot = _RATE_STIFFNESS * self._run("pitch", e_theta, dt) - _RATE_DAMPING * state.q

        r_des = self.params.g * math.tan(state.mu) / state.V_a
        r_dot = _YAW_DAMPER * (r_des - state.r)

        e_v = cmd.Va_cmd - state.V_a
        u_v = self._run("airspeed", e_v, dt, (1.0 - _THROTTLE_TRIM) / _THROTTLE_PER_UNIT)
        throttle = max(0.0, min(1.0, _THROTTLE_TRIM + _THROTTLE_PER_UNIT * u_v))

        self.last_errors = np.array([e_phi, e_theta, e_psi, e_z, e_v])
        return sdre_allocate(state, (p_dot, q_dot, r_dot), self.params, throttle=throttle)
