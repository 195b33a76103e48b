"""6-DOF wind-axis dynamics, RK4 integration, control allocation and energy."""

import dataclasses
import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.optimize import fsolve

from soarsim.errors import ModelValidityError, SingularAllocationError
from soarsim.vehicle.aero import aero_coefficients, max_thrust
from soarsim.vehicle.models import (
    DEFLECTION_LIMIT,
    STATE_FIELDS,
    AirframeParams,
    ControlSurfaces,
    UavState,
)

logger = logging.getLogger(__name__)

_COS_EPS = 1e-6


def dynamics_derivative(
    state: UavState,
    surfaces: ControlSurfaces,
    wind_vz: float,
    params: AirframeParams,
    thrust_max: Optional[float] = None,
) -> np.ndarray:
    """
    Time derivative of the 12 dynamic states, ordered as STATE_FIELDS.

    Args:
        state: Current state (V_a > 0)
        surfaces: Deflections and throttle
        wind_vz: Vertical wind at the vehicle (m/s, up positive)
        params: Airframe parameters
        thrust_max: Thrust at full throttle; derived from the airframe if None

    Raises:
        ModelValidityError: Non-positive airspeed or singular cos(beta)/cos(gamma)
    """
    V = state.V_a
    if not V > 0.0:
        raise ModelValidityError("V_a", V)
    cb = math.cos(state.beta)
    cg = math.cos(state.gamma)
    if abs(cb) < _COS_EPS:
        raise ModelValidityError("beta", state.beta)
    if abs(cg) < _COS_EPS:
        raise ModelValidityError("gamma", state.gamma)

    c = aero_coefficients(state, surfaces, params)
    p, q, r = state.p, state.q, state.r
    sa, ca = math.sin(state.alpha), math.cos(state.alpha)
    sb = math.sin(state.beta)
    sg = math.sin(state.gamma)
    sm, cm = math.sin(state.mu), math.cos(state.mu)
    rho, S, m, g = params.rho, params.S, params.m, params.g
    qbar_S = 0.5 * rho * V**2 * S
    k_force = rho * V * S / (2.0 * m)

    p_dot = (
        params.Gamma1 * p * q
        - params.Gamma2 * q * r
        + qbar_S * params.b * (params.Jz * c.C_l + params.Jxz * c.C_n) / params.Gamma
    )
    q_dot = (
        (params.Jz - params.Jx) / params.Jy * p * r
        - params.Jxz / params.Jy * (p**2 - r**2)
        + qbar_S * params.c_bar * c.C_m / params.Jy
    )
    r_dot = (
        params.Gamma3 * p * q
        - params.Gamma1 * q * r
        + qbar_S * params.b * (params.Jxz * c.C_l + params.Jx * c.C_n) / params.Gamma
    )

    thrust = 0.0
    if surfaces.throttle > 0.0:
        t_max = max_thrust(params) if thrust_max is None else thrust_max
        thrust = t_max * surfaces.throttle
    V_dot = qbar_S / m * (c.C_Y * sb - c.C_D) - g * sg + thrust / m
    gamma_dot = k_force * (c.C_L * cm - c.C_Y * sm * cb) - g * cg / V
    psi_dot = k_force / cg * (c.C_L * sm + c.C_Y * cm * cb)
    alpha_dot = q - k_force * c.C_L / cb + g * cg * cm / (V * cb) - math.tan(state.beta) * (p * ca + r * sa)
    beta_dot = k_force * c.C_Y * cb + g * cg * sm / V + p * sa - r * ca
    mu_dot = (
        (p * ca + r * sa) / cb
        + k_force * (c.C_L * (math.tan(state.gamma) * sm + math.tan(state.beta)) + c.C_Y * math.tan(state.gamma) * cm * cb)
        - g * cg * cm * math.tan(state.beta) / V
    )

    x_dot = V * cg * math.cos(state.psi)
    y_dot = V * cg * math.sin(state.psi)
    z_dot = wind_vz + V * sg
    return np.array(
        [p_dot, q_dot, r_dot, V_dot, gamma_dot, psi_dot, alpha_dot, beta_dot, mu_dot, x_dot, y_dot, z_dot]
    )


def rk4(f: Callable[[np.ndarray], np.ndarray], y: np.ndarray, dt: float) -> np.ndarray:
    """One classical Runge-Kutta step for an autonomous system."""
    k1 = f(y)
    k2 = f(y + 0.5 * dt * k1)
    k3 = f(y + 0.5 * dt * k2)
    k4 = f(y + dt * k3)
    return y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def check_envelope(state: UavState, params: AirframeParams) -> None:
    """Raise ModelValidityError naming the first field outside the validity envelope."""
    for name in STATE_FIELDS:
        value = getattr(state, name)
        if not math.isfinite(value):
            raise ModelValidityError(name, value)
    if not 0.5 * params.V_a_min <= state.V_a <= 1.5 * params.V_a_max:
        raise ModelValidityError("V_a", state.V_a)
    if abs(state.beta) > 1.2:
        raise ModelValidityError("beta", state.beta)
    if abs(state.gamma) > 1.4:
        raise ModelValidityError("gamma", state.gamma)
    if abs(state.alpha) > 1.0:
        raise ModelValidityError("alpha", state.alpha)


def integrate_step(
    state: UavState,
    surfaces: ControlSurfaces,
    wind_vz: float,
    params: AirframeParams,
    dt: float,
    thrust_max: Optional[float] = None,
) -> UavState:
    """
    Advance the state by dt with fixed-step RK4.

    Wind and surfaces are held over the step. The battery loses
    engine_power_w * dt / 3600 Wh whenever the throttle is open.

    Raises:
        ModelValidityError: Result leaves the validity envelope
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    t_max = max_thrust(params) if thrust_max is None and surfaces.throttle > 0.0 else thrust_max

    def f(y: np.ndarray) -> np.ndarray:
        return dynamics_derivative(state.with_array(y), surfaces, wind_vz, params, t_max)

    new_state = state.with_array(rk4(f, state.as_array(), dt))
    if surfaces.throttle > 0.0:
        new_state = dataclasses.replace(new_state, battery_wh=battery_after(state.battery_wh, surfaces.throttle, params, dt))
    check_envelope(new_state, params)
    return new_state


def battery_after(battery_wh: float, throttle: float, params: AirframeParams, dt: float) -> float:
    """Remaining battery after dt seconds; constant engine draw while the throttle is open."""
    if throttle <= 0.0:
        return battery_wh
    return max(0.0, battery_wh - params.engine_power_w * dt / 3600.0)


def rotational_terms(state: UavState, params: AirframeParams) -> Tuple[np.ndarray, np.ndarray]:
    """
    Affine-in-control split of the body-rate dynamics: X_dot = F(X) + G(X) U.

    U is ordered (delta_e, delta_a, delta_r). F is the body-rate derivative
    with all deflections at zero.
    """
    V = state.V_a
    if V <= 0.0:
        raise SingularAllocationError("control effectiveness vanishes at zero airspeed")
    zero = ControlSurfaces()
    F = dynamics_derivative(state, zero, 0.0, params, thrust_max=0.0)[:3]
    qbar_S = 0.5 * params.rho * V**2 * params.S
    b, Gm = params.b, params.Gamma
    G = qbar_S * np.array(
        [
            [
                0.0,
                b * (params.Jz * params.C_l_delta_a + params.Jxz * params.C_n_delta_a) / Gm,
                b * (params.Jz * params.C_l_delta_r + params.Jxz * params.C_n_delta_r) / Gm,
            ],
            [params.c_bar * params.C_m_delta_e / params.Jy, 0.0, 0.0],
            [
                0.0,
                b * (params.Jxz * params.C_l_delta_a + params.Jx * params.C_n_delta_a) / Gm,
                b * (params.Jxz * params.C_l_delta_r + params.Jx * params.C_n_delta_r) / Gm,
            ],
        ]
    )
    return F, G


def sdre_allocate(
    state: UavState,
    desired_rates: Tuple[float, float, float],
    params: AirframeParams,
    throttle: float = 0.0,
) -> ControlSurfaces:
    """
    Surface deflections that produce the desired body-rate derivatives.

    Solves U = G(X)^-1 (X_dot_desired - F(X)) and clamps each deflection to
    the saturation limit, setting the saturated flag when any clamp acts.

    Raises:
        SingularAllocationError: G(X) is not invertible at this state
    """
    F, G = rotational_terms(state, params)
    if not np.isfinite(G).all() or np.linalg.cond(G) > 1e12:
        raise SingularAllocationError(f"control matrix singular at V_a={state.V_a:.3f}")
    U = np.linalg.solve(G, np.asarray(desired_rates, dtype=float) - F)
    clipped = np.clip(U, -DEFLECTION_LIMIT, DEFLECTION_LIMIT)
    return ControlSurfaces(
        delta_e=float(clipped[0]),
        delta_a=float(clipped[1]),
        delta_r=float(clipped[2]),
        throttle=throttle,
        saturated=bool(np.any(clipped != U)),
    )


def trim_glide(params: AirframeParams, V_a: float, z: float = 500.0) -> Tuple[UavState, ControlSurfaces]:
    """
    Symmetric wings-level gliding equilibrium at airspeed V_a.

    Solves for (alpha, gamma, delta_e) such that V_dot, gamma_dot and q_dot
    vanish with zero body rates, sideslip and bank.
    """

    def residual(x: np.ndarray) -> np.ndarray:
        alpha, gamma, delta_e = x
        s = UavState(V_a=V_a, alpha=alpha, gamma=gamma, z=z, battery_wh=params.battery_capacity_wh)
        d = dynamics_derivative(s, ControlSurfaces(delta_e=delta_e), 0.0, params, thrust_max=0.0)
        return np.array([d[3], d[4], d[1]])

    solution, info, ier, msg = fsolve(residual, np.array([0.05, -0.05, 0.0]), full_output=True, xtol=1e-12)
    if ier != 1:
        logger.warning(f"Glide trim at V_a={V_a} did not converge: {msg}")
    alpha, gamma, delta_e = (float(v) for v in solution)
    state = UavState(V_a=V_a, alpha=alpha, gamma=gamma, z=z, battery_wh=params.battery_capacity_wh)
    return state, ControlSurfaces(delta_e=delta_e)


@dataclass(frozen=True)
class EnergyEstimate:
    """Specific energy (m) and, with enough history, its first two rates."""

    E: float
    E_dot: Optional[float] = None
    E_ddot: Optional[float] = None


def specific_energy(
    state: UavState, g: float = 9.81, V_dot: Optional[float] = None, z_dot: Optional[float] = None
) -> EnergyEstimate:
    """Energy height E = V^2/(2g) + z, with E_dot when rates are supplied."""
    E = state.V_a**2 / (2.0 * g) + state.z
    if V_dot is None or z_dot is None:
        return EnergyEstimate(E=E)
    return EnergyEstimate(E=E, E_dot=state.V_a * V_dot / g + z_dot)


class EnergyTracker:
    """Per-agent finite-difference estimator of E, E_dot and a low-passed E_ddot."""

    def __init__(self, g: float = 9.81):
        self.g = g
        self._prev: Optional[Tuple[float, float, float]] = None  # (t, V_a, z)
        self._prev_e_dot: Optional[Tuple[float, float]] = None  # (t, E_dot)
        self._raw_e_ddot: list = []

    def update(self, t: float, state: UavState) -> EnergyEstimate:
        estimate = specific_energy(state, self.g)
        if self._prev is None or t <= self._prev[0]:
            self._prev = (t, state.V_a, state.z)
            return estimate
        dt = t - self._prev[0]
        V_dot = (state.V_a - self._prev[1]) / dt
        z_dot = (state.z - self._prev[2]) / dt
        self._prev = (t, state.V_a, state.z)
        estimate = specific_energy(state, self.g, V_dot, z_dot)
        E_ddot = None
        if self._prev_e_dot is not None:
            raw = (estimate.E_dot - self._prev_e_dot[1]) / (t - self._prev_e_dot[0])
            self._raw_e_ddot = (self._raw_e_ddot + [raw])[-2:]
            E_ddot = float(np.mean(self._raw_e_ddot))
        self._prev_e_dot = (t, estimate.E_dot)
        return EnergyEstimate(E=estimate.E, E_dot=estimate.E_dot, E_ddot=E_ddot)
