"""Aerodynamic coefficients, glide polar and speed-to-fly."""

import math
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar

from soarsim.vehicle.models import AeroCoefficients, AirframeParams, ControlSurfaces, UavState


def aero_coefficients(state: UavState, surfaces: ControlSurfaces, params: AirframeParams) -> AeroCoefficients:
    """Moment and force coefficients of the linear aerodynamic model."""
    V = state.V_a
    if V <= 0.0:
        raise ValueError("aerodynamic coefficients need positive airspeed")
    k = 1.0 / (2.0 * V)
    C_l = (
        params.C_l_beta * state.beta
        + k * (params.C_l_p * state.p * params.b + params.C_l_r * state.r * params.b)
        + params.C_l_delta_r * surfaces.delta_r
        + params.C_l_delta_a * surfaces.delta_a
    )
    C_m = (
        params.C_m0
        + params.C_m_alpha * state.alpha
        + k * params.C_m_q * state.q * params.c_bar
        + params.C_m_delta_e * surfaces.delta_e
    )
    C_n = (
        params.C_n_beta * state.beta
        + k * (params.C_n_p * state.p * params.b + params.C_n_r * state.r * params.b)
        + params.C_n_delta_r * surfaces.delta_r
        + params.C_n_delta_a * surfaces.delta_a
    )
    C_Y = params.C_Y_beta * state.beta + params.C_Y_delta_r * surfaces.delta_r
    C_L = params.C_L0 + params.C_L_alpha * state.alpha + params.C_L_delta_e * surfaces.delta_e
    C_D = drag_coefficient(C_L, params)
    return AeroCoefficients(C_l=C_l, C_m=C_m, C_n=C_n, C_Y=C_Y, C_D=C_D, C_L=C_L)


def drag_coefficient(C_L: float, params: AirframeParams) -> float:
    """Parabolic drag polar."""
    return params.C_D0 + C_L**2 / (math.pi * params.e * params.aspect_ratio)


def glide_sink(V_a: float, C_D: float, C_L: float) -> float:
    """Altitude change per second in a steady glide (negative when sinking)."""
    if C_L <= 0.0:
        raise ValueError("glide sink needs positive lift coefficient")
    return -V_a * C_D / C_L


def required_lift_coefficient(params: AirframeParams, V_a: float, bank: float = 0.0) -> float:
    """C_L that supports the weight in a coordinated turn at the given bank."""
    return 2.0 * params.weight / (params.rho * V_a**2 * params.S * math.cos(bank))


def sink_rate(params: AirframeParams, V_a: float, bank: float = 0.0) -> float:
    """Positive still-air sink rate (m/s) at airspeed and bank."""
    C_L = required_lift_coefficient(params, V_a, bank)
    return -glide_sink(V_a, drag_coefficient(C_L, params), C_L)


def _bounded_minimum(objective, low: float, high: float, grid_points: int = 200) -> float:
    """Grid scan then bounded golden-section/Brent refinement around the best cell."""
    grid = np.linspace(low, high, grid_points)
    values = [objective(v) for v in grid]
    i = int(np.argmin(values))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, grid_points - 1)]
    result = minimize_scalar(objective, bounds=(lo, hi), method="bounded", options={"xatol": 1e-6})
    best = float(result.x)
    return best if objective(best) <= values[i] else float(grid[i])


def best_glide_speed(params: AirframeParams, state: Optional[UavState] = None) -> float:
    """Minimum-sink airspeed within the envelope (at the state's bank, if given)."""
    return _min_sink_speed(params, state.mu if state is not None else 0.0)


@lru_cache(maxsize=256)
def _min_sink_speed(params: AirframeParams, bank: float) -> float:
    return _bounded_minimum(lambda v: sink_rate(params, v, bank), params.V_a_min, params.V_a_max)


def speed_to_fly(params: AirframeParams, expected_climb: float, bank: float = 0.0, v_cap: Optional[float] = None) -> float:
    """
    MacCready cruise speed for an expected thermal climb rate.

    Maximizes average cross-country speed V*w/(w + sink(V)); with zero
    expected climb this reduces to the best-glide (minimum sink) speed.
    """
    high = params.V_a_max if v_cap is None else min(params.V_a_max, v_cap)
    if expected_climb <= 0.0:
        return _bounded_minimum(lambda v: sink_rate(params, v, bank), params.V_a_min, high)
    return _bounded_minimum(
        lambda v: (expected_climb + sink_rate(params, v, bank)) / v, params.V_a_min, high
    )


@lru_cache(maxsize=32)
def max_thrust(params: AirframeParams) -> float:
    """Thrust giving the configured sustained climb rate at best-glide speed."""
    v = best_glide_speed(params)
    C_L = required_lift_coefficient(params, v)
    drag = 0.5 * params.rho * v**2 * params.S * drag_coefficient(C_L, params)
    return params.weight * params.engine_climb_rate / v + drag
