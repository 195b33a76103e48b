"""Airframe parameters, vehicle state and control inputs."""

import dataclasses
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np


@dataclass(frozen=True)
class AirframeParams:
    """Geometry, inertia, aerodynamic derivatives and operating limits of one airframe."""

    S: float
    b: float
    c_bar: float
    m: float
    Jx: float
    Jy: float
    Jz: float
    Jxz: float
    e: float
    rho: float
    g: float
    C_L0: float
    C_L_alpha: float
    C_L_delta_e: float
    C_D0: float
    C_Y_beta: float
    C_Y_delta_r: float
    C_l_beta: float
    C_l_p: float
    C_l_r: float
    C_l_delta_a: float
    C_l_delta_r: float
    C_m0: float
    C_m_alpha: float
    C_m_q: float
    C_m_delta_e: float
    C_n_beta: float
    C_n_p: float
    C_n_r: float
    C_n_delta_a: float
    C_n_delta_r: float
    V_a_min: float
    V_a_max: float
    R_min: float
    psi_dot_max: float
    battery_capacity_wh: float
    engine_power_w: float
    engine_climb_rate: float

    def __post_init__(self) -> None:
        if min(self.Jx, self.Jy, self.Jz) <= 0:
            raise ValueError("inertias must be positive")
        if self.Gamma <= 0:
            raise ValueError("Jx*Jz - Jxz^2 must be positive")
        if not 0 < self.V_a_min < self.V_a_max:
            raise ValueError("airspeed envelope must satisfy 0 < V_a_min < V_a_max")

    @property
    def Gamma(self) -> float:
        return self.Jx * self.Jz - self.Jxz**2

    @property
    def Gamma1(self) -> float:
        return self.Jxz * (self.Jx - self.Jy + self.Jz) / self.Gamma

    @property
    def Gamma2(self) -> float:
        return (self.Jz * (self.Jz - self.Jy) + self.Jxz**2) / self.Gamma

    @property
    def Gamma3(self) -> float:
        return (self.Jx * (self.Jx - self.Jy) + self.Jxz**2) / self.Gamma

    @property
    def aspect_ratio(self) -> float:
        return self.b**2 / self.S

    @property
    def weight(self) -> float:
        return self.m * self.g


STATE_FIELDS: Tuple[str, ...] = ("p", "q", "r", "V_a", "gamma", "psi", "alpha", "beta", "mu", "x", "y", "z")


@dataclass(frozen=True)
class UavState:
    """Wind-axis 6-DOF state with position and remaining battery energy."""

    p: float = 0.0
    q: float = 0.0
    r: float = 0.0
    V_a: float = 12.0
    gamma: float = 0.0
    psi: float = 0.0
    alpha: float = 0.0
    beta: float = 0.0
    mu: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 500.0
    battery_wh: float = 50.0

    @property
    def position(self) -> Tuple[float, float, float]:
        return (self.x, self.y, self.z)

    @property
    def xy(self) -> Tuple[float, float]:
        return (self.x, self.y)

    @property
    def phi(self) -> float:
        """Roll attitude approximated by the bank angle."""
        return self.mu

    @property
    def theta(self) -> float:
        """Pitch attitude approximated by flight-path angle plus angle of attack."""
        return self.gamma + self.alpha

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in STATE_FIELDS], dtype=float)

    def with_array(self, values: np.ndarray) -> "UavState":
        return dataclasses.replace(self, **{name: float(v) for name, v in zip(STATE_FIELDS, values)})

    def is_finite(self) -> bool:
        return all(math.isfinite(v) for v in self.as_array()) and math.isfinite(self.battery_wh)


@dataclass(frozen=True)
class ControlSurfaces:
    """Surface deflections (rad) and throttle; saturated marks clamped allocations."""

    delta_e: float = 0.0
    delta_a: float = 0.0
    delta_r: float = 0.0
    throttle: float = 0.0
    saturated: bool = False


@dataclass(frozen=True)
class AeroCoefficients:
    C_l: float
    C_m: float
    C_n: float
    C_Y: float
    C_D: float
    C_L: float


DEFLECTION_LIMIT = 0.5
