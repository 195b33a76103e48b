from soarsim.vehicle.aero import (
    aero_coefficients,
    best_glide_speed,
    glide_sink,
    max_thrust,
    sink_rate,
    speed_to_fly,
)
from soarsim.vehicle.airframe import load_airframe, parse_airframe_text
from soarsim.vehicle.dynamics import (
    EnergyEstimate,
    EnergyTracker,
    battery_after,
    dynamics_derivative,
    integrate_step,
    rk4,
    rotational_terms,
    sdre_allocate,
    specific_energy,
    trim_glide,
)
from soarsim.vehicle.models import (
    DEFLECTION_LIMIT,
    AeroCoefficients,
    AirframeParams,
    ControlSurfaces,
    UavState,
)

__all__ = [
    "DEFLECTION_LIMIT",
    "AeroCoefficients",
    "AirframeParams",
    "ControlSurfaces",
    "EnergyEstimate",
    "EnergyTracker",
    "UavState",
    "aero_coefficients",
    "battery_after",
    "best_glide_speed",
    "dynamics_derivative",
    "glide_sink",
    "integrate_step",
    "load_airframe",
    "max_thrust",
    "parse_airframe_text",
    "rk4",
    "rotational_terms",
    "sdre_allocate",
    "sink_rate",
    "speed_to_fly",
    "specific_energy",
    "trim_glide",
]
