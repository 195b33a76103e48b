"""Heading-doublet tracking episode on the 6-DOF plant, used as the tuning oracle."""

import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from shapely.geometry import LineString, Point

from soarsim.control.dlnt import dlnt_tune
from soarsim.control.models import DlntConfig, CommandSet, PidGains, TuningResult, gain_box
from soarsim.control.pid import Autopilot
from soarsim.errors import ModelValidityError, SingularAllocationError
from soarsim.vehicle.aero import max_thrust
from soarsim.vehicle.dynamics import integrate_step, trim_glide
from soarsim.vehicle.models import AirframeParams

logger = logging.getLogger(__name__)

# Reward charged per component for every second flown outside the model envelope.
EXIT_PENALTY = 100.0


@dataclass(frozen=True)
class DoubletSpec:
    duration: float = 60.0
    dt: float = 0.05
    airspeed: float = 12.0
    altitude: float = 500.0
    amplitude: float = 0.35
    switch_times: Tuple[float, float, float] = (10.0, 25.0, 40.0)


def heading_command(t: float, doublet: DoubletSpec) -> float:
    t1, t2, t3 = doublet.switch_times
    if t1 <= t < t2:
        return doublet.amplitude
    if t2 <= t < t3:
        return -doublet.amplitude
    return 0.0


def reference_path(doublet: DoubletSpec) -> LineString:
    """Ground track of an ideal vehicle following the heading schedule at constant speed."""
    t1, t2, t3 = doublet.switch_times
    legs = [(0.0, t1), (doublet.amplitude, t2 - t1), (-doublet.amplitude, t3 - t2), (0.0, doublet.duration - t3)]
    points = [(0.0, 0.0)]
    for heading, seconds in legs:
        x, y = points[-1]
        d = doublet.airspeed * seconds
        points.append((x + d * math.cos(heading), y + d * math.sin(heading)))
    return LineString(points)


def doublet_episode(gains: PidGains, params: AirframeParams, doublet: DoubletSpec = DoubletSpec()) -> np.ndarray:
    """
    Fly the heading doublet and score it.

    Returns:
        Six rewards: integrated |error| of the roll, pitch, yaw, altitude and
        airspeed channels, then the mean cross-track distance to the
        reference path. Leaving the model envelope ends the episode and
        charges EXIT_PENALTY per remaining second on every component.
    """
    trim, _ = trim_glide(params, doublet.airspeed, z=doublet.altitude)
    state = trim
    autopilot = Autopilot(gains, params)
    thrust = max_thrust(params)
    path = reference_path(doublet)
    steps = int(round(doublet.duration / doublet.dt))
    integrated = np.zeros(5)
    cross_track = 0.0
    flown = 0
    for k in range(steps):
        t = k * doublet.dt
        cmd = CommandSet(
            phi_cmd=0.0,
            theta_cmd=trim.alpha,
            psi_cmd=heading_command(t, doublet),
            z_cmd=doublet.altitude,
            Va_cmd=doublet.airspeed,
        )
        try:
            surfaces = autopilot.step(cmd, state, doublet.dt)
            state = integrate_step(state, surfaces, 0.0, params, doublet.dt, thrust)
        except (ModelValidityError, SingularAllocationError) as e:
            remaining = doublet.duration - t
            logger.debug(f"Doublet left the envelope at t={t:.2f}s: {e}")
            integrated += EXIT_PENALTY * remaining
            mean_track = cross_track / flown if flown else 0.0
            return np.append(integrated, mean_track + EXIT_PENALTY * remaining)
        integrated += np.abs(autopilot.last_errors) * doublet.dt
        cross_track += path.distance(Point(state.x, state.y))
        flown += 1
    return np.append(integrated, cross_track / flown if flown else 0.0)


def tune_autopilot(
    params: AirframeParams,
    config: DlntConfig,
    rng: np.random.Generator,
    kp_max: float = 5.0,
    ki_max: float = 1.0,
    kd_max: float = 2.0,
    doublet: DoubletSpec = DoubletSpec(),
) -> TuningResult:
    """Run the tuner over the gain box with the doublet episode as oracle."""
    lower, upper = gain_box(kp_max, ki_max, kd_max)

    def oracle(vector: np.ndarray) -> np.ndarray:
        return doublet_episode(PidGains.from_vector(vector), params, doublet)

    result = dlnt_tune(oracle, config, rng, lower, upper)
    logger.info(
        f"Tuned autopilot: best aggregate {result.best.aggregate:.3f} "
        f"(initial sample best {result.initial_best:.3f}) after {len(result.history)} evaluations"
    )
    return result
