"""Orbit guidance for evaluating, searching and exploiting lift."""

import logging
import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, List, Optional, Tuple

import numpy as np

from soarsim.control.models import CommandSet
from soarsim.control.pid import turn_rate_command, wrap_angle
from soarsim.environment.models import Point2
from soarsim.vehicle.models import UavState

if TYPE_CHECKING:
    from soarsim.agents.context import AgentContext

logger = logging.getLogger(__name__)

# Pull toward the circle per unit of normalized radial error.
ORBIT_GAIN = 2.0
HEADING_GAIN = 0.8
GRAVITY = 9.81


@dataclass(frozen=True)
class OrbitEvaluation:
    """Outcome of one full orbit."""

    w_c: float
    center: Point2
    strongest: Point2
    samples: int


@dataclass
class OrbitTracker:
    """
    Accumulates heading change and climb samples around an orbit centre.

    Samples are (x, y, measured climb rate, climb minus the still-air
    expectation); the second rate is the air mass motion.
    """

    center: Point2
    radius: float
    direction: int = 1
    turned: float = 0.0
    samples: List[Tuple[float, float, float, float]] = field(default_factory=list)
    last_heading: Optional[float] = None

    def record(self, state: UavState, climb_rate: float, expected_rate: float) -> None:
        if self.last_heading is not None:
            self.turned += abs(wrap_angle(state.psi - self.last_heading))
        self.last_heading = state.psi
        self.samples.append((state.x, state.y, climb_rate, climb_rate - expected_rate))

    @property
    def complete(self) -> bool:
        return self.turned >= 2.0 * math.pi

    def evaluate(self) -> OrbitEvaluation:
        """
        Mean climb rate over the orbit and a refined centre.

        The centre is the centroid of the samples weighted by positive air
        mass climb; with no rising sample the current centre is kept.
        """
        if not self.samples:
            return OrbitEvaluation(w_c=0.0, center=self.center, strongest=self.center, samples=0)
        data = np.asarray(self.samples, dtype=float)
        w_c = float(data[:, 2].mean())
        weights = np.clip(data[:, 3], 0.0, None)
        if weights.sum() > 0.0:
            center = (float(np.average(data[:, 0], weights=weights)), float(np.average(data[:, 1], weights=weights)))
        else:
            center = self.center
        k = int(np.argmax(data[:, 3]))
        return OrbitEvaluation(w_c=w_c, center=center, strongest=(float(data[k, 0]), float(data[k, 1])), samples=len(data))

    def restart(self, center: Optional[Point2] = None) -> None:
        if center is not None:
            self.center = center
        self.turned = 0.0
        self.samples = []


def turn_rate_limit(V_a: float, psi_dot_max: float, R_min: float) -> float:
    return min(psi_dot_max, V_a / R_min)


def bank_for_rate(V_a: float, rate: float) -> float:
    """Coordinated bank angle for a turn rate."""
    return math.atan(V_a * rate / GRAVITY)


def orbit_command(
    state: UavState,
    center: Point2,
    radius: float,
    direction: int,
    airspeed: float,
    rate_limit: float,
    feedforward: Optional[float] = None,
) -> CommandSet:
    """
    Circle-following command around center.

    The desired heading is the circle tangent bent toward the circle in
    proportion to the radial error; the turn rate is the feedforward orbit
    rate plus a heading correction.
    """
    dx, dy = state.x - center[0], state.y - center[1]
    d = math.hypot(dx, dy)
    theta = math.atan2(dy, dx)
    psi_des = theta + direction * (math.pi / 2.0 + math.atan(ORBIT_GAIN * (d - radius) / radius))
    base = state.V_a / radius if feedforward is None else feedforward
    rate = direction * base + HEADING_GAIN * wrap_angle(psi_des - state.psi)
    rate = max(-rate_limit, min(rate_limit, rate))
    return CommandSet(
        phi_cmd=bank_for_rate(state.V_a, rate),
        psi_cmd=wrap_angle(psi_des),
        z_cmd=state.z,
        Va_cmd=airspeed,
    )


def goto_command(state: UavState, target: Point2, airspeed: float, rate_limit: float) -> CommandSet:
    bearing = math.atan2(target[1] - state.y, target[0] - state.x)
    rate = HEADING_GAIN * wrap_angle(bearing - state.psi)
    rate = max(-rate_limit, min(rate_limit, rate))
    return CommandSet(phi_cmd=bank_for_rate(state.V_a, rate), psi_cmd=bearing, z_cmd=state.z, Va_cmd=airspeed)


def orbit_radius(agent: "AgentContext", R_min: float) -> float:
    return max(R_min, agent.thresholds.thermal_radius)


def first_turn_controller(agent: "AgentContext", lift_center_estimate: Point2, R_min: float, psi_dot_max: float) -> CommandSet:
    """One constant-radius circle around the lift estimate at thermalling speed."""
    rate_limit = turn_rate_limit(agent.uav.V_a, psi_dot_max, R_min)
    direction = agent.orbit.direction if agent.orbit is not None else 1
    return orbit_command(
        agent.uav, lift_center_estimate, orbit_radius(agent, R_min), direction, agent.speeds.thermal, rate_limit
    )


def exploit_controller(
    agent: "AgentContext", updraft_estimate: Point2, E_ddot: Optional[float], R_min: float, psi_dot_max: float
) -> CommandSet:
    """
    Climbing orbit whose rate follows the energy-acceleration law.

    A rising energy acceleration widens the circle toward the stronger side;
    with no estimate yet the plain orbit rate V/R is used.
    """
    radius = orbit_radius(agent, R_min)
    rate_limit = turn_rate_limit(agent.uav.V_a, psi_dot_max, R_min)
    feedforward = turn_rate_command(agent.uav.V_a, radius, E_ddot or 0.0, agent.thresholds.k_psi, rate_limit)
    direction = agent.orbit.direction if agent.orbit is not None else 1
    return orbit_command(
        agent.uav, updraft_estimate, radius, direction, agent.speeds.thermal, rate_limit, feedforward=feedforward
    )
