"""Per-agent state carried between ticks."""

import logging
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Deque, Dict, List, Optional, Tuple

from soarsim.agents.models import FlightMode, SoarState, is_legal
from soarsim.agents.soaring import OrbitTracker
from soarsim.agents.tasks import SubMission
from soarsim.control.pid import Autopilot
from soarsim.environment.models import Point2, Region
from soarsim.errors import IllegalTransitionError
from soarsim.maps.store import MapStore
from soarsim.planning import ObstacleObservation, SubArea, coverage_width
from soarsim.vehicle.dynamics import EnergyTracker
from soarsim.vehicle.models import UavState

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Thresholds:
    """Behavior thresholds shared by all agents of a run."""

    delta_map: float = 800.0
    delta_l: float = 120.0
    delta_t: float = 60.0
    tau_t: float = 30.0
    z_threshold: float = 400.0
    z_min: float = 225.0
    z_max: float = 975.0
    w_c_min: float = 0.5
    sigma_u: float = 0.2
    battery_reserve: float = 0.10
    fov: float = math.radians(60.0)
    coverage_width: float = 230.94
    thermal_radius: float = 40.0
    search_orbit_radius: float = 150.0
    arrival_radius: float = 60.0
    k_psi: float = 0.05
    boundary_margin: float = 60.0
    updraft_capacity: int = 2
    altitude_separation: float = 50.0
    altitude_tolerance: float = 25.0
    r_safe: float = 30.0
    rho_factor: float = 1.5
    horizon_length: float = 500.0
    horizon_duration: float = 20.0
    local_radius: float = 500.0
    exploration_destinations: int = 6
    lift_memory: float = 480.0

    def __post_init__(self) -> None:
        for name in (("delta_map", "delta_l", "delta_t", "tau_t", "z_min", "sigma_u", "thermal_radius", "coverage_width", "lift_memory")):
            if getattr(self, name) <= 0:
                raise ValueError(f"threshold {name} must be positive")
        if not self.z_min < self.z_threshold < self.z_max:
            raise ValueError("thresholds must satisfy z_min < z_threshold < z_max")
        if not 0.0 < self.battery_reserve < 1.0:
            raise ValueError("battery reserve is a fraction in (0, 1)")

    @classmethod
    def from_settings(cls, settings) -> "Thresholds":
        """
        Thresholds from run settings.

        The engine floor and the soaring ceiling sit one altitude tolerance
        inside the region's altitude band so neither is crossed between ticks.
        """
        a, p, region = settings.agents, settings.planning, settings.region
        fov = math.radians(a.fov_deg)
        return cls(
            delta_map=a.delta_map,
            delta_l=a.delta_l,
            delta_t=a.delta_t,
            tau_t=a.tau_t,
            z_threshold=a.z_threshold,
            z_min=region.z_min + a.altitude_tolerance,
            z_max=region.z_max - a.altitude_tolerance,
            w_c_min=a.w_c_min,
            sigma_u=a.sigma_u,
            battery_reserve=a.battery_reserve,
            fov=fov,
            coverage_width=coverage_width(fov, region.z_min),
            thermal_radius=a.thermal_radius,
            search_orbit_radius=a.search_orbit_radius,
            arrival_radius=a.arrival_radius,
            k_psi=a.k_psi,
            boundary_margin=a.boundary_margin,
            updraft_capacity=a.updraft_capacity,
            altitude_separation=a.altitude_separation,
            altitude_tolerance=a.altitude_tolerance,
            r_safe=p.r_safe,
            rho_factor=p.rho_factor,
            horizon_length=p.horizon_length,
            horizon_duration=p.horizon_duration,
            local_radius=p.local_radius,
            exploration_destinations=p.exploration_destinations,
            lift_memory=settings.maps.c_max,
        )

    @property
    def lift_needed_altitude(self) -> float:
        """Below this altitude an agent starts looking for lift."""
        return self.z_threshold + 0.5 * (self.z_max - self.z_threshold)


@dataclass(frozen=True)
class SpeedProfile:
    thermal: float
    cruise: float
    v_cap: float


@dataclass(frozen=True)
class PeerState:
    """Immutable per-tick view of an agent, as its peers see it."""

    agent_id: int
    position: Tuple[float, float, float]
    airspeed: float
    heading: float
    path_angle: float
    soar_state: SoarState
    orbit_center: Optional[Point2] = None
    critical: bool = False
    alive: bool = True

    def as_obstacle(self) -> ObstacleObservation:
        return ObstacleObservation(
            id=self.agent_id,
            position=self.position,
            velocity=self.airspeed,
            heading=self.heading,
            path_angle=self.path_angle,
        )


@dataclass
class Substitution:
    """What a substituting agent was doing before it covered for a soaring peer."""

    soaring_agent: int
    task: SubMission
    area: SubArea
    waypoints: Tuple[Point2, ...]
    total_waypoints: int


@dataclass
class AgentContext:
    agent_id: int
    uav: UavState
    area: SubArea
    task: SubMission
    region: Region
    thresholds: Thresholds
    maps: MapStore
    speeds: SpeedProfile
    battery_capacity_wh: float
    soar_state: SoarState = SoarState.FOLLOW_COVERAGE_PLANNER
    flight_mode: FlightMode = FlightMode.GLIDE
    waypoints: Deque[Point2] = field(default_factory=deque)
    total_waypoints: int = 0
    alive: bool = True
    lift_needed: bool = False
    rejected_lifts: Dict[int, float] = field(default_factory=dict)
    soar_cooldown_until: float = -math.inf
    target_lift: Optional[int] = None
    orbit: Optional[OrbitTracker] = None
    orbits_flown: int = 0
    expected_rate: float = 0.0
    climb_rate: float = 0.0
    e_ddot: Optional[float] = None
    detected: Tuple[int, ...] = ()
    release_requested: bool = False
    substitution: Optional[Substitution] = None
    recommendation: Optional[str] = None
    autopilot: Optional[Autopilot] = None
    energy: EnergyTracker = field(default_factory=EnergyTracker)
    transitions: List[Tuple[float, SoarState, SoarState]] = field(default_factory=list)

    @property
    def battery_fraction(self) -> float:
        return self.uav.battery_wh / self.battery_capacity_wh

    @property
    def critical(self) -> bool:
        """Near the engine floor or the battery reserve; local decisions take priority."""
        th = self.thresholds
        return self.uav.z <= th.z_min + 2 * th.altitude_tolerance or self.battery_fraction <= 1.5 * th.battery_reserve

    @property
    def progress(self) -> float:
        if self.total_waypoints == 0:
            return 0.0
        return 1.0 - len(self.waypoints) / self.total_waypoints

    @property
    def completed(self) -> bool:
        return self.total_waypoints > 0 and not self.waypoints

    def set_waypoints(self, waypoints) -> None:
        self.waypoints = deque(waypoints)
        self.total_waypoints = len(self.waypoints)

    def set_state(self, new: SoarState, t: float) -> None:
        """
        Move the state machine along a legal edge.

        Raises:
            IllegalTransitionError: new is not reachable from the current state
        """
        if not is_legal(self.soar_state, new):
            raise IllegalTransitionError(
                f"agent {self.agent_id}: {self.soar_state.value} -> {new.value} is not a legal transition"
            )
        if new != self.soar_state:
            logger.debug(f"t={t:.0f} agent {self.agent_id}: {self.soar_state.value} -> {new.value}")
            self.transitions.append((t, self.soar_state, new))
            self.soar_state = new

    def snapshot(self) -> PeerState:
        return PeerState(
            agent_id=self.agent_id,
            position=self.uav.position,
            airspeed=self.uav.V_a,
            heading=self.uav.psi,
            path_angle=self.uav.gamma,
            soar_state=self.soar_state,
            orbit_center=self.orbit.center if self.orbit is not None else None,
            critical=self.critical,
            alive=self.alive,
        )
