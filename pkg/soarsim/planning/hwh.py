"""
Hop-by-hop horizon path planning.

The planner flies straight hops toward the destination while the line of
sight is clear of static no-fly zones and the hops inside the time horizon
stay clear of the predicted peer occupancy. Otherwise it resolves the
conflict: a visibility graph around the inflated zones gives a guide point,
a fan of headings, climb angles and speeds around the guide bearing gives
candidate sub-destinations, and the candidate with acceptable collision risk
and a clear onward line that lies closest to the goal is taken.
"""

import logging
import math
import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from scipy.special import expit
from shapely.geometry import LineString, Point, Polygon

from soarsim.control.pid import wrap_angle
from soarsim.environment.models import Point2, Region
from soarsim.errors import TrappedError
from soarsim.planning.models import Horizon, NoFlyZone, ObstacleObservation, PlannedPath, Point3

logger = logging.getLogger(__name__)

_FAN_OFFSETS = tuple(math.radians(a) for a in (-60, -40, -20, 0, 20, 40, 60))
_CLIMB_STEP = 0.1
# Graph nodes sit on zones inflated by r_safe * (1 + 2m); edges are tested against r_safe * (1 + m).
_INFLATION_MARGIN = 0.15
_ARRIVAL_TOL = 1e-6
_CLEARANCE_TOL = 1e-6


@dataclass(frozen=True)
class PlannerLimits:
    """Speed, turn and climb envelope the planner must respect."""

    v_min: float = 6.0
    v_max: float = 14.0
    psi_dot_max: float = 0.75
    gamma_max: float = 0.3
    r_safe: float = 30.0
    rho_factor: float = 1.5

    def __post_init__(self) -> None:
        if not 0 < self.v_min <= self.v_max:
            raise ValueError("planner speeds must satisfy 0 < v_min <= v_max")
        if self.r_safe <= 0:
            raise ValueError("safety radius must be positive")


@dataclass(frozen=True)
class PredictedOccupancy:
    """Constant-velocity track of one obstacle sampled every dt over the horizon."""

    obstacle_id: int
    dt: float
    positions: np.ndarray

    def at(self, t: float) -> Optional[np.ndarray]:
        """Linearly interpolated position at time t, None beyond the horizon."""
        if t < 0:
            return None
        k = t / self.dt
        last = len(self.positions) - 1
        if k > last + 1e-9:
            return None
        i = min(int(math.floor(k)), last)
        if i == last:
            return self.positions[last]
        frac = k - i
        return (1 - frac) * self.positions[i] + frac * self.positions[i + 1]


@dataclass(frozen=True)
class PathMetrics:
    length: float
    violation_pct: float
    runtime_s: float
    success: bool


def collision_risk(p_i: Sequence[float], p_o: Sequence[float], r_safe: float, rho_factor: float) -> float:
    """Sigmoid risk 1 / (1 + exp(d - rho * r_safe)) for separation d."""
    if r_safe <= 0:
        raise ValueError("safety radius must be positive")
    d = math.dist(p_i, p_o)
    return float(expit(rho_factor * r_safe - d))


def _velocity(obs: ObstacleObservation) -> np.ndarray:
    v, psi, gamma = obs.velocity, obs.heading, obs.path_angle
    return np.array([v * math.cos(gamma) * math.cos(psi), v * math.cos(gamma) * math.sin(psi), v * math.sin(gamma)])


def predict_obstacles(peers: Sequence[ObstacleObservation], horizon: Horizon, dt: float) -> List[PredictedOccupancy]:
    """Propagate each peer at constant speed, heading and climb angle over the time horizon."""
    if dt <= 0:
        raise ValueError("prediction step must be positive")
    steps = int(math.ceil(horizon.duration / dt - 1e-9))
    ts = np.arange(steps + 1)[:, None] * dt
    return [
        PredictedOccupancy(obs.id, dt, np.asarray(obs.position, dtype=float) + ts * _velocity(obs)) for obs in peers
    ]


def _segment_pair_distance(a0, a1, b0, b1) -> float:
    """Minimum distance between two points moving linearly over the same interval."""
    d0 = np.asarray(a0) - np.asarray(b0)
    dv = (np.asarray(a1) - np.asarray(a0)) - (np.asarray(b1) - np.asarray(b0))
    denom = float(dv @ dv)
    s = 0.0 if denom == 0.0 else min(max(-float(d0 @ dv) / denom, 0.0), 1.0)
    return float(np.linalg.norm(d0 + s * dv))


def _dynamic_clearance(a: np.ndarray, b: np.ndarray, t0: float, dt: float, predicted: Sequence[PredictedOccupancy]) -> float:
    """Closest approach to any predicted obstacle while flying a to b over [t0, t0 + dt]."""
    best = math.inf
    for occ in predicted:
        p0, p1 = occ.at(t0), occ.at(t0 + dt)
        if p0 is None:
            continue
        if p1 is None:
            p1 = occ.positions[-1]
        best = min(best, _segment_pair_distance(a, b, p0, p1))
    return best


def _static_clearance(a: Sequence[float], b: Sequence[float], zones: Sequence[Polygon]) -> float:
    if not zones:
        return math.inf
    if math.dist(a[:2], b[:2]) == 0.0:
        seg = Point(a[0], a[1])
    else:
        seg = LineString([a[:2], b[:2]])
    return min(z.distance(seg) for z in zones)


def _visibility_guide(
    start: Point2, goal: Point2, zones: Sequence[Polygon], r_safe: float
) -> Tuple[Point2, float]:
    """Next graph vertex on the shortest path around inflated zones and the remaining path length from it."""
    if not zones:
        return goal, 0.0
    outer = [z.buffer(r_safe * (1 + 2 * _INFLATION_MARGIN), quad_segs=2) for z in zones]
    inner = [z.buffer(r_safe * (1 + _INFLATION_MARGIN), quad_segs=2) for z in zones]
    nodes: List[Point2] = [start, goal]
    for poly in outer:
        nodes.extend(poly.exterior.coords[:-1])

    graph = nx.Graph()
    graph.add_nodes_from(range(len(nodes)))
    for i in range(len(nodes)):
        for j in range(i + 1, len(nodes)):
            if nodes[i] == nodes[j]:
                continue
            seg = LineString([nodes[i], nodes[j]])
            if not any(seg.intersects(p) for p in inner):
                graph.add_edge(i, j, weight=seg.length)
    try:
        route = nx.shortest_path(graph, 0, 1, weight="weight")
    except nx.NetworkXNoPath:
        return goal, 0.0
    if len(route) < 2:
        return goal, 0.0
    remaining = sum(math.dist(nodes[a], nodes[b]) for a, b in zip(route[1:], route[2:]))
    return nodes[route[1]], remaining


def _in_region(p: Sequence[float], region: Region) -> bool:
    return region.contains(p[0], p[1]) and region.z_min <= p[2] <= region.z_max


def hwh_plan(
    p_u: Point3,
    p_d: Point3,
    horizon: Horizon,
    obstacles: Sequence[ObstacleObservation],
    region: Region,
    airspeed: float,
    dt: float,
    no_fly: Sequence[NoFlyZone] = (),
    limits: PlannerLimits = PlannerLimits(),
    initial_heading: Optional[float] = None,
    max_hops: Optional[int] = None,
) -> PlannedPath:
    """
    Plan hops from p_u to p_d.

    Args:
        p_u: Start position (x, y, z)
        p_d: Destination (x, y, z)
        horizon: Look-ahead window for predicted conflicts
        obstacles: Current peer observations, propagated at constant velocity
        region: Region that every waypoint must stay inside
        airspeed: Nominal hop speed V_a; straight hops are airspeed * dt long
        dt: Hop duration
        no_fly: Static zones, kept r_safe away from every hop
        limits: Speed, turn, climb and safety envelope
        initial_heading: Current heading; the first hop obeys the turn limit when given
        max_hops: Hop cap before giving up (derived from the distance when None)

    Returns:
        PlannedPath whose last waypoint is p_d

    Raises:
        TrappedError: No candidate hop is safe, carrying the hops planned so far
    """
    if dt <= 0 or airspeed <= 0:
        raise ValueError("hop duration and airspeed must be positive")
    start = np.asarray(p_u, dtype=float)
    goal = np.asarray(p_d, dtype=float)
    if np.allclose(start, goal):
        raise ValueError("start and destination coincide")
    if not (_in_region(start, region) and _in_region(goal, region)):
        raise ValueError("start and destination must lie inside the region")

    zones = [z.polygon for z in no_fly]
    predicted = predict_obstacles(obstacles, horizon, dt)
    turn_limit = limits.psi_dot_max * dt
    min_clear = limits.r_safe * (1 + _CLEARANCE_TOL)
    if max_hops is None:
        max_hops = 4 * int(math.ceil(math.dist(start, goal) / (limits.v_min * dt))) + 50

    path = PlannedPath(start=tuple(start))
    pos = start
    heading = initial_heading
    for hop in range(max_hops):
        t0 = hop * dt
        to_goal = goal - pos
        distance = float(np.linalg.norm(to_goal))
        if distance <= _ARRIVAL_TOL:
            return path
        bearing = math.atan2(to_goal[1], to_goal[0])
        turn_ok = heading is None or math.hypot(*to_goal[:2]) < 1e-9 or abs(wrap_angle(bearing - heading)) <= turn_limit
        step = airspeed * dt
        nxt = goal if distance <= step else pos + to_goal * (step / distance)
        if turn_ok and _static_clearance(pos, goal, zones) >= min_clear and _clearance_ahead(
            pos, goal, t0, airspeed, dt, horizon, predicted
        ) >= min_clear:
            gamma = math.asin(max(-1.0, min(1.0, to_goal[2] / distance)))
            path.append(tuple(float(v) for v in nxt), airspeed, gamma)
        else:
            nxt = _resolve_conflict(pos, goal, heading, t0, dt, airspeed, zones, predicted, region, limits, horizon)
            if nxt is None:
                logger.warning(f"Planner trapped at {tuple(np.round(pos, 1))} after {len(path)} hops")
                raise TrappedError(f"no safe hop from {tuple(np.round(pos, 1))}", partial_path=path.waypoints)
            nxt, speed, gamma = nxt
            path.append(tuple(float(v) for v in nxt), speed, gamma)
            logger.debug(f"Conflict hop {hop}: sub-destination {tuple(np.round(nxt, 1))} at {speed:.1f} m/s")
        move = np.asarray(path.waypoints[-1]) - pos
        if math.hypot(move[0], move[1]) > 1e-9:
            heading = math.atan2(move[1], move[0])
        pos = np.asarray(path.waypoints[-1])
    if math.dist(pos, goal) <= _ARRIVAL_TOL:
        return path
    raise TrappedError(f"no route to {tuple(p_d)} within {max_hops} hops", partial_path=path.waypoints)


def _clearance_ahead(
    pos: np.ndarray,
    goal: np.ndarray,
    t0: float,
    speed: float,
    dt: float,
    horizon: Horizon,
    predicted: Sequence[PredictedOccupancy],
) -> float:
    """Closest predicted approach while flying straight hops toward goal, within the horizon."""
    if not predicted:
        return math.inf
    p = np.asarray(pos, dtype=float)
    travelled, elapsed = 0.0, 0.0
    best = math.inf
    while elapsed < horizon.duration and travelled < horizon.length:
        to_goal = goal - p
        d = float(np.linalg.norm(to_goal))
        if d <= _ARRIVAL_TOL:
            break
        step = speed * dt
        q = goal if d <= step else p + to_goal * (step / d)
        best = min(best, _dynamic_clearance(p, q, t0 + elapsed, dt, predicted))
        travelled += min(d, step)
        elapsed += dt
        p = q
    return best


def _resolve_conflict(
    pos: np.ndarray,
    goal: np.ndarray,
    heading: Optional[float],
    t0: float,
    dt: float,
    airspeed: float,
    zones: Sequence[Polygon],
    predicted: Sequence[PredictedOccupancy],
    region: Region,
    limits: PlannerLimits,
    horizon: Horizon,
) -> Optional[Tuple[np.ndarray, float, float]]:
    """
    Best safe sub-destination.

    Ranked by immediate risk, then by whether straight flight to the goal
    from the candidate stays clear of predicted occupancy (the wider miss
    first when none does), then by remaining route length.
    """
    guide2, remaining = _visibility_guide((pos[0], pos[1]), (goal[0], goal[1]), zones, limits.r_safe)
    total_xy = math.hypot(*(goal[:2] - pos[:2]))
    guide_xy_dist = math.dist(guide2, pos[:2])
    frac = 1.0 if total_xy == 0 else min(1.0, guide_xy_dist / max(total_xy, 1e-9))
    guide = np.array([guide2[0], guide2[1], pos[2] + frac * (goal[2] - pos[2])])
    to_guide = guide - pos
    guide_dist = float(np.linalg.norm(to_guide))
    bearing = math.atan2(to_guide[1], to_guide[0]) if guide_dist > 0 else (heading or 0.0)
    gamma_d = 0.0 if guide_dist == 0 else math.asin(max(-1.0, min(1.0, to_guide[2] / guide_dist)))

    turn_limit = limits.psi_dot_max * dt
    headings = [bearing + off for off in _FAN_OFFSETS]
    if heading is not None:
        headings += [heading - turn_limit, heading + turn_limit]
    climbs = sorted({max(-limits.gamma_max, min(limits.gamma_max, gamma_d + k * _CLIMB_STEP)) for k in (-1, 0, 1)})
    speeds = sorted({limits.v_min, min(max(airspeed, limits.v_min), limits.v_max), limits.v_max})

    candidates: List[Tuple[np.ndarray, float, float]] = []
    for speed in speeds:
        if guide_dist <= speed * dt and guide_dist > 0:
            candidates.append((guide, speed, gamma_d))
        for psi in headings:
            for gamma in climbs:
                step = speed * dt
                offset = step * np.array([math.cos(gamma) * math.cos(psi), math.cos(gamma) * math.sin(psi), math.sin(gamma)])
                candidates.append((pos + offset, speed, gamma))

    min_clear = limits.r_safe * (1 + _CLEARANCE_TOL)
    best = None
    for k, (cand, speed, gamma) in enumerate(candidates):
        move = cand - pos
        if heading is not None and math.hypot(move[0], move[1]) > 1e-9:
            if abs(wrap_angle(math.atan2(move[1], move[0]) - heading)) > turn_limit + 1e-9:
                continue
        if not _in_region(cand, region):
            continue
        if _static_clearance(pos, cand, zones) < min_clear:
            continue
        if _dynamic_clearance(pos, cand, t0, dt, predicted) < min_clear:
            continue
        risk = max(
            (collision_risk(cand, occ.at(t0 + dt), limits.r_safe, limits.rho_factor) for occ in predicted if occ.at(t0 + dt) is not None),
            default=0.0,
        )
        ahead = _clearance_ahead(cand, goal, t0 + dt, speed, dt, horizon, predicted)
        blocked = ahead < min_clear
        cost = float(np.linalg.norm(guide - cand)) + remaining
        key = (risk > 0.5, blocked, -ahead if blocked else 0.0, cost, k)
        if best is None or key < best[0]:
            best = (key, cand, speed, gamma)
    if best is None:
        return None
    _, cand, speed, gamma = best
    return cand, speed, gamma


def path_metrics(
    path: PlannedPath,
    no_fly: Sequence[NoFlyZone],
    r_safe: float,
    runtime_s: float = 0.0,
    success: bool = True,
    samples_per_hop: int = 20,
) -> PathMetrics:
    """Length, percentage of path samples closer than r_safe to a zone, runtime and success."""
    pts = path.points
    zones = [z.polygon for z in no_fly]
    samples = violations = 0
    for a, b in zip(pts, pts[1:]):
        for s in np.linspace(0.0, 1.0, samples_per_hop, endpoint=False):
            x = a[0] + s * (b[0] - a[0])
            y = a[1] + s * (b[1] - a[1])
            samples += 1
            if zones and min(z.distance(Point(x, y)) for z in zones) < r_safe:
                violations += 1
    if len(pts) > 1:
        samples += 1
        end = Point(pts[-1][0], pts[-1][1])
        if zones and min(z.distance(end) for z in zones) < r_safe:
            violations += 1
    pct = 100.0 * violations / samples if samples else 0.0
    return PathMetrics(length=path.length, violation_pct=pct, runtime_s=runtime_s, success=success)


def plan_with_metrics(
    p_u: Point3, p_d: Point3, horizon: Horizon, region: Region, airspeed: float, dt: float, **kwargs
) -> Tuple[PlannedPath, PathMetrics]:
    """Time one hwh_plan call; a trapped planner yields its partial path with success False."""
    no_fly = kwargs.get("no_fly", ())
    limits = kwargs.get("limits", PlannerLimits())
    obstacles = kwargs.pop("obstacles", ())
    began = time.perf_counter()
    try:
        path = hwh_plan(p_u, p_d, horizon, obstacles, region, airspeed, dt, **kwargs)
        success = True
    except TrappedError as e:
        partial = list(e.partial_path)
        path = PlannedPath(start=tuple(p_u), waypoints=partial, speeds=[airspeed] * len(partial), angles=[0.0] * len(partial))
        success = False
    runtime = time.perf_counter() - began
    return path, path_metrics(path, no_fly, limits.r_safe, runtime, success)


def path_summary(metrics: PathMetrics) -> Dict[str, float]:
    return {
        "length_m": metrics.length,
        "violation_pct": metrics.violation_pct,
        "runtime_s": metrics.runtime_s,
        "success": float(metrics.success),
    }
