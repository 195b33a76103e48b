"""Coverage and exploration waypoint generators."""

import logging
import math
from enum import Enum
from typing import List, Sequence

import numpy as np
import shapely
from shapely.geometry import LineString

from soarsim.control.pid import wrap_angle
from soarsim.environment.models import Point2
from soarsim.errors import DegeneratePolygonError, EmptyMaskError
from soarsim.maps.models import GridMap
from soarsim.planning.models import SubArea, SweepConfig

logger = logging.getLogger(__name__)

# Keeps boundary sweep lines strictly inside the polygon so the cut is a segment.
_EDGE_EPS = 1e-7


class CoverageMode(str, Enum):
    SWEEP = "sweep"
    EXPAND_SWEEP = "expand_sweep"
    GLOBAL = "global"
    LOCAL = "local"


def _check_area(area: SubArea) -> None:
    polygon = area.polygon
    if polygon.area <= 0.0 or not polygon.is_valid:
        raise DegeneratePolygonError(f"planning polygon has no usable area: {area.vertices}")


def _anchor_angle(area: SubArea) -> float:
    """Direction of the edge whose farthest vertex lies farthest from it."""
    best_angle, best_extent = 0.0, -1.0
    pts = np.asarray(area.vertices)
    for (ax, ay), (bx, by) in area.edges:
        length = math.hypot(bx - ax, by - ay)
        if length == 0.0:
            continue
        nx, ny = -(by - ay) / length, (bx - ax) / length
        extent = float(np.max(np.abs((pts[:, 0] - ax) * nx + (pts[:, 1] - ay) * ny)))
        if extent > best_extent + 1e-9:
            best_angle, best_extent = math.atan2(by - ay, bx - ax), extent
    return best_angle


def _line_offsets(span: float, width: float) -> List[float]:
    count = int(math.floor(span / width + 1e-9)) + 1
    offsets = [k * width for k in range(count)]
    if span - offsets[-1] > width / 2.0 + 1e-9:
        offsets.append(span)
    return [min(max(s, _EDGE_EPS), span - _EDGE_EPS) for s in offsets]


def sweep_waypoints(area: SubArea, config: SweepConfig) -> List[Point2]:
    """
    Lawnmower waypoints over a convex area, ending at its centroid.

    Sweep lines run at sweep_angle from the anchor edge, spaced by the
    coverage width and cut against the polygon; each line contributes its
    two boundary points, visited in alternating order. direction = -1
    starts from the far side.

    Raises:
        DegeneratePolygonError: The polygon has zero area
    """
    _check_area(area)
    polygon = area.polygon
    angle = _anchor_angle(area) + config.sweep_angle
    d = np.array([math.cos(angle), math.sin(angle)])
    n = np.array([-d[1], d[0]])
    pts = np.asarray(area.vertices)
    s = pts @ n
    s_min, span = float(s.min()), float(s.max() - s.min())
    if span <= 0.0:
        raise DegeneratePolygonError("polygon has no extent across the sweep direction")
    center = np.asarray(area.centroid)
    reach = math.hypot(*(pts.max(axis=0) - pts.min(axis=0))) + 1.0
    along = center @ d

    offsets = _line_offsets(span, config.coverage_width)
    if config.direction == -1:
        offsets = offsets[::-1]
    waypoints: List[Point2] = []
    for k, offset in enumerate(offsets):
        base = (s_min + offset) * n + along * d
        cut = polygon.intersection(LineString([base - reach * d, base + reach * d]))
        coords = shapely.get_coordinates(cut)
        if len(coords) == 0:
            continue
        proj = coords @ d
        ends = [coords[int(np.argmin(proj))], coords[int(np.argmax(proj))]]
        if k % 2 == 1:
            ends.reverse()
        waypoints.extend((float(p[0]), float(p[1])) for p in ends)
    waypoints.append(area.centroid)
    logger.debug(f"Sweep: {len(offsets)} lines, {len(waypoints)} waypoints")
    return waypoints


def expand_sweep_waypoints(
    area: SubArea, config: SweepConfig, agent_heading: float, agent_pos: Point2
) -> List[Point2]:
    """
    Concentric rings grown from the centroid toward the vertices.

    Ring j places one point per vertex direction at radius j * coverage
    width; the number of rings is the centroid-to-nearest-vertex distance
    over the width, rounded. Every ring starts at the vertex direction
    closest to the agent heading (distance breaks ties) and turns
    counterclockwise for direction = +1.
    """
    _check_area(area)
    cx, cy = area.centroid
    pts = np.asarray(area.vertices)
    rel = pts - np.array([cx, cy])
    dist = np.hypot(rel[:, 0], rel[:, 1])
    bearings = np.arctan2(rel[:, 1], rel[:, 0])
    width = config.coverage_width
    rings = int(math.floor(dist.min() / width + 0.5))
    if rings == 0:
        return [(cx, cy)]

    def start_key(k: int):
        first = (cx + width * math.cos(bearings[k]), cy + width * math.sin(bearings[k]))
        return (round(abs(wrap_angle(bearings[k] - agent_heading)), 9), math.dist(first, agent_pos), k)

    nv = len(pts)
    start = min(range(nv), key=start_key)
    order = [(start + config.direction * i) % nv for i in range(nv)]
    waypoints: List[Point2] = []
    for j in range(1, rings + 1):
        radius = j * width
        waypoints.extend((cx + radius * math.cos(bearings[k]), cy + radius * math.sin(bearings[k])) for k in order)
    waypoints.append((cx, cy))
    return waypoints


def exploration_mask(priority: GridMap, area: SubArea, agent_pos: Point2, q_u: float, local: bool) -> np.ndarray:
    xs, ys = priority.cell_centers()
    mask = shapely.intersects_xy(area.polygon, xs, ys)
    if local:
        mask &= np.hypot(xs - agent_pos[0], ys - agent_pos[1]) <= q_u
    return mask


def exploration_waypoints(
    priority: GridMap,
    mode: CoverageMode,
    area: SubArea,
    agent_pos: Point2,
    q_u: float,
    n_p: int,
    rng: np.random.Generator,
) -> List[Point2]:
    """
    Roulette-wheel draw of cell centres, without replacement.

    Args:
        priority: Non-negative cell weights
        mode: GLOBAL masks to the area, LOCAL also to within q_u of the agent
        area: Agent sub-area
        agent_pos: Agent position (x, y)
        q_u: Local exploration radius
        n_p: Number of waypoints wanted
        rng: Exploration random stream

    Returns:
        Up to n_p distinct cell centres. Each drawn cell is zeroed before the
        next draw; when the masked weight is gone the draw is uniform over the
        remaining masked cells.

    Raises:
        EmptyMaskError: No cell passes the mask
    """
    if mode not in (CoverageMode.GLOBAL, CoverageMode.LOCAL):
        raise ValueError(f"exploration needs global or local mode, got {mode}")
    mask = exploration_mask(priority, area, agent_pos, q_u, local=mode == CoverageMode.LOCAL)
    cells = np.flatnonzero(mask)
    if cells.size == 0:
        raise EmptyMaskError(f"no {mode.value} exploration cell in area around {agent_pos}")
    weights = np.clip(priority.values.ravel()[cells].astype(float), 0.0, None)
    weights[~np.isfinite(weights)] = 0.0
    remaining = np.ones(cells.size, dtype=bool)
    ncols = priority.shape[1]
    waypoints: List[Point2] = []
    for _ in range(min(n_p, cells.size)):
        total = weights.sum()
        if total > 0.0:
            pick = int(rng.choice(cells.size, p=weights / total))
        else:
            pick = int(rng.choice(np.flatnonzero(remaining)))
        weights[pick] = 0.0
        remaining[pick] = False
        row, col = divmod(int(cells[pick]), ncols)
        waypoints.append(priority.cell_center(row, col))
    return waypoints


def clamp_to_area(waypoints: Sequence[Point2], area: SubArea, margin: float = 0.0) -> List[Point2]:
    """Move waypoints outside the area onto its boundary, shrunk by margin."""
    polygon = area.polygon
    inner = polygon.buffer(-margin) if margin > 0 else polygon
    if inner.is_empty:
        inner = polygon
    clamped = []
    for x, y in waypoints:
        point = shapely.Point(x, y)
        if inner.covers(point):
            clamped.append((x, y))
        else:
            nearest = inner.exterior.interpolate(inner.exterior.project(point))
            clamped.append((nearest.x, nearest.y))
    return clamped
