"""Planning value types: areas, sweep settings, horizons, obstacles and planned paths."""

import math
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Deque, List, Sequence, Tuple

import pandas as pd
from shapely.geometry import Polygon
from shapely.geometry.polygon import orient

from soarsim.environment.models import Point2, Region

Point3 = Tuple[float, float, float]


@dataclass(frozen=True)
class SubArea:
    """Convex planning polygon with counterclockwise vertices."""

    vertices: Tuple[Point2, ...]

    def __post_init__(self) -> None:
        pts = tuple((float(x), float(y)) for x, y in self.vertices)
        if len(pts) < 3:
            raise ValueError("a sub-area needs at least three vertices")
        ring = Polygon(pts)
        if ring.area > 0 and not ring.exterior.is_ccw:
            pts = tuple(orient(ring, sign=1.0).exterior.coords)[:-1]
        object.__setattr__(self, "vertices", pts)

    @classmethod
    def rectangle(cls, x0: float, y0: float, x1: float, y1: float) -> "SubArea":
        return cls(((x0, y0), (x1, y0), (x1, y1), (x0, y1)))

    @classmethod
    def from_region(cls, region: Region) -> "SubArea":
        (x0, y0), (x1, y1) = region.lower_bound, region.upper_bound
        return cls.rectangle(x0, y0, x1, y1)

    @property
    def polygon(self) -> Polygon:
        return Polygon(self.vertices)

    @property
    def edges(self) -> List[Tuple[Point2, Point2]]:
        n = len(self.vertices)
        return [(self.vertices[k], self.vertices[(k + 1) % n]) for k in range(n)]

    @property
    def centroid(self) -> Point2:
        c = self.polygon.centroid
        if c.is_empty:
            xs, ys = zip(*self.vertices)
            return (sum(xs) / len(xs), sum(ys) / len(ys))
        return (c.x, c.y)

    @property
    def area(self) -> float:
        return self.polygon.area


@dataclass(frozen=True)
class SweepConfig:
    sweep_angle: float = 0.0
    coverage_width: float = 230.94
    direction: int = 1

    def __post_init__(self) -> None:
        if self.coverage_width <= 0:
            raise ValueError("coverage width must be positive")
        if self.direction not in (1, -1):
            raise ValueError("sweep direction must be +1 or -1")


@dataclass(frozen=True)
class Horizon:
    """Receding window: at most `length` metres or `duration` seconds ahead."""

    length: float = 500.0
    duration: float = 20.0

    def __post_init__(self) -> None:
        if self.length <= 0 or self.duration <= 0:
            raise ValueError("horizon length and duration must be positive")


class ObstacleKind(str, Enum):
    VISIBLE = "visible"
    PREDICTED = "predicted"


@dataclass
class ObstacleObservation:
    """
    Latest observation of a moving obstacle (usually a peer UAV).

    Earlier observations are kept in a bounded history for backtracking.
    """

    id: int
    position: Point3
    velocity: float = 0.0
    heading: float = 0.0
    path_angle: float = 0.0
    kind: ObstacleKind = ObstacleKind.VISIBLE
    window: int = 10
    history: Deque[Point3] = field(default_factory=deque)

    def __post_init__(self) -> None:
        if self.window < 1:
            raise ValueError("history window must be at least one tick")
        self.history = deque(self.history, maxlen=self.window)

    def observe(self, position: Point3, velocity: float, heading: float, path_angle: float = 0.0) -> None:
        self.history.append(self.position)
        self.position = position
        self.velocity = velocity
        self.heading = heading
        self.path_angle = path_angle


@dataclass(frozen=True)
class NoFlyZone:
    """Static obstacle treated as a vertical prism over its footprint."""

    zone_id: int
    vertices: Tuple[Point2, ...]

    @property
    def polygon(self) -> Polygon:
        return Polygon(self.vertices)


@dataclass
class PlannedPath:
    """Hop waypoints with the commanded speed and climb angle of each hop."""

    start: Point3
    waypoints: List[Point3] = field(default_factory=list)
    speeds: List[float] = field(default_factory=list)
    angles: List[float] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not len(self.waypoints) == len(self.speeds) == len(self.angles):
            raise ValueError("waypoints, speeds and angles must have equal length")

    def __len__(self) -> int:
        return len(self.waypoints)

    def append(self, point: Point3, speed: float, angle: float) -> None:
        self.waypoints.append(point)
        self.speeds.append(speed)
        self.angles.append(angle)

    @property
    def points(self) -> List[Point3]:
        return [self.start, *self.waypoints]

    @property
    def length(self) -> float:
        pts = self.points
        return sum(math.dist(a, b) for a, b in zip(pts, pts[1:]))

    def to_frame(self, agent_id: int) -> pd.DataFrame:
        rows = [
            {"agent_id": agent_id, "seq": k, "x": p[0], "y": p[1], "z": p[2], "v_d": v}
            for k, (p, v) in enumerate(zip(self.waypoints, self.speeds))
        ]
        return pd.DataFrame(rows, columns=["agent_id", "seq", "x", "y", "z", "v_d"])


def paths_frame(paths: Sequence[Tuple[int, PlannedPath]]) -> pd.DataFrame:
    """Concatenate (agent_id, path) pairs into one polyline table."""
    frames = [p.to_frame(agent_id) for agent_id, p in paths]
    if not frames:
        return pd.DataFrame(columns=["agent_id", "seq", "x", "y", "z", "v_d"])
    return pd.concat(frames, ignore_index=True)
