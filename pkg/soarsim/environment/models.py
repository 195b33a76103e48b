"""Region, updraft and target value types."""

from dataclasses import dataclass, field
from typing import Dict, Tuple

Point2 = Tuple[float, float]


@dataclass(frozen=True)
class Region:
    """Rectangular region of interest with its operational altitude band."""

    lower_bound: Point2
    upper_bound: Point2
    z_min: float
    z_max: float

    def __post_init__(self) -> None:
        if not (self.lower_bound[0] < self.upper_bound[0] and self.lower_bound[1] < self.upper_bound[1]):
            raise ValueError("region lower bound must be below upper bound componentwise")
        if not 0.0 < self.z_min < self.z_max:
            raise ValueError("region altitudes must satisfy 0 < z_min < z_max")

    @property
    def width(self) -> float:
        return self.upper_bound[0] - self.lower_bound[0]

    @property
    def height(self) -> float:
        return self.upper_bound[1] - self.lower_bound[1]

    @property
    def area_km2(self) -> float:
        return self.width * self.height / 1e6

    @property
    def center(self) -> Point2:
        return (
            0.5 * (self.lower_bound[0] + self.upper_bound[0]),
            0.5 * (self.lower_bound[1] + self.upper_bound[1]),
        )

    def contains(self, x: float, y: float, margin: float = 0.0) -> bool:
        """True if (x, y) lies inside the region shrunk by margin."""
        return (
            self.lower_bound[0] + margin <= x <= self.upper_bound[0] - margin
            and self.lower_bound[1] + margin <= y <= self.upper_bound[1] - margin
        )

    def clamp(self, x: float, y: float, margin: float = 0.0) -> Point2:
        return (
            min(max(x, self.lower_bound[0] + margin), self.upper_bound[0] - margin),
            min(max(y, self.lower_bound[1] + margin), self.upper_bound[1] - margin),
        )


@dataclass(frozen=True)
class LifecyclePhases:
    """Trapezoid phase widths as fractions of an updraft's lifecycle."""

    formation_frac: float = 0.1
    growing_frac: float = 0.2
    maturity_frac: float = 0.5
    fade_frac: float = 0.2

    def __post_init__(self) -> None:
        fracs = (self.formation_frac, self.growing_frac, self.maturity_frac, self.fade_frac)
        if any(f <= 0 for f in fracs):
            raise ValueError("lifecycle phase fractions must be positive")
        if abs(sum(fracs) - 1.0) > 1e-9:
            raise ValueError("lifecycle phase fractions must sum to 1")

    @classmethod
    def from_ratios(cls, formation: float, growing: float, maturity: float, fade: float) -> "LifecyclePhases":
        """Normalize raw phase ratios (e.g. 1:2:5:2) to fractions."""
        total = formation + growing + maturity + fade
        if total <= 0:
            raise ValueError("phase ratios must have a positive sum")
        return cls(formation / total, growing / total, maturity / total, fade / total)

    @property
    def rise_frac(self) -> float:
        return self.formation_frac + self.growing_frac


@dataclass(frozen=True)
class Updraft:
    """A Gedeon-profile thermal with a finite lifecycle."""

    id: int
    center: Point2
    radius: float
    core_strength: float
    birth_time: float
    lifecycle: float

    @property
    def death_time(self) -> float:
        return self.birth_time + self.lifecycle

    def is_active(self, t: float) -> bool:
        return self.birth_time <= t <= self.death_time


@dataclass(frozen=True)
class Target:
    """Static ground target (mass point) with a finite presence."""

    id: int
    position: Point2
    birth_time: float
    duration: float

    @property
    def expiry_time(self) -> float:
        return self.birth_time + self.duration

    def is_active(self, t: float) -> bool:
        return self.birth_time <= t < self.expiry_time


@dataclass(frozen=True)
class SpawnRanges:
    """Parameter ranges new entities are drawn from."""

    radius: Tuple[float, float] = (50.0, 100.0)
    strength: Tuple[float, float] = (0.1, 4.0)
    lifecycle: Tuple[float, float] = (360.0, 600.0)
    target_duration: Tuple[float, float] = (360.0, 1800.0)
    updraft_rate_per_km2_h: float = 598.0 / 36.0 / 6.0
    target_rate_per_km2_h: float = 1790.0 / 36.0 / 6.0


@dataclass(frozen=True)
class EnvironmentEvent:
    """Birth or death of an environment entity."""

    time_s: float
    kind: str
    id: int
    x: float
    y: float
    param: float


@dataclass
class Environment:
    """Active updrafts and targets inside the region."""

    region: Region
    active_updrafts: Tuple[Updraft, ...] = ()
    active_targets: Tuple[Target, ...] = ()
    max_updraft_count: int = 30
    rng_seed: int = 0
    phases: LifecyclePhases = field(default_factory=LifecyclePhases)
    ranges: SpawnRanges = field(default_factory=SpawnRanges)
    time: float = 0.0
    next_updraft_id: int = 0
    next_target_id: int = 0
    total_updrafts: int = 0
    total_targets: int = 0

    @property
    def targets_by_id(self) -> Dict[int, Target]:
        return {target.id: target for target in self.active_targets}
