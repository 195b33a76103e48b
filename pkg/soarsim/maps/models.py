"""Map record types and the regular grid container."""

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Tuple, Union

import numpy as np
import pandas as pd

from soarsim.environment.models import Point2, Region


@dataclass(frozen=True)
class LiftRecord:
    """A mapped updraft estimate."""

    lift_id: int
    estimated_center: Point2
    estimated_strength: float
    first_seen: float
    last_entered: float
    weight: float = 1.0


@dataclass(frozen=True)
class MissionRecord:
    """A detected target and its monitoring history."""

    target_id: int
    position: Point2
    first_detection: float
    last_detection: float
    accumulated_monitoring: float = 0.0


@dataclass
class GridMap:
    """Regular grid of non-negative values anchored at origin (row = y, column = x)."""

    cell_size: float
    origin: Point2
    values: np.ndarray

    @classmethod
    def for_region(cls, region: Region, cell_size: float, fill: float = 0.0) -> "GridMap":
        nx = int(math.ceil(region.width / cell_size - 1e-9))
        ny = int(math.ceil(region.height / cell_size - 1e-9))
        return cls(cell_size=cell_size, origin=region.lower_bound, values=np.full((ny, nx), fill, dtype=float))

    @property
    def shape(self) -> Tuple[int, int]:
        return self.values.shape

    def congruent(self, other: "GridMap") -> bool:
        return self.shape == other.shape and self.cell_size == other.cell_size and self.origin == other.origin

    def cell_index(self, x: float, y: float) -> Tuple[int, int]:
        """(row, col) of the cell containing (x, y), clamped to the grid."""
        ny, nx = self.shape
        col = int((x - self.origin[0]) // self.cell_size)
        row = int((y - self.origin[1]) // self.cell_size)
        return min(max(row, 0), ny - 1), min(max(col, 0), nx - 1)

    def cell_center(self, row: int, col: int) -> Point2:
        return (
            self.origin[0] + (col + 0.5) * self.cell_size,
            self.origin[1] + (row + 0.5) * self.cell_size,
        )

    def cell_centers(self) -> Tuple[np.ndarray, np.ndarray]:
        """Arrays of cell-center x and y with the grid's shape."""
        ny, nx = self.shape
        xs = self.origin[0] + (np.arange(nx) + 0.5) * self.cell_size
        ys = self.origin[1] + (np.arange(ny) + 0.5) * self.cell_size
        return np.meshgrid(xs, ys)

    def add(self, x: float, y: float, amount: float = 1.0) -> None:
        row, col = self.cell_index(x, y)
        self.values[row, col] += amount

    def copy(self) -> "GridMap":
        return GridMap(self.cell_size, self.origin, self.values.copy())

    def to_csv(self, path: Union[str, Path]) -> None:
        """Row-major dump preceded by a header with origin and cell size."""
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(f"# origin_x={self.origin[0]},origin_y={self.origin[1]},cell_size={self.cell_size}\n")
            pd.DataFrame(self.values).to_csv(f, index=False, header=False, float_format="%.6f")


@dataclass
class LiftMap:
    """Feature-based lift map keyed by lift id."""

    records: Dict[int, LiftRecord] = field(default_factory=dict)
    merge_radius: float = 100.0
    enabled: bool = True
    next_id: int = 0

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(sorted(self.records.values(), key=lambda r: r.lift_id))


@dataclass
class MissionMap:
    """Detected targets keyed by target id."""

    records: Dict[int, MissionRecord] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.records)

    def __contains__(self, target_id: int) -> bool:
        return target_id in self.records
