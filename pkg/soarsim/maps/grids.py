"""Grid-based lift probability and priority layers."""

from typing import Iterable

import numpy as np

from soarsim.maps.models import GridMap, MissionRecord


def record_lift_detection(lift_prob: GridMap, x: float, y: float) -> None:
    """Count one lift detection in the cell containing (x, y)."""
    lift_prob.add(x, y, 1.0)


def _normalized(values: np.ndarray) -> np.ndarray:
    peak = float(values.max()) if values.size else 0.0
    if peak <= 0.0:
        return np.zeros_like(values)
    return values / peak


def build_priority_map(lift_prob: GridMap, mission: Iterable[MissionRecord]) -> GridMap:
    """
    Combine lift probability with target-detection density.

    Each layer is scaled to a peak of one and the two are summed with equal
    weight. An all-zero result falls back to a uniform map.
    """
    density = GridMap(lift_prob.cell_size, lift_prob.origin, np.zeros_like(lift_prob.values))
    for record in mission:
        density.add(record.position[0], record.position[1], 1.0)
    if not density.congruent(lift_prob):
        raise ValueError("priority layers must be congruent")

    combined = _normalized(np.clip(lift_prob.values, 0.0, None)) + _normalized(density.values)
    if not np.isfinite(combined).all() or combined.sum() <= 0.0:
        combined = np.ones_like(combined)
    return GridMap(lift_prob.cell_size, lift_prob.origin, combined)
