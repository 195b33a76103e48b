"""Lift map maintenance: decay, lookup and recording of evaluated updrafts."""

import dataclasses
import logging
import math
from typing import Optional, Tuple

from soarsim.environment.models import Point2
from soarsim.maps.models import LiftMap, LiftRecord

logger = logging.getLogger(__name__)


def decay_weight_flagged(elapsed: float, c_max: float) -> Tuple[float, bool]:
    """Linear decay weight and whether elapsed fell outside [0, c_max]."""
    if c_max <= 0:
        raise ValueError("c_max must be positive")
    if elapsed < 0:
        return 1.0, True
    if elapsed > c_max:
        return 0.0, True
    return (-1.0 / c_max) * elapsed + 1.0, False


def decay_weight(elapsed: float, c_max: float) -> float:
    """Weight of a lift record aged `elapsed` seconds; 1 when fresh, 0 at c_max."""
    weight, stale = decay_weight_flagged(elapsed, c_max)
    if stale:
        logger.debug(f"Stale lift age {elapsed:.1f}s clamped to weight {weight}")
    return weight


def apply_decay(lift_map: LiftMap, t: float, c_max: float) -> LiftMap:
    """Recompute every weight at time t and drop records that reached zero."""
    for lift_id, record in list(lift_map.records.items()):
        weight = decay_weight(t - record.first_seen, c_max)
        if weight <= 0.0:
            del lift_map.records[lift_id]
            logger.debug(f"Lift {lift_id} expired from map at t={t:.0f}")
        else:
            lift_map.records[lift_id] = dataclasses.replace(record, weight=weight)
    return lift_map


def check_mapped_lift(lift_map: LiftMap, pos: Point2) -> Optional[Tuple[LiftRecord, float]]:
    """Nearest positively weighted record and its distance, or None."""
    best: Optional[Tuple[LiftRecord, float]] = None
    for record in lift_map:
        if record.weight <= 0.0:
            continue
        dist = math.hypot(pos[0] - record.estimated_center[0], pos[1] - record.estimated_center[1])
        if best is None or dist < best[1]:
            best = (record, dist)
    return best


def is_mapped(lift_map: LiftMap, pos: Point2) -> bool:
    """True if a mapped lift lies within the merge radius of pos."""
    found = check_mapped_lift(lift_map, pos)
    return found is not None and found[1] <= lift_map.merge_radius


def record_lift(lift_map: LiftMap, center: Point2, strength: float, t: float) -> Optional[LiftRecord]:
    """
    Insert an evaluated updraft or refresh the record it duplicates.

    A record within the merge radius is updated in place (center, strength,
    last_entered); otherwise a new record is created. Disabled maps ignore
    writes and return None.
    """
    if not lift_map.enabled:
        return None
    found = check_mapped_lift(lift_map, center)
    if found is not None and found[1] <= lift_map.merge_radius:
        updated = dataclasses.replace(
            found[0], estimated_center=tuple(center), estimated_strength=strength, last_entered=t
        )
        lift_map.records[updated.lift_id] = updated
        return updated
    record = LiftRecord(
        lift_id=lift_map.next_id,
        estimated_center=(float(center[0]), float(center[1])),
        estimated_strength=strength,
        first_seen=t,
        last_entered=t,
        weight=1.0,
    )
    lift_map.records[record.lift_id] = record
    lift_map.next_id += 1
    logger.debug(f"Recorded lift {record.lift_id} at ({center[0]:.0f}, {center[1]:.0f}) w={strength:.2f}")
    return record


def mark_entered(lift_map: LiftMap, lift_id: int, t: float) -> None:
    record = lift_map.records.get(lift_id)
    if record is not None:
        lift_map.records[lift_id] = dataclasses.replace(record, last_entered=t)


def forget_lift(lift_map: LiftMap, lift_id: int) -> None:
    """Remove a record found dissipated on a searching orbit."""
    lift_map.records.pop(lift_id, None)
