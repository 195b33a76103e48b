"""Splitting the region of interest among agents and sensor-derived sweep spacing."""

import logging
import math
from typing import List

from soarsim.environment.models import Region
from soarsim.planning.models import SubArea

logger = logging.getLogger(__name__)


def assign_areas(roi_rho: int, n_u: int, region: Region) -> List[SubArea]:
    """
    Sub-area per agent.

    With roi_rho = 0 every agent works the full region; with roi_rho = 1 the
    region is cut into n_u equal-width strips along x.
    """
    if n_u < 1:
        raise ValueError("need at least one agent")
    if roi_rho not in (0, 1):
        raise ValueError("roi_rho must be 0 or 1")
    if roi_rho == 0 or n_u == 1:
        return [SubArea.from_region(region) for _ in range(n_u)]
    (x0, y0), (x1, y1) = region.lower_bound, region.upper_bound
    width = (x1 - x0) / n_u
    areas = []
    for k in range(n_u):
        right = x1 if k == n_u - 1 else x0 + (k + 1) * width
        areas.append(SubArea.rectangle(x0 + k * width, y0, right, y1))
    logger.debug(f"Split region into {n_u} strips of width {width:.1f} m")
    return areas


def coverage_width(theta: float, z_min: float) -> float:
    """Ground footprint width 2 z tan(theta / 2) of a downward sensor."""
    if not 0.0 < theta < math.pi:
        raise ValueError("field of view must lie in (0, pi)")
    return 2.0 * z_min * math.tan(theta / 2.0)
