"""Updraft lifecycle and the Gedeon vertical-wind profile."""

import math
from typing import Sequence

import numpy as np

from soarsim.environment.models import Environment, LifecyclePhases, Point2, Updraft

DEFAULT_PHASES = LifecyclePhases()


def lifecycle_factor(updraft: Updraft, t: float, phases: LifecyclePhases = DEFAULT_PHASES) -> float:
    """
    Trapezoidal strength factor of an updraft at time t.

    Ramps 0 -> 1 over formation and growth, holds 1 through maturity and
    ramps back to 0 while fading. Zero outside the lifecycle.
    """
    if updraft.lifecycle <= 0:
        return 0.0
    s = (t - updraft.birth_time) / updraft.lifecycle
    if s <= 0.0 or s >= 1.0:
        return 0.0
    rise = phases.rise_frac
    plateau_end = rise + phases.maturity_frac
    if s < rise:
        return s / rise
    if s <= plateau_end:
        return 1.0
    return max(0.0, (1.0 - s) / phases.fade_frac)


def gedeon_profile(rho_sq: float, radius: float) -> float:
    """Normalized Gedeon shape exp(-rho^2/r^2)(1 - rho^2/r^2)."""
    ratio = rho_sq / (radius * radius)
    return math.exp(-ratio) * (1.0 - ratio)


def updraft_velocity(
    updraft: Updraft, query: Point2, t: float, phases: LifecyclePhases = DEFAULT_PHASES
) -> float:
    """Vertical wind (m/s) induced by one updraft; negative in the sink ring."""
    tau = lifecycle_factor(updraft, t, phases)
    if tau == 0.0:
        return 0.0
    dx = query[0] - updraft.center[0]
    dy = query[1] - updraft.center[1]
    return tau * updraft.core_strength * gedeon_profile(dx * dx + dy * dy, updraft.radius)


def updraft_velocity_grid(
    updraft: Updraft, xs: np.ndarray, ys: np.ndarray, t: float, phases: LifecyclePhases = DEFAULT_PHASES
) -> np.ndarray:
    """Vectorized updraft_velocity over coordinate arrays."""
    tau = lifecycle_factor(updraft, t, phases)
    ratio = ((xs - updraft.center[0]) ** 2 + (ys - updraft.center[1]) ** 2) / updraft.radius**2
    return tau * updraft.core_strength * np.exp(-ratio) * (1.0 - ratio)


def total_wind(env: Environment, query: Point2, t: float) -> float:
    """Superposition of all active updrafts at the query point."""
    return sum_updrafts(env.active_updrafts, query, t, env.phases)


def sum_updrafts(
    updrafts: Sequence[Updraft], query: Point2, t: float, phases: LifecyclePhases = DEFAULT_PHASES
) -> float:
    return float(sum(updraft_velocity(u, query, t, phases) for u in updrafts))


def updraft_at(env: Environment, query: Point2, t: float, scale: float = 1.0):
    """Active updraft whose disc of radius scale*r_w contains the query point, if any."""
    best = None
    best_dist = math.inf
    for updraft in env.active_updrafts:
        if not updraft.is_active(t):
            continue
        dist = math.hypot(query[0] - updraft.center[0], query[1] - updraft.center[1])
        if dist <= scale * updraft.radius and dist < best_dist:
            best, best_dist = updraft, dist
    return best
