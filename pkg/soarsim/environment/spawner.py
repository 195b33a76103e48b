"""Birth and expiry of updrafts and targets."""

import dataclasses
import logging
from typing import List, Optional, Tuple

import numpy as np

from soarsim.environment.models import (
    Environment,
    EnvironmentEvent,
    LifecyclePhases,
    Region,
    SpawnRanges,
    Target,
    Updraft,
)

logger = logging.getLogger(__name__)


def _rate_per_second(rate_per_km2_h: float, region: Region) -> float:
    return rate_per_km2_h * region.area_km2 / 3600.0


def _draw_updraft(env_id: int, region: Region, ranges: SpawnRanges, birth: float, rng: np.random.Generator) -> Updraft:
    x = rng.uniform(region.lower_bound[0], region.upper_bound[0])
    y = rng.uniform(region.lower_bound[1], region.upper_bound[1])
    return Updraft(
        id=env_id,
        center=(float(x), float(y)),
        radius=float(rng.uniform(*ranges.radius)),
        core_strength=float(rng.uniform(*ranges.strength)),
        birth_time=float(birth),
        lifecycle=float(rng.uniform(*ranges.lifecycle)),
    )


def _draw_target(env_id: int, region: Region, ranges: SpawnRanges, birth: float, rng: np.random.Generator) -> Target:
    x = rng.uniform(region.lower_bound[0], region.upper_bound[0])
    y = rng.uniform(region.lower_bound[1], region.upper_bound[1])
    return Target(
        id=env_id,
        position=(float(x), float(y)),
        birth_time=float(birth),
        duration=float(rng.uniform(*ranges.target_duration)),
    )


def _updraft_event(t: float, kind: str, u: Updraft) -> EnvironmentEvent:
    return EnvironmentEvent(t, kind, u.id, u.center[0], u.center[1], u.core_strength)


def _target_event(t: float, kind: str, tg: Target) -> EnvironmentEvent:
    return EnvironmentEvent(t, kind, tg.id, tg.position[0], tg.position[1], tg.duration)


def create_environment(
    region: Region,
    rng: np.random.Generator,
    ranges: SpawnRanges = SpawnRanges(),
    phases: LifecyclePhases = LifecyclePhases(),
    max_updraft_count: int = 30,
    rng_seed: int = 0,
    initial_population: bool = True,
    events: Optional[List[EnvironmentEvent]] = None,
) -> Environment:
    """
    Build the environment at t = 0.

    With initial_population the region starts at its steady state: entity
    counts are Poisson with mean rate * mean lifetime and each entity gets a
    uniformly random age, so lift exists from the first tick.
    """
    env = Environment(
        region=region,
        max_updraft_count=max_updraft_count,
        rng_seed=rng_seed,
        phases=phases,
        ranges=ranges,
    )
    if not initial_population:
        return env

    updrafts: List[Updraft] = []
    mean_life = 0.5 * (ranges.lifecycle[0] + ranges.lifecycle[1])
    n_updrafts = min(int(rng.poisson(_rate_per_second(ranges.updraft_rate_per_km2_h, region) * mean_life)), max_updraft_count)
    for i in range(n_updrafts):
        u = _draw_updraft(i, region, ranges, 0.0, rng)
        age = rng.uniform(0.0, u.lifecycle)
        updrafts.append(dataclasses.replace(u, birth_time=float(-age)))

    targets: List[Target] = []
    mean_duration = 0.5 * (ranges.target_duration[0] + ranges.target_duration[1])
    n_targets = int(rng.poisson(_rate_per_second(ranges.target_rate_per_km2_h, region) * mean_duration))
    for i in range(n_targets):
        tg = _draw_target(i, region, ranges, 0.0, rng)
        age = rng.uniform(0.0, tg.duration)
        targets.append(dataclasses.replace(tg, birth_time=float(-age)))

    if events is not None:
        events.extend(_updraft_event(0.0, "updraft_birth", u) for u in updrafts)
        events.extend(_target_event(0.0, "target_birth", tg) for tg in targets)

    logger.debug(f"Initial population: {len(updrafts)} updrafts, {len(targets)} targets")
    return dataclasses.replace(
        env,
        active_updrafts=tuple(updrafts),
        active_targets=tuple(targets),
        next_updraft_id=n_updrafts,
        next_target_id=n_targets,
        total_updrafts=n_updrafts,
        total_targets=n_targets,
    )


def step_environment(
    env: Environment,
    t: float,
    rng: np.random.Generator,
    events: Optional[List[EnvironmentEvent]] = None,
) -> Environment:
    """
    Advance the environment to time t.

    Expired entities are removed, then Poisson arrivals over (env.time, t]
    are spawned at uniform in-region locations. Updraft arrivals beyond
    max_updraft_count are dropped.

    Args:
        env: Environment at env.time
        t: New time, t >= env.time
        rng: Environment random stream
        events: Optional list receiving birth/death events

    Returns:
        New Environment at time t
    """
    if t < env.time:
        raise ValueError(f"environment time must not decrease ({t} < {env.time})")
    dt = t - env.time

    kept_updrafts: List[Updraft] = []
    for u in env.active_updrafts:
        if u.death_time < t:
            if events is not None:
                events.append(_updraft_event(t, "updraft_death", u))
        else:
            kept_updrafts.append(u)
    kept_targets: List[Target] = []
    for tg in env.active_targets:
        if tg.expiry_time <= t:
            if events is not None:
                events.append(_target_event(t, "target_death", tg))
        else:
            kept_targets.append(tg)

    next_updraft_id = env.next_updraft_id
    next_target_id = env.next_target_id
    if dt > 0:
        n_new = int(rng.poisson(_rate_per_second(env.ranges.updraft_rate_per_km2_h, env.region) * dt))
        births = np.sort(rng.uniform(env.time, t, size=n_new))
        for birth in births:
            if len(kept_updrafts) >= env.max_updraft_count:
                break
            u = _draw_updraft(next_updraft_id, env.region, env.ranges, float(birth), rng)
            next_updraft_id += 1
            kept_updrafts.append(u)
            if events is not None:
                events.append(_updraft_event(t, "updraft_birth", u))

        n_new = int(rng.poisson(_rate_per_second(env.ranges.target_rate_per_km2_h, env.region) * dt))
        births = np.sort(rng.uniform(env.time, t, size=n_new))
        for birth in births:
            tg = _draw_target(next_target_id, env.region, env.ranges, float(birth), rng)
            next_target_id += 1
            kept_targets.append(tg)
            if events is not None:
                events.append(_target_event(t, "target_birth", tg))

    return dataclasses.replace(
        env,
        active_updrafts=tuple(kept_updrafts),
        active_targets=tuple(kept_targets),
        time=t,
        total_updrafts=env.total_updrafts + (next_updraft_id - env.next_updraft_id),
        total_targets=env.total_targets + (next_target_id - env.next_target_id),
        next_updraft_id=next_updraft_id,
        next_target_id=next_target_id,
    )
