"""Delayed learning and tuning: local search frames alternating with classifier-screened frames."""

import logging
import math
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from soarsim.config import parse_scenario_text
from soarsim.control.dominance import (
    Dominance,
    DominanceClassifier,
    non_dominated,
    pair_features,
    train_dominance_classifier,
)
from soarsim.control.models import (
    CHANNELS,
    REWARD_NAMES,
    TERMS,
    ActionRecord,
    DlntConfig,
    FrameKind,
    PidGains,
    TuningResult,
)
from soarsim.errors import ConfigError

logger = logging.getLogger(__name__)

_MIN_STEP = 1e-3
_MAX_STEP = 0.5

Oracle = Callable[[np.ndarray], Sequence[float]]


def _unit_ball(rng: np.random.Generator, dim: int, radius: float) -> np.ndarray:
    direction = rng.normal(size=dim)
    norm = np.linalg.norm(direction)
    if norm == 0.0:
        return np.zeros(dim)
    return direction / norm * radius * rng.random() ** (1.0 / dim)


def secant_gradient(elite: ActionRecord, others: Sequence[ActionRecord], lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
    """
    Directional secant toward the nearest distinct record, in unit-box coordinates.

    Zero when no other record sits at a different point.
    """
    span = upper - lower
    x0 = (elite.gains - lower) / span
    best = None
    for other in others:
        dx = (other.gains - lower) / span - x0
        dist_sq = float(dx @ dx)
        if dist_sq <= 1e-24:
            continue
        if best is None or dist_sq < best[0]:
            best = (dist_sq, dx, other.aggregate - elite.aggregate)
    if best is None:
        return np.zeros_like(x0)
    dist_sq, dx, dA = best
    return dA * dx / dist_sq


def local_search_step(
    buffer: Sequence[ActionRecord],
    archive: Sequence[ActionRecord],
    config: DlntConfig,
    rng: np.random.Generator,
    lower: np.ndarray,
    upper: np.ndarray,
    step_size: Optional[float] = None,
    count: Optional[int] = None,
) -> List[np.ndarray]:
    """
    Candidate gain vectors around the buffer elites.

    Elite i (cycling through the buffer) moves one step against its secant
    gradient, then takes a uniform random walk inside a ball of the same
    radius; the result is clipped to the search box. Emits exactly
    `count` candidates (the local-search frame length by default).
    """
    if not buffer:
        raise ValueError("local search needs a non-empty buffer")
    step = config.step_size if step_size is None else step_size
    count = config.local_search_frames if count is None else count
    span = upper - lower
    pool = list(buffer) + [r for r in archive if not any(r is b for b in buffer)]
    candidates = []
    for i in range(count):
        elite = buffer[i % len(buffer)]
        others = [r for r in pool if r is not elite]
        g = secant_gradient(elite, others, lower, upper)
        u = (elite.gains - lower) / span
        norm = np.linalg.norm(g)
        if norm > 0.0:
            u = u - step * g / norm
        u = np.clip(u + _unit_ball(rng, len(u), step), 0.0, 1.0)
        candidates.append(lower + u * span)
    return candidates


def _update_buffer(buffer: Sequence[ActionRecord], new: Sequence[ActionRecord], capacity: int) -> List[ActionRecord]:
    merged = list(buffer) + list(new)
    front = [merged[i] for i in non_dominated(merged)]
    front.sort(key=lambda r: (r.aggregate, r.index))
    return front[:capacity]


def _screen(
    classifier: DominanceClassifier,
    pool: Sequence[np.ndarray],
    buffer: Sequence[ActionRecord],
    limit: int,
) -> List[np.ndarray]:
    """Pool members no elite is predicted to dominate, most predicted wins first."""
    units = [classifier.unit(c) for c in pool]
    elites = [classifier.unit(r.gains) for r in buffer]
    X = np.array([pair_features(u, e) for u in units for e in elites])
    labels = classifier.model.predict(X).reshape(len(pool), len(elites))
    ranked = []
    for k, row in enumerate(labels):
        if np.any(row == int(Dominance.POS)):
            continue
        ranked.append((-int(np.sum(row == int(Dominance.NEG))), k))
    ranked.sort()
    return [pool[k] for _, k in ranked[:limit]]


def dlnt_tune(
    oracle: Oracle,
    config: DlntConfig,
    rng: np.random.Generator,
    lower: np.ndarray,
    upper: np.ndarray,
) -> TuningResult:
    """
    Tune a gain vector against an expensive reward oracle.

    Args:
        oracle: Maps a gain vector to a reward vector (lower is better)
        config: Frame lengths, buffer capacity, budget and classifier shape
        rng: Tuner random stream
        lower: Lower corner of the search box
        upper: Upper corner of the search box

    Returns:
        TuningResult with the best record, the evaluation history and the
        non-increasing best-so-far aggregate after each evaluation

    Raises:
        ValueError: Every initial evaluation failed
    """
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    span = upper - lower
    history: List[ActionRecord] = []
    best_so_far: List[float] = []
    evaluations = 0

    def evaluate(gains: np.ndarray, kind: FrameKind) -> Optional[ActionRecord]:
        nonlocal evaluations
        index = evaluations
        evaluations += 1
        try:
            rewards = tuple(float(v) for v in oracle(gains))
            if not rewards or not all(math.isfinite(v) for v in rewards):
                raise ValueError(f"non-finite rewards {rewards}")
        except Exception as e:
            logger.warning(f"Discarding candidate {index}: evaluation failed: {e}")
            return None
        record = ActionRecord(gains=np.array(gains, dtype=float), rewards=rewards, frame_kind=kind, index=index)
        history.append(record)
        best_so_far.append(record.aggregate if not best_so_far else min(best_so_far[-1], record.aggregate))
        return record

    for _ in range(config.initial_population):
        evaluate(lower + rng.random(len(lower)) * span, FrameKind.INITIAL)
    if not history:
        raise ValueError("every initial evaluation failed")
    initial_best = best_so_far[-1]
    buffer = _update_buffer([], history, config.buffer_capacity)
    logger.info(f"Initial sample: {len(history)} evaluated, best aggregate {initial_best:.4f}")

    step = config.step_size
    classifier: Optional[DominanceClassifier] = None
    local_frame = True
    while evaluations < config.budget:
        remaining = config.budget - evaluations
        before = best_so_far[-1]
        if local_frame:
            kind = FrameKind.LOCAL_SEARCH
            candidates = local_search_step(buffer, history, config, rng, lower, upper, step)[:remaining]
        else:
            kind = FrameKind.DELAYED_LEARNING
            limit = min(remaining, config.learning_delay)
            classifier = train_dominance_classifier(history, config, rng, lower, upper, classifier)
            pool = local_search_step(
                buffer, history, config, rng, lower, upper, step, count=config.learning_delay * config.screening_pool
            )
            candidates = _screen(classifier, pool, buffer, limit) if classifier is not None else []
            if not candidates:
                # Unscreened offspring are never evaluated; the frame becomes local search.
                logger.info("No offspring passed screening, running a local search frame instead")
                kind = FrameKind.LOCAL_SEARCH
                candidates = local_search_step(buffer, history, config, rng, lower, upper, step)[:remaining]
        new = [r for r in (evaluate(c, kind) for c in candidates) if r is not None]
        buffer = _update_buffer(buffer, new, config.buffer_capacity)
        if best_so_far[-1] < before:
            step = min(_MAX_STEP, step * 1.2)
        else:
            step = max(_MIN_STEP, step * 0.5)
        logger.info(
            f"{kind.value} frame: {len(new)}/{len(candidates)} evaluated, "
            f"best {best_so_far[-1]:.4f}, step {step:.4f}, evaluations {evaluations}/{config.budget}"
        )
        local_frame = not local_frame

    best = min(buffer, key=lambda r: (r.aggregate, r.index))
    return TuningResult(best=best, history=history, best_so_far=best_so_far, initial_best=initial_best)


def history_frame(history: Sequence[ActionRecord], gain_names: Optional[Sequence[str]] = None) -> pd.DataFrame:
    """Tuning history as (evaluation_index, gains..., rewards..., frame_kind) rows."""
    if not history:
        return pd.DataFrame(columns=["evaluation_index", "frame_kind"])
    dim = len(history[0].gains)
    if gain_names is None:
        gain_names = [f"{c}_{t}" for c in CHANNELS for t in TERMS] if dim == 15 else [f"g{i}" for i in range(dim)]
    n_rewards = len(history[0].rewards)
    reward_names = list(REWARD_NAMES) if n_rewards == len(REWARD_NAMES) else [f"r{i}" for i in range(n_rewards)]
    rows = []
    for r in history:
        row = {"evaluation_index": r.index}
        row.update(dict(zip(gain_names, r.gains.tolist())))
        row.update(dict(zip(reward_names, r.rewards)))
        row["frame_kind"] = r.frame_kind.value
        rows.append(row)
    return pd.DataFrame(rows, columns=["evaluation_index", *gain_names, *reward_names, "frame_kind"])


def save_gains(path: Union[str, Path], gains: PidGains) -> None:
    lines = [f"{key} = {value!r}" for key, value in gains.to_flat().items()]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_gains(path: Union[str, Path]) -> PidGains:
    """
    Read a gains file written by save_gains.

    Raises:
        ConfigError: Unreadable file, unknown or missing gain, bad value
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read gains file {path}: {e}") from e
    entries = parse_scenario_text(text)
    expected = PidGains().to_flat().keys()
    unknown = sorted(set(entries) - set(expected))
    missing = sorted(set(expected) - set(entries))
    if unknown or missing:
        raise ConfigError(f"gains file {path}: unknown {unknown}, missing {missing}")
    try:
        return PidGains.from_vector([float(entries[k]) for k in expected])
    except ValueError as e:
        raise ConfigError(f"gains file {path}: {e}") from e
