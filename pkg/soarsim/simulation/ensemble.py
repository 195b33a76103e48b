"""Independent seeded runs executed in parallel and aggregated."""

import asyncio
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import pandas as pd

from soarsim.config import Settings, build_settings
from soarsim.errors import ConfigError
from soarsim.simulation.mission import run_mission
from soarsim.simulation.outputs import write_outputs

logger = logging.getLogger(__name__)


@dataclass
class EnsembleReport:
    """Per-seed metrics with their mean and population standard deviation."""

    members: Dict[int, Dict[str, float]]
    mean: Dict[str, float] = field(default_factory=dict)
    stdev: Dict[str, float] = field(default_factory=dict)
    failures: List[Tuple[int, str]] = field(default_factory=list)

    def frame(self) -> pd.DataFrame:
        frame = pd.DataFrame.from_dict(self.members, orient="index")
        frame.index.name = "seed"
        return frame.sort_index()

    def to_dict(self) -> Dict[str, object]:
        return {
            "seeds": sorted(self.members),
            "mean": self.mean,
            "stdev": self.stdev,
            "failures": [{"seed": s, "error": e} for s, e in self.failures],
        }


def parse_seed_range(text: str) -> List[int]:
    """Seeds from 'a..b' (inclusive) or a single integer."""
    try:
        if ".." in text:
            a, b = (int(part) for part in text.split("..", 1))
        else:
            a = b = int(text)
    except ValueError as e:
        raise ConfigError(f"invalid seed range {text!r}, expected 'a..b'") from e
    if b < a:
        raise ConfigError(f"invalid seed range {text!r}: end before start")
    return list(range(a, b + 1))


def run_member(flat: Mapping[str, str], seed: int, out_dir: Optional[str] = None) -> Dict[str, float]:
    """Run one seed in a worker process and return its summary metrics."""
    settings = build_settings({**flat, "run.seed": seed})
    result = run_mission(settings)
    if out_dir is not None:
        write_outputs(result, Path(out_dir) / f"seed_{seed}")
    return result.summary.scalars()


def aggregate(members: Mapping[int, Mapping[str, float]]) -> Tuple[Dict[str, float], Dict[str, float]]:
    if not members:
        return {}, {}
    frame = pd.DataFrame.from_dict(dict(members), orient="index").sort_index()
    return frame.mean().to_dict(), frame.std(ddof=0).to_dict()


async def run_ensemble(
    settings: Settings,
    seeds: Sequence[int],
    workers: int = 1,
    out_dir: Optional[Union[str, Path]] = None,
) -> EnsembleReport:
    """
    Run every seed and aggregate their summaries.

    Members run in a process pool and share nothing; results are collected
    in seed order so the report does not depend on the worker count. A failed
    member is reported and left out of the aggregate.

    Args:
        settings: Scenario; run.seed is replaced per member
        seeds: At least one seed
        workers: Process pool size
        out_dir: Optional directory receiving one sub-directory per seed

    Raises:
        ConfigError: No seeds
    """
    if not seeds:
        raise ConfigError("an ensemble needs at least one seed")
    flat = settings.to_flat()
    target = str(out_dir) if out_dir is not None else None
    loop = asyncio.get_running_loop()
    logger.info(f"Running ensemble of {len(seeds)} seeds on {workers} workers")
    with ProcessPoolExecutor(max_workers=max(1, workers)) as pool:
        futures = [loop.run_in_executor(pool, run_member, flat, seed, target) for seed in seeds]
        results = await asyncio.gather(*futures, return_exceptions=True)

    members: Dict[int, Dict[str, float]] = {}
    failures: List[Tuple[int, str]] = []
    for seed, result in zip(seeds, results):
        if isinstance(result, BaseException):
            logger.error(f"Ensemble member seed={seed} failed: {result}")
            failures.append((seed, f"{type(result).__name__}: {result}"))
        else:
            members[seed] = result
    mean, stdev = aggregate(members)
    return EnsembleReport(members=members, mean=mean, stdev=stdev, failures=failures)
