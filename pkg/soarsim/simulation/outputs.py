"""Run output files: track, events, summary and config echo."""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Union

import pandas as pd

from soarsim.simulation.mission import MissionResult

logger = logging.getLogger(__name__)

TRACK_FILE = "track.csv"
EVENTS_FILE = "events.csv"
SUMMARY_FILE = "summary.json"
SCENARIO_FILE = "scenario.conf"
DECISIONS_FILE = "decisions.csv"


@dataclass(frozen=True)
class RunOutput:
    track_csv: Path
    events_csv: Path
    summary_json: Path
    scenario_conf: Path
    seed: int
    config: Dict[str, str]


def write_outputs(result: MissionResult, out_dir: Union[str, Path]) -> RunOutput:
    """
    Write one run's files into out_dir.

    Returns:
        Paths of the written files and the config echo
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    settings = result.settings

    track = out / TRACK_FILE
    result.log.track_frame().to_csv(track, index=False)
    events = out / EVENTS_FILE
    result.log.events_frame().to_csv(events, index=False)

    summary = out / SUMMARY_FILE
    payload = {
        "seed": settings.run.seed,
        "policy": settings.run.policy.value,
        "online_f1": result.online_f1,
        "wall_clock_s": result.wall_clock_s,
        **result.summary.to_dict(),
    }
    with open(summary, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2)

    scenario = out / SCENARIO_FILE
    settings.write_scenario(scenario)

    if result.decision_rows:
        pd.DataFrame(result.decision_rows).to_csv(out / DECISIONS_FILE, index=False)

    logger.info(f"Wrote run outputs to {out}")
    return RunOutput(
        track_csv=track,
        events_csv=events,
        summary_json=summary,
        scenario_conf=scenario,
        seed=settings.run.seed,
        config=settings.to_flat(),
    )
