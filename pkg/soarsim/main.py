"""Command-line entry point: run, ensemble, tune-gains and plan."""

import argparse
import asyncio
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np
import pandas as pd

from soarsim.agents.tasks import SubMission, kind_of, plan_waypoints
from soarsim.config import load_scenario
from soarsim.control import DlntConfig, PidGains, history_frame, save_gains, tune_autopilot
from soarsim.errors import ConfigError, InvariantBreach, SoarSimError
from soarsim.maps import GridMap
from soarsim.planning import CoverageMode, PlannedPath, SubArea, coverage_width
from soarsim.planning.hwh import path_metrics, path_summary
from soarsim.simulation import SeedStreams, parse_seed_range, run_ensemble, run_mission, write_outputs
from soarsim.vehicle import load_airframe

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BREACH = 3

_PLAN_MODES = {"sweep": CoverageMode.SWEEP, "expand": CoverageMode.EXPAND_SWEEP, "explore": CoverageMode.GLOBAL}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="soarsim", description="Multi-UAV thermal soaring simulator")
    parser.add_argument("--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Run one mission")
    run.add_argument("--scenario", type=Path)
    run.add_argument("--seed", type=int)
    run.add_argument("--policy")
    run.add_argument("--uavs", type=int)
    run.add_argument("--duration", type=float, help="Mission duration in minutes")
    run.add_argument("--out", type=Path, required=True)

    ensemble = sub.add_parser("ensemble", help="Run a seed range and aggregate")
    ensemble.add_argument("--scenario", type=Path)
    ensemble.add_argument("--seeds", required=True, help="Inclusive range a..b")
    ensemble.add_argument("--policy")
    ensemble.add_argument("--workers", type=int, default=1)
    ensemble.add_argument("--out", type=Path, required=True)

    tune = sub.add_parser("tune-gains", help="Tune autopilot gains on the doublet episode")
    tune.add_argument("--airframe", type=Path, required=True)
    tune.add_argument("--budget", type=int)
    tune.add_argument("--seed", type=int, default=0)
    tune.add_argument("--scenario", type=Path)
    tune.add_argument("--out", type=Path, required=True)

    plan = sub.add_parser("plan", help="Plan coverage waypoints for one area")
    plan.add_argument("--area", type=Path, required=True, help="Polygon vertices, one 'x y' per line")
    plan.add_argument("--mode", choices=sorted(_PLAN_MODES), default="sweep")
    plan.add_argument("--scenario", type=Path)
    plan.add_argument("--seed", type=int, default=0)
    plan.add_argument("--out", type=Path)
    return parser


def read_area(path: Path) -> SubArea:
    """Polygon from a whitespace or comma separated vertex file."""
    try:
        frame = pd.read_csv(path, sep=r"[,\s]+", comment="#", header=None, engine="python")
    except (OSError, ValueError, pd.errors.EmptyDataError) as e:
        raise ConfigError(f"cannot read area file {path}: {e}") from e
    if frame.shape[1] < 2:
        raise ConfigError(f"area file {path} needs two columns")
    try:
        return SubArea(tuple(map(tuple, frame.iloc[:, :2].to_numpy(dtype=float))))
    except ValueError as e:
        raise ConfigError(f"invalid area polygon in {path}: {e}") from e


def cmd_run(args: argparse.Namespace) -> int:
    overrides = {
        "run.seed": args.seed,
        "run.policy": args.policy,
        "run.n_u": args.uavs,
        "run.duration_min": args.duration,
    }
    settings = load_scenario(args.scenario, overrides)
    result = run_mission(settings)
    output = write_outputs(result, args.out)
    print(result.summary.to_text())
    print(f"\nTrack written to {output.track_csv}")
    return EXIT_OK


def cmd_ensemble(args: argparse.Namespace) -> int:
    settings = load_scenario(args.scenario, {"run.policy": args.policy})
    seeds = parse_seed_range(args.seeds)
    report = asyncio.run(run_ensemble(settings, seeds, workers=args.workers, out_dir=args.out))
    args.out.mkdir(parents=True, exist_ok=True)
    report.frame().to_csv(args.out / "members.csv")
    with open(args.out / "ensemble.json", "w", encoding="utf-8") as f:
        json.dump(report.to_dict(), f, indent=2)
    for name in sorted(report.mean):
        print(f"{name:<28} {report.mean[name]:>12.4f} +/- {report.stdev[name]:.4f}")
    if report.failures:
        print(f"\n{len(report.failures)} member runs failed: {[seed for seed, _ in report.failures]}")
        return EXIT_BREACH
    return EXIT_OK


def cmd_tune(args: argparse.Namespace) -> int:
    settings = load_scenario(args.scenario, {"control.budget": args.budget})
    params = load_airframe(args.airframe)
    config = DlntConfig.from_settings(settings.control)
    c = settings.control
    result = tune_autopilot(params, config, SeedStreams.from_seed(args.seed).tuner, c.kp_max, c.ki_max, c.kd_max)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    save_gains(args.out, PidGains.from_vector(result.best.gains))
    history_frame(result.history).to_csv(args.out.with_suffix(".history.csv"), index=False)
    print(f"Best aggregate reward {result.best.aggregate:.4f} (initial best {result.initial_best:.4f})")
    return EXIT_OK


def cmd_plan(args: argparse.Namespace) -> int:
    settings = load_scenario(args.scenario)
    area = read_area(args.area)
    region = settings.region_obj
    mode = _PLAN_MODES[args.mode]
    width = coverage_width(np.radians(settings.agents.fov_deg), region.z_min)
    start = area.vertices[0]
    priority = GridMap.for_region(region, settings.maps.cell_size, fill=1.0)
    waypoints = plan_waypoints(
        SubMission(kind_of(mode), mode),
        area,
        start,
        0.0,
        width,
        priority,
        settings.planning.local_radius,
        settings.planning.exploration_destinations,
        0.0,
        SeedStreams.from_seed(args.seed).planner,
    )
    z = settings.agents.initial_altitude
    path = PlannedPath(start=(start[0], start[1], z))
    for x, y in waypoints:
        path.append((x, y, z), 0.0, 0.0)
    metrics = path_metrics(path, (), settings.planning.r_safe)
    for name, value in path_summary(metrics).items():
        print(f"{name:<14} {value:>12.3f}")
    print(f"{'waypoints':<14} {len(waypoints):>12d}")
    if args.out is not None:
        path.to_frame(0).to_csv(args.out, index=False)
    return EXIT_OK


_COMMANDS = {"run": cmd_run, "ensemble": cmd_ensemble, "tune-gains": cmd_tune, "plan": cmd_plan}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, args.log_level),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG
    except InvariantBreach as e:
        logger.error(f"Invariant breach: {e}")
        return EXIT_BREACH
    except SoarSimError as e:
        logger.error(f"Run failed: {e}")
        return EXIT_BREACH


if __name__ == "__main__":
    sys.exit(main())
