from soarsim.simulation.ensemble import EnsembleReport, aggregate, parse_seed_range, run_ensemble, run_member
from soarsim.simulation.mission import MissionResult, SeedStreams, launch_agents, run_mission, speed_profile
from soarsim.simulation.outputs import RunOutput, write_outputs

__all__ = [
    "EnsembleReport",
    "MissionResult",
    "RunOutput",
    "SeedStreams",
    "aggregate",
    "launch_agents",
    "parse_seed_range",
    "run_ensemble",
    "run_member",
    "run_mission",
    "speed_profile",
    "write_outputs",
]
