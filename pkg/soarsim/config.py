"""Scenario configuration: typed settings, flat dotted-key files, config echo."""

import logging
import math
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union

from pydantic import BaseModel, ConfigDict, ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict

from soarsim.agents.models import FlightModel, PolicyKind
from soarsim.environment.models import LifecyclePhases, Region
from soarsim.errors import ConfigError

logger = logging.getLogger(__name__)

REPO_ROOT = Path(__file__).resolve().parents[1]

# Ranges an environment setting may be drawn from.
ENVIRONMENT_ENVELOPE = {
    "updraft_radius": (50.0, 100.0),
    "updraft_strength": (0.1, 4.0),
    "updraft_lifecycle": (360.0, 600.0),
    "target_duration": (360.0, 1800.0),
}


class _Group(BaseModel):
    model_config = ConfigDict(extra="forbid")


class RegionSettings(_Group):
    lower_x: float = 0.0
    lower_y: float = 0.0
    upper_x: float = 1500.0
    upper_y: float = 1500.0
    z_min: float = 200.0
    z_max: float = 1000.0


class EnvironmentSettings(_Group):
    # 598 updrafts and 1790 targets over 6 h on 36 km^2
    updraft_rate_per_km2_h: float = 598.0 / 36.0 / 6.0
    target_rate_per_km2_h: float = 1790.0 / 36.0 / 6.0
    max_updraft_count: int = 30
    updraft_radius_min: float = 50.0
    updraft_radius_max: float = 100.0
    updraft_strength_min: float = 0.1
    updraft_strength_max: float = 4.0
    updraft_lifecycle_min: float = 360.0
    updraft_lifecycle_max: float = 600.0
    target_duration_min: float = 360.0
    target_duration_max: float = 1800.0
    formation_ratio: float = 1.0
    growing_ratio: float = 2.0
    maturity_ratio: float = 5.0
    fade_ratio: float = 2.0
    initial_population: bool = True


class MapSettings(_Group):
    c_max: float = 480.0
    merge_radius: float = 100.0
    cell_size: float = 100.0


class AgentSettings(_Group):
    fov_deg: float = 60.0
    z_threshold: float = 400.0
    initial_altitude: float = 500.0
    w_c_min: float = 0.5
    sigma_u: float = 0.2
    tau_t: float = 30.0
    delta_t: float = 60.0
    delta_l: float = 120.0
    delta_map: float = 800.0
    battery_reserve: float = 0.10
    k_psi: float = 0.05
    thermal_radius: float = 40.0
    search_orbit_radius: float = 150.0
    arrival_radius: float = 60.0
    updraft_capacity: int = 2
    altitude_separation: float = 50.0
    altitude_tolerance: float = 25.0
    boundary_margin: float = 60.0


class PlanningSettings(_Group):
    r_safe: float = 30.0
    rho_factor: float = 1.5
    horizon_length: float = 500.0
    horizon_duration: float = 20.0
    local_radius: float = 500.0
    exploration_destinations: int = 6


class CoordinationSettings(_Group):
    risk_tolerance: float = 1.0
    quorum: int = 0  # 0 selects ceil(n_u / 2)
    placement: str = "backup-node"


class MetricSettings(_Group):
    lam: float = 1.0
    comm_range: float = 3000.0


class ControlSettings(_Group):
    kp_max: float = 5.0
    ki_max: float = 1.0
    kd_max: float = 2.0
    buffer_capacity: int = 20
    local_search_frames: int = 10
    learning_delay: int = 10
    step_size: float = 0.1
    budget: int = 300
    initial_population: int = 20
    hidden_width: int = 16
    epochs: int = 200
    episode_duration: float = 60.0


class VehicleSettings(_Group):
    model: FlightModel = FlightModel.POINT_MASS
    gains_file: str = ""  # empty flies the default autopilot gains


class RunSettings(_Group):
    seed: int = 0
    n_u: int = 3
    policy: PolicyKind = PolicyKind.PROPOSED_SPLIT
    roi_rho: int = 1
    duration_min: float = 30.0
    tick: float = 1.0
    dynamics_dt: float = 0.1
    airframe: str = "airframes/phoenix2400.txt"
    debug_decisions: bool = False


class Settings(BaseSettings):
    """Every tunable of a simulation run, grouped by dotted namespace."""

    region: RegionSettings = RegionSettings()
    environment: EnvironmentSettings = EnvironmentSettings()
    maps: MapSettings = MapSettings()
    agents: AgentSettings = AgentSettings()
    planning: PlanningSettings = PlanningSettings()
    coordination: CoordinationSettings = CoordinationSettings()
    metrics: MetricSettings = MetricSettings()
    control: ControlSettings = ControlSettings()
    vehicle: VehicleSettings = VehicleSettings()
    run: RunSettings = RunSettings()

    model_config = SettingsConfigDict(
        env_prefix="SOARSIM_",
        env_nested_delimiter="__",
        case_sensitive=False,
        extra="forbid",
    )

    def validate_consistency(self) -> None:
        """Cross-field checks the per-field schema cannot express."""
        r = self.region
        if not (r.lower_x < r.upper_x and r.lower_y < r.upper_y):
            raise ConfigError("region lower bound must be below upper bound componentwise")
        if not (0.0 < r.z_min < self.agents.z_threshold < r.z_max):
            raise ConfigError(
                f"altitudes must satisfy 0 < region.z_min < agents.z_threshold < region.z_max, "
                f"got {r.z_min}, {self.agents.z_threshold}, {r.z_max}"
            )
        if self.run.n_u < 1:
            raise ConfigError("run.n_u must be at least 1")
        if self.run.roi_rho not in (0, 1):
            raise ConfigError("run.roi_rho must be 0 or 1")
        if self.run.duration_min < 0 or self.run.tick <= 0 or self.run.dynamics_dt <= 0:
            raise ConfigError("run.duration_min must be >= 0 and tick sizes > 0")
        if self.run.tick < self.run.dynamics_dt:
            raise ConfigError("run.tick must not be shorter than run.dynamics_dt")
        if self.coordination.quorum > self.run.n_u:
            raise ConfigError("coordination.quorum must not exceed run.n_u")
        if self.coordination.risk_tolerance <= 0:
            raise ConfigError("coordination.risk_tolerance must be positive")
        if not 0.0 < self.agents.battery_reserve < 1.0:
            raise ConfigError("agents.battery_reserve is a fraction in (0, 1)")
        env = self.environment
        for low, high, name in (
            (env.updraft_radius_min, env.updraft_radius_max, "updraft_radius"),
            (env.updraft_strength_min, env.updraft_strength_max, "updraft_strength"),
            (env.updraft_lifecycle_min, env.updraft_lifecycle_max, "updraft_lifecycle"),
            (env.target_duration_min, env.target_duration_max, "target_duration"),
        ):
            if not 0 < low <= high:
                raise ConfigError(f"environment.{name} range invalid: [{low}, {high}]")
            floor, ceiling = ENVIRONMENT_ENVELOPE[name]
            if low < floor or high > ceiling:
                raise ConfigError(f"environment.{name} range [{low}, {high}] leaves the allowed [{floor}, {ceiling}]")
        c = self.control
        if c.local_search_frames <= 0 or c.learning_delay <= 0 or c.buffer_capacity <= 0:
            raise ConfigError("control frame lengths and buffer capacity must be positive")
        if c.budget < c.initial_population:
            raise ConfigError("control.budget must be at least control.initial_population")

    @property
    def duration_s(self) -> float:
        return self.run.duration_min * 60.0

    @property
    def ticks(self) -> int:
        """Number of behavior ticks in the run."""
        return int(round(self.duration_s / self.run.tick))

    @property
    def region_obj(self) -> Region:
        r = self.region
        return Region(
            lower_bound=(r.lower_x, r.lower_y),
            upper_bound=(r.upper_x, r.upper_y),
            z_min=r.z_min,
            z_max=r.z_max,
        )

    @property
    def phases(self) -> LifecyclePhases:
        env = self.environment
        return LifecyclePhases.from_ratios(
            env.formation_ratio, env.growing_ratio, env.maturity_ratio, env.fade_ratio
        )

    @property
    def resolved_quorum(self) -> int:
        if self.coordination.quorum > 0:
            return self.coordination.quorum
        return math.ceil(self.run.n_u / 2)

    @property
    def effective_roi_rho(self) -> int:
        """Shared-area and uncoordinated policies work on the whole region."""
        if self.run.policy == PolicyKind.PROPOSED_SHARED or not self.run.policy.coordinated:
            return 0
        return self.run.roi_rho

    @property
    def airframe_path(self) -> Path:
        path = Path(self.run.airframe)
        if path.is_absolute() or path.exists():
            return path
        return REPO_ROOT / path

    @property
    def gains_path(self) -> Optional[Path]:
        if not self.vehicle.gains_file:
            return None
        path = Path(self.vehicle.gains_file)
        if path.is_absolute() or path.exists():
            return path
        return REPO_ROOT / path

    def to_flat(self) -> Dict[str, str]:
        """Effective configuration as flat dotted keys."""
        flat: Dict[str, str] = {}
        for group, values in self.model_dump(mode="json").items():
            for key, value in values.items():
                if isinstance(value, bool):
                    value = "true" if value else "false"
                flat[f"{group}.{key}"] = str(value)
        return flat

    def write_scenario(self, path: Union[str, Path]) -> None:
        """Write the config echo; loading it reproduces this run."""
        lines = [f"{key} = {value}" for key, value in self.to_flat().items()]
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def parse_scenario_text(text: str) -> Dict[str, str]:
    """Parse flat `dotted.key = value` lines."""
    entries: Dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if "." not in key:
            raise ConfigError(f"line {lineno}: key '{key}' has no namespace")
        if key in entries:
            raise ConfigError(f"line {lineno}: duplicate key '{key}'")
        entries[key] = value
    return entries


def _nest(flat: Mapping[str, Any]) -> Dict[str, Dict[str, Any]]:
    nested: Dict[str, Dict[str, Any]] = {}
    for key, value in flat.items():
        group, field = key.split(".", 1)
        nested.setdefault(group, {})[field] = value
    return nested


def build_settings(flat: Optional[Mapping[str, Any]] = None) -> Settings:
    """Instantiate and validate settings from flat dotted keys."""
    try:
        settings = Settings(**_nest(flat or {}))
    except ValidationError as e:
        raise ConfigError(f"invalid scenario configuration:\n{e}") from e
    settings.validate_consistency()
    return settings


def load_scenario(
    path: Optional[Union[str, Path]] = None,
    overrides: Optional[Mapping[str, Any]] = None,
) -> Settings:
    """
    Load a scenario file and apply command-line overrides.

    Args:
        path: Scenario file with `dotted.key = value` lines (None for defaults)
        overrides: Flat dotted keys taking precedence over the file

    Returns:
        Validated Settings

    Raises:
        ConfigError: Unreadable file, malformed line, unknown key or invalid value
    """
    flat: Dict[str, Any] = {}
    if path is not None:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigError(f"cannot read scenario file {path}: {e}") from e
        flat.update(parse_scenario_text(text))
        logger.info(f"Loaded scenario {path} ({len(flat)} keys)")
    for key, value in (overrides or {}).items():
        if value is not None:
            flat[key] = value
    return build_settings(flat)
