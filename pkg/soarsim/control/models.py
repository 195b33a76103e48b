"""Gain sets, command signals and tuner records."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Tuple

import numpy as np

CHANNELS: Tuple[str, ...] = ("roll", "pitch", "yaw", "altitude", "airspeed")
TERMS: Tuple[str, ...] = ("kp", "ki", "kd")
REWARD_NAMES: Tuple[str, ...] = tuple(f"e_{c}" for c in CHANNELS) + ("e_path",)


@dataclass(frozen=True)
class ChannelGains:
    kp: float = 0.0
    ki: float = 0.0
    kd: float = 0.0

    def __post_init__(self) -> None:
        if min(self.kp, self.ki, self.kd) < 0:
            raise ValueError("PID gains must be non-negative")


@dataclass(frozen=True)
class PidGains:
    """Proportional, integral and derivative gains of the five autopilot channels."""

    roll: ChannelGains = ChannelGains(1.0, 0.1, 0.2)
    pitch: ChannelGains = ChannelGains(1.0, 0.1, 0.2)
    yaw: ChannelGains = ChannelGains(1.0, 0.0, 0.1)
    altitude: ChannelGains = ChannelGains(1.0, 0.05, 0.5)
    airspeed: ChannelGains = ChannelGains(1.0, 0.2, 0.0)

    def as_vector(self) -> np.ndarray:
        """Flattened (channel, term) vector in CHANNELS x TERMS order."""
        return np.array([getattr(getattr(self, c), t) for c in CHANNELS for t in TERMS], dtype=float)

    @classmethod
    def from_vector(cls, values) -> "PidGains":
        values = np.asarray(values, dtype=float)
        if values.shape != (len(CHANNELS) * len(TERMS),):
            raise ValueError(f"expected {len(CHANNELS) * len(TERMS)} gains, got shape {values.shape}")
        channels = {
            c: ChannelGains(*(float(v) for v in values[i * 3 : i * 3 + 3])) for i, c in enumerate(CHANNELS)
        }
        return cls(**channels)

    def to_flat(self) -> Dict[str, float]:
        return {f"{c}.{t}": getattr(getattr(self, c), t) for c in CHANNELS for t in TERMS}


def gain_box(kp_max: float, ki_max: float, kd_max: float) -> Tuple[np.ndarray, np.ndarray]:
    """Lower and upper bounds of the gain search space, per flattened gain."""
    upper = np.tile([kp_max, ki_max, kd_max], len(CHANNELS)).astype(float)
    return np.zeros_like(upper), upper


@dataclass(frozen=True)
class CommandSet:
    phi_cmd: float = 0.0
    theta_cmd: float = 0.0
    psi_cmd: float = 0.0
    z_cmd: float = 500.0
    Va_cmd: float = 12.0


@dataclass
class PidState:
    integral: float = 0.0
    prev_error: Optional[float] = None


class FrameKind(str, Enum):
    INITIAL = "initial"
    LOCAL_SEARCH = "local_search"
    DELAYED_LEARNING = "delayed_learning"


@dataclass(frozen=True)
class ActionRecord:
    """One tuner evaluation: a gain vector and its reward vector (lower is better)."""

    gains: np.ndarray
    rewards: Tuple[float, ...]
    evaluated: bool = True
    frame_kind: FrameKind = FrameKind.INITIAL
    index: int = 0

    @property
    def aggregate(self) -> float:
        return float(sum(self.rewards))


@dataclass(frozen=True)
class DlntConfig:
    buffer_capacity: int = 20
    local_search_frames: int = 10
    learning_delay: int = 10
    step_size: float = 0.1
    budget: int = 300
    initial_population: int = 20
    hidden_width: int = 16
    epochs: int = 200
    learning_rate: float = 0.2
    max_pairs: int = 600
    screening_pool: int = 5

    def __post_init__(self) -> None:
        if self.buffer_capacity <= 0:
            raise ValueError("buffer_capacity must be positive")
        if self.local_search_frames <= 0 or self.learning_delay <= 0:
            raise ValueError("frame lengths must be positive")
        if self.budget < self.initial_population:
            raise ValueError("budget must cover the initial population")

    @classmethod
    def from_settings(cls, control) -> "DlntConfig":
        return cls(
            buffer_capacity=control.buffer_capacity,
            local_search_frames=control.local_search_frames,
            learning_delay=control.learning_delay,
            step_size=control.step_size,
            budget=control.budget,
            initial_population=control.initial_population,
            hidden_width=control.hidden_width,
            epochs=control.epochs,
        )


@dataclass
class TuningResult:
    best: ActionRecord
    history: list = field(default_factory=list)
    best_so_far: list = field(default_factory=list)
    initial_best: Optional[float] = None
