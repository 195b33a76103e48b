"""Global manager configuration, recommendations and the events it logs."""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Tuple


class ManagerPlacement(str, Enum):
    LEADER_AGENT = "leader-agent"
    BACKUP_NODE = "backup-node"


@dataclass(frozen=True)
class ManagerConfig:
    risk_tolerance: float = 1.0
    quorum: int = 1
    placement: ManagerPlacement = ManagerPlacement.BACKUP_NODE

    def __post_init__(self) -> None:
        if self.risk_tolerance <= 0:
            raise ValueError("risk tolerance must be positive")
        if self.quorum < 1:
            raise ValueError("quorum must be at least one agent")

    @classmethod
    def from_settings(cls, settings) -> "ManagerConfig":
        return cls(
            risk_tolerance=settings.coordination.risk_tolerance,
            quorum=settings.resolved_quorum,
            placement=ManagerPlacement(settings.coordination.placement),
        )


class Level3Option(str, Enum):
    REPEAT = "repeat"
    NEW_MISSION = "new_mission"
    SWAP = "swap"


@dataclass
class Recommendation:
    """
    A joint action proposed by the manager.

    actions maps every alive agent to its proposed action; predicted_local
    holds the manager's point prediction of each agent's next local reward.
    """

    level: int
    actions: Dict[int, str]
    predicted_local: Dict[int, float]
    global_reward: float
    global_risk: float
    description: str = ""


@dataclass(frozen=True)
class AreaStats:
    """Performance of a sub-area as the maps see it, each a share in [0, 1]."""

    targets: float = 0.0
    lifts: float = 0.0
    priority: float = 0.0


@dataclass(frozen=True)
class CoordinationEvent:
    time_s: float
    level: int
    agents: Tuple[int, ...]
    decision: str

    def to_row(self) -> Dict[str, object]:
        """Row in the shared run event log."""
        return {
            "time_s": self.time_s,
            "kind": f"coordination_level{self.level}",
            "id": self.agents[0] if self.agents else -1,
            "x": math.nan,
            "y": math.nan,
            "param": math.nan,
            "level": self.level,
            "agents": " ".join(str(a) for a in self.agents),
            "decision": self.decision,
        }


@dataclass
class Level3Decision:
    agent_id: int
    option: Level3Option
    partner: Optional[int] = None
    accepted: bool = True
    scores: Dict[str, float] = field(default_factory=dict)
