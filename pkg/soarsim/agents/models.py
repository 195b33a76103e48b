"""Agent behavior states, flight modes and comparison policies."""

from enum import Enum
from typing import Dict, FrozenSet


class SoarState(str, Enum):
    """Discrete behaviors of the per-agent state machine."""

    FOLLOW_COVERAGE_PLANNER = "follow_coverage_planner"
    EXPLORE = "explore"
    GO_TO_MAPPED_LIFT = "go_to_mapped_lift"
    FIRST_TURN = "first_turn"
    SEARCHING_ORBIT = "searching_orbit"
    EXPLOIT = "exploit"
    CHASE_LIFT = "chase_lift"
    MAINTAIN_SAFETY = "maintain_safety"
    IDLE = "idle"

    @property
    def is_sub_mission(self) -> bool:
        return self in (SoarState.FOLLOW_COVERAGE_PLANNER, SoarState.EXPLORE)

    @property
    def is_orbit(self) -> bool:
        return self in (SoarState.FIRST_TURN, SoarState.SEARCHING_ORBIT, SoarState.EXPLOIT, SoarState.CHASE_LIFT)

    @property
    def is_soaring(self) -> bool:
        """States that take an agent off its sub-mission to climb."""
        return self in (SoarState.EXPLOIT, SoarState.CHASE_LIFT)


# Candidate id of "keep flying the sub-mission" in local decisions.
CONTINUE = "continue"


class FlightMode(str, Enum):
    GLIDE = "glide"
    ENGINE = "engine"


class SubMissionKind(str, Enum):
    SURVEILLANCE = "surveillance"
    EXPLORATION = "exploration"


class FlightModel(str, Enum):
    """Plant an agent flies in a mission."""

    POINT_MASS = "point_mass"
    SIX_DOF = "6dof"


class PolicyKind(str, Enum):
    """Information-sharing and coordination policy of a run."""

    PROPOSED_SPLIT = "proposed_split"
    PROPOSED_SHARED = "proposed_shared"
    SEMI_COOPERATIVE = "semi_cooperative"
    NON_COOPERATIVE = "non_cooperative"
    ZERO_KNOWLEDGE = "zero_knowledge"

    @property
    def coordinated(self) -> bool:
        """Agents receive global manager recommendations."""
        return self in (PolicyKind.PROPOSED_SPLIT, PolicyKind.PROPOSED_SHARED)

    @property
    def shares_lift_map(self) -> bool:
        return self in (PolicyKind.PROPOSED_SPLIT, PolicyKind.PROPOSED_SHARED, PolicyKind.SEMI_COOPERATIVE)

    @property
    def shares_mission_map(self) -> bool:
        return self.coordinated

    @property
    def has_lift_map(self) -> bool:
        return self != PolicyKind.ZERO_KNOWLEDGE


_S = SoarState
_ANY_ACTIVE = frozenset({_S.MAINTAIN_SAFETY, _S.IDLE})
_RESUME = frozenset({_S.FOLLOW_COVERAGE_PLANNER, _S.EXPLORE})

LEGAL_TRANSITIONS: Dict[SoarState, FrozenSet[SoarState]] = {
    _S.FOLLOW_COVERAGE_PLANNER: _RESUME | _ANY_ACTIVE | {_S.GO_TO_MAPPED_LIFT, _S.FIRST_TURN},
    _S.EXPLORE: _RESUME | _ANY_ACTIVE | {_S.GO_TO_MAPPED_LIFT, _S.FIRST_TURN},
    _S.GO_TO_MAPPED_LIFT: _RESUME | _ANY_ACTIVE | {_S.FIRST_TURN, _S.SEARCHING_ORBIT},
    _S.SEARCHING_ORBIT: _RESUME | _ANY_ACTIVE | {_S.FIRST_TURN},
    _S.FIRST_TURN: _RESUME | _ANY_ACTIVE | {_S.EXPLOIT, _S.CHASE_LIFT},
    _S.EXPLOIT: _RESUME | _ANY_ACTIVE | {_S.CHASE_LIFT},
    _S.CHASE_LIFT: _RESUME | _ANY_ACTIVE | {_S.EXPLOIT},
    _S.MAINTAIN_SAFETY: _RESUME | {_S.IDLE},
    _S.IDLE: frozenset(),
}


def is_legal(current: SoarState, new: SoarState) -> bool:
    """Staying in a state is always legal; Idle is terminal."""
    if current == new:
        return True
    return new in LEGAL_TRANSITIONS[current]
