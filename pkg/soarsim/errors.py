"""Exception hierarchy for the soaring simulator."""

from typing import Any, List, Optional


class SoarSimError(Exception):
    """Base exception for simulator errors."""

    pass


class ConfigError(SoarSimError):
    """Scenario or airframe configuration is invalid."""

    pass


class ModelValidityError(SoarSimError):
    """Vehicle state left the envelope where the flight model is valid."""

    def __init__(self, field: str, value: float, message: Optional[str] = None):
        self.field = field
        self.value = value
        super().__init__(message or f"state field '{field}' outside model validity: {value!r}")


class SingularAllocationError(SoarSimError):
    """Control-effectiveness matrix cannot be inverted at this state."""

    pass


class DegeneratePolygonError(SoarSimError):
    """Planning polygon has zero area."""

    pass


class EmptyMaskError(SoarSimError):
    """Exploration sampler has no admissible cell."""

    pass


class TrappedError(SoarSimError):
    """Horizon planner found no safe candidate."""

    def __init__(self, message: str, partial_path: Optional[List[Any]] = None):
        self.partial_path = partial_path or []
        super().__init__(message)


class IllegalTransitionError(SoarSimError):
    """Behavior transition outside the legal edge set."""

    pass


class InvariantBreach(SoarSimError):
    """Runtime invariant violated inside the tick loop."""

    def __init__(self, message: str, tick: Optional[int] = None, agent_id: Optional[int] = None):
        self.tick = tick
        self.agent_id = agent_id
        super().__init__(f"tick={tick} agent={agent_id}: {message}")
