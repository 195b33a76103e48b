"""
Rational-choice action selection over decision matrices.

Rows are candidate actions, columns reward scores. Columns flagged as
maximize are sign-flipped so every score is minimized, five aggregate
scores are computed per row, rows dominated in those scores are dropped and
the lowest aggregate wins.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

logger = logging.getLogger(__name__)


class CandidateKind(str, Enum):
    AVAILABLE = "available"
    PREDICTED = "predicted"


@dataclass(frozen=True)
class ActionCandidate:
    id: str
    kind: CandidateKind = CandidateKind.AVAILABLE
    payload: Any = None


@dataclass
class DecisionMatrix:
    """Reward scores per candidate action with per-column orientation."""

    values: np.ndarray
    maximize: Sequence[bool]
    reference: Optional[np.ndarray] = None
    candidates: List[ActionCandidate] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.values = np.atleast_2d(np.asarray(self.values, dtype=float))
        if len(self.maximize) != self.values.shape[1]:
            raise ValueError("orientation flags must match the number of reward columns")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("decision matrix entries must be finite")
        if self.reference is not None:
            self.reference = np.asarray(self.reference, dtype=float)
            if self.reference.shape != (self.values.shape[1],):
                raise ValueError("reference length must equal the number of reward columns")

    @property
    def n_rewards(self) -> int:
        return self.values.shape[1]

    @property
    def n_available(self) -> int:
        if not self.candidates:
            return self.values.shape[0]
        return sum(1 for c in self.candidates if c.kind == CandidateKind.AVAILABLE)


def normalize_orientation(values: np.ndarray, maximize: Sequence[bool]) -> np.ndarray:
    """Multiply maximize columns by -1 so all columns are minimized."""
    signs = np.where(np.asarray(maximize, dtype=bool), -1.0, 1.0)
    return np.asarray(values, dtype=float) * signs


def neutral_reference(values: np.ndarray, n_available: Optional[int] = None) -> np.ndarray:
    """Column-wise median of the available rows."""
    rows = np.asarray(values, dtype=float)
    if n_available:
        rows = rows[:n_available]
    return np.median(rows, axis=0)


def xi1(dm: np.ndarray, ref: np.ndarray) -> np.ndarray:
    """Negative total absolute deviation from the reference."""
    return -np.abs(np.asarray(dm) - np.asarray(ref)).sum(axis=1)


def is_loss(value: float, ref: np.ndarray) -> bool:
    """A score is a loss when it is worse than every reference component."""
    return bool(np.all(value > np.asarray(ref)))


def xi2(dm: np.ndarray, ref: np.ndarray) -> np.ndarray:
    """Negative count of loss columns per row."""
    dm = np.asarray(dm)
    return -np.array([sum(is_loss(v, ref) for v in row) for row in dm], dtype=float)


def xi3(dm: np.ndarray) -> np.ndarray:
    """Total distance to the column-wise ideal."""
    dm = np.asarray(dm)
    return np.abs(dm - dm.min(axis=0)).sum(axis=1)


def xi4(dm: np.ndarray) -> np.ndarray:
    """
    Diversity: Euclidean steps between wrapped consecutive (index, value) points.

    Raises:
        ValueError: Fewer than two reward columns
    """
    dm = np.asarray(dm, dtype=float)
    n = dm.shape[1]
    if n < 2:
        raise ValueError("diversity score needs at least two reward columns")
    total = np.zeros(dm.shape[0])
    for j in range(1, n + 1):
        jh = j % n + 1
        total += np.sqrt((j - jh) ** 2 + (dm[:, j - 1] - dm[:, jh - 1]) ** 2)
    return total


def xi5(dm: np.ndarray) -> np.ndarray:
    """
    Similarity: half the summed absolute cross terms over wrapped consecutive triples.

    Raises:
        ValueError: Fewer than three reward columns
    """
    dm = np.asarray(dm, dtype=float)
    n = dm.shape[1]
    if n < 3:
        raise ValueError("similarity score needs at least three reward columns")
    total = np.zeros(dm.shape[0])
    for j in range(1, n + 1):
        jh = j % n + 1
        jt = (j + 1) % n + 1
        total += np.abs(jh * dm[:, jt - 1] - dm[:, jh - 1] * jt)
    return 0.5 * total


def score_matrix(dm: np.ndarray, ref: np.ndarray) -> np.ndarray:
    """Per-row aggregate scores [xi1 .. xi5] of a normalized matrix."""
    return np.column_stack([xi1(dm, ref), xi2(dm, ref), xi3(dm), xi4(dm), xi5(dm)])


def undominated_rows(scores: np.ndarray) -> List[int]:
    """Row indices not strictly dominated (all <= with one <) by another row."""
    keep = []
    for k, row in enumerate(scores):
        dominated = any(
            np.all(other <= row) and np.any(other < row) for m, other in enumerate(scores) if m != k
        )
        if not dominated:
            keep.append(k)
    return keep


def _oriented(matrix: DecisionMatrix):
    dm = normalize_orientation(matrix.values, matrix.maximize)
    if matrix.reference is not None:
        return dm, normalize_orientation(matrix.reference[None, :], matrix.maximize)[0]
    return dm, neutral_reference(dm, matrix.n_available)


def select_action(matrix: DecisionMatrix) -> int:
    """
    Index of the chosen row.

    Scores the sign-normalized matrix against its reference (the neutral
    median of available rows when unset), filters dominated rows and
    returns the lowest aggregate, ties going to the lowest index.

    Raises:
        ValueError: Empty matrix or fewer than three reward columns
    """
    if matrix.values.shape[0] == 0:
        raise ValueError("cannot select from an empty decision matrix")
    if matrix.n_rewards < 3:
        raise ValueError("selection needs at least three reward columns")
    scores = score_matrix(*_oriented(matrix))
    survivors = undominated_rows(scores)
    if not survivors:
        raise AssertionError("dominance filter removed every row")
    totals = scores.sum(axis=1)
    return min(survivors, key=lambda k: (totals[k], k))


def decision_rows(tick: int, agent_id: int, matrix: DecisionMatrix, chosen: int) -> List[Dict[str, Any]]:
    """Flat rows describing one decision, for the optional debug dump."""
    dm, ref = _oriented(matrix)
    scores = score_matrix(dm, ref) if matrix.n_rewards >= 3 else np.zeros((dm.shape[0], 5))
    rows = []
    for k in range(dm.shape[0]):
        candidate = matrix.candidates[k].id if k < len(matrix.candidates) else str(k)
        row = {"tick": tick, "agent_id": agent_id, "row": k, "candidate": candidate, "chosen": int(k == chosen)}
        row.update({f"dm_{j}": float(v) for j, v in enumerate(dm[k])})
        row.update({f"xi{j + 1}": float(v) for j, v in enumerate(scores[k])})
        rows.append(row)
    return rows
