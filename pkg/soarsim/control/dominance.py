"""Pareto dominance labels and the learned dominance classifier."""

import logging
import warnings
from dataclasses import dataclass
from enum import IntEnum
from typing import List, Optional, Sequence, Tuple

import numpy as np
from sklearn.exceptions import ConvergenceWarning
from sklearn.neural_network import MLPClassifier

from soarsim.control.models import ActionRecord, DlntConfig

logger = logging.getLogger(__name__)


class Dominance(IntEnum):
    NEG = -1  # first vector dominates
    ZERO = 0
    POS = 1  # first vector is dominated


def dominance_label(ci: Sequence[float], cj: Sequence[float]) -> Dominance:
    """
    Dominance of reward vector ci relative to cj, lower being better.

    Raises:
        ValueError: Vectors differ in length
    """
    a = np.asarray(ci, dtype=float)
    b = np.asarray(cj, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"reward vectors differ in length: {a.shape} vs {b.shape}")
    if np.all(a <= b) and np.any(a < b):
        return Dominance.NEG
    if np.all(a >= b) and np.any(a > b):
        return Dominance.POS
    return Dominance.ZERO


def non_dominated(records: Sequence[ActionRecord]) -> List[int]:
    """Indices of records no other record dominates, in input order."""
    front = []
    for i, ri in enumerate(records):
        if not any(dominance_label(rj.rewards, ri.rewards) == Dominance.NEG for j, rj in enumerate(records) if j != i):
            front.append(i)
    return front


_MIN_DOMINATED = 8


def dominance_pairs(
    records: Sequence[ActionRecord],
    rng: np.random.Generator,
    max_pairs: int = 600,
) -> List[Tuple[int, int, Dominance]]:
    """
    Labelled ordered pairs from a balanced mix of front and dominated records.

    Every unordered pair appears in both orders, so labels are antisymmetric.
    """
    front = set(non_dominated(records))
    elite = sorted(front)
    dominated = [i for i in range(len(records)) if i not in front]
    n = min(len(dominated), max(len(elite), _MIN_DOMINATED))
    if n < len(dominated):
        dominated = sorted(rng.choice(dominated, size=n, replace=False).tolist())
    chosen = sorted(elite + dominated)
    unordered = [(chosen[a], chosen[b]) for a in range(len(chosen)) for b in range(a + 1, len(chosen))]
    if 2 * len(unordered) > max_pairs:
        keep = rng.choice(len(unordered), size=max_pairs // 2, replace=False)
        unordered = [unordered[k] for k in sorted(keep)]
    pairs = []
    for i, j in unordered:
        label = dominance_label(records[i].rewards, records[j].rewards)
        pairs.append((i, j, label))
        pairs.append((j, i, Dominance(-label)))
    return pairs


def pair_features(ui: np.ndarray, uj: np.ndarray) -> np.ndarray:
    """Classifier input for a pair of unit-box gain vectors."""
    return np.concatenate([2.0 * ui - 1.0, 2.0 * uj - 1.0, ui - uj])


@dataclass
class DominanceClassifier:
    """Feedforward network predicting the dominance label of a pair of gain vectors."""

    model: MLPClassifier
    lower: np.ndarray
    upper: np.ndarray
    accuracy: float

    def unit(self, gains: np.ndarray) -> np.ndarray:
        return (np.asarray(gains, dtype=float) - self.lower) / (self.upper - self.lower)

    def predict(self, gi: np.ndarray, gj: np.ndarray) -> Dominance:
        x = pair_features(self.unit(gi), self.unit(gj))[None, :]
        return Dominance(int(self.model.predict(x)[0]))


def train_dominance_classifier(
    records: Sequence[ActionRecord],
    config: DlntConfig,
    rng: np.random.Generator,
    lower: np.ndarray,
    upper: np.ndarray,
    previous: Optional[DominanceClassifier] = None,
) -> Optional[DominanceClassifier]:
    """
    Fit the dominance classifier on labelled pairs of evaluated records.

    Returns the previous classifier unchanged when the pair set holds a
    single label or fewer than two records are evaluated.
    """
    evaluated = [r for r in records if r.evaluated]
    if len(evaluated) < 2:
        return previous
    pairs = dominance_pairs(evaluated, rng, config.max_pairs)
    labels = np.array([int(label) for _, _, label in pairs])
    if len(np.unique(labels)) < 2:
        logger.debug("Dominance pairs hold a single label, keeping previous classifier")
        return previous
    span = upper - lower
    units = [(r.gains - lower) / span for r in evaluated]
    X = np.array([pair_features(units[i], units[j]) for i, j, _ in pairs])
    model, accuracy = fit_dominance_network(X, labels, config, int(rng.integers(2**31 - 1)))
    logger.debug(f"Trained dominance classifier on {len(pairs)} pairs, accuracy {accuracy:.3f}")
    return DominanceClassifier(model=model, lower=lower, upper=upper, accuracy=accuracy)


def fit_dominance_network(X: np.ndarray, labels: np.ndarray, config: DlntConfig, seed: int) -> Tuple[MLPClassifier, float]:
    """One logistic hidden layer trained by plain stochastic gradient descent; returns (model, training accuracy)."""
    model = MLPClassifier(
        hidden_layer_sizes=(config.hidden_width,),
        activation="logistic",
        solver="sgd",
        learning_rate_init=config.learning_rate,
        momentum=0.0,
        nesterovs_momentum=False,
        max_iter=config.epochs,
        n_iter_no_change=config.epochs,
        random_state=seed,
    )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", category=ConvergenceWarning)
        model.fit(X, labels)
    return model, float(model.score(X, labels))
