"""Uniform train / predict / evaluate interface over the six classifiers."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .bayes import GaussianNaiveBayes
from .linear import LinearSVM, LogisticRegression
from .neighbors import KNearestNeighbors
from .tree import DecisionTree, RandomForest

# fixed order: position + 1 is the algorithm index used by the selector
ALGORITHMS = (
    "decision_tree",
    "random_forest",
    "knn",
    "naive_bayes",
    "logistic_regression",
    "linear_svm",
)

DEFAULT_HYPERPARAMETERS: dict[str, dict[str, Any]] = {
    "decision_tree": {"max_depth": 10, "min_split": 2},
    "random_forest": {"n_trees": 50, "max_depth": 10, "min_split": 2, "max_features": "sqrt",
                      "bootstrap": True, "shared_seed": False},
    "knn": {"k": 5},
    "naive_bayes": {"var_floor": 1e-9},
    "logistic_regression": {"epochs": 500, "step": 0.1},
    "linear_svm": {"lam": 1e-3, "epochs": 500, "step": 0.1},
}

_ESTIMATORS = {
    "decision_tree": DecisionTree,
    "random_forest": RandomForest,
    "knn": KNearestNeighbors,
    "naive_bayes": GaussianNaiveBayes,
    "logistic_regression": LogisticRegression,
    "linear_svm": LinearSVM,
}


def algorithm_index(algorithm: str) -> int:
    return ALGORITHMS.index(algorithm) + 1


@dataclass(frozen=True)
class TrainedModel:
    algorithm: str
    estimator: Any = field(repr=False)
    hyperparameters: dict
    n_features: int
    trained_on: tuple | None = None

    def predict(self, X) -> np.ndarray | int:
        X = np.asarray(X, dtype=float)
        single = X.ndim == 1
        X2 = X[None, :] if single else X
        if X2.ndim != 2 or X2.shape[1] != self.n_features:
            raise ValueError(f"expected {self.n_features} features, got shape {X.shape}")
        out = self.estimator.predict(X2).astype(int)
        return int(out[0]) if single else out

    def op_count(self, X) -> int:
        return int(self.estimator.op_count(np.asarray(X, dtype=float)))


def _xy(data) -> tuple[np.ndarray, np.ndarray, tuple | None]:
    if hasattr(data, "samples"):
        return data.X, data.y, getattr(data, "provenance", None)
    X, y = data
    return np.asarray(X, dtype=float), np.asarray(y, dtype=int), None


def train(algorithm: str, train_set, hyperparameters: dict | None = None, seed: int = 0) -> TrainedModel:
    """Fit ``algorithm`` on a Dataset or an ``(X, y)`` pair; deterministic in ``seed``."""
    if algorithm not in _ESTIMATORS:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    X, y, prov = _xy(train_set)
    if X.ndim != 2 or len(X) != len(y) or len(X) == 0:
        raise ValueError("training data must be a non-empty 2-D feature matrix with one label per row")
    if not np.all(np.isfinite(X)):
        raise ValueError("training features must be finite")
    if not set(np.unique(y)) <= {0, 1}:
        raise ValueError("labels must be 0 or 1")
    if len(np.unique(y)) < 2:
        raise ValueError("training data must contain both labels")
    hp = {**DEFAULT_HYPERPARAMETERS[algorithm], **(hyperparameters or {})}
    est = _ESTIMATORS[algorithm](**hp)
    est.fit(X, y, np.random.default_rng(seed))
    return TrainedModel(algorithm, est, hp, X.shape[1], prov)


def predict(model: TrainedModel, features) -> np.ndarray | int:
    return model.predict(features)


# -- evaluation ---------------------------------------------------------------

@dataclass(frozen=True)
class EvaluationResult:
    algorithm: str
    accuracy: float
    detection_time: float  # seconds
    n_test: int

    def __post_init__(self):
        if not 0.0 <= self.accuracy <= 1.0:
            raise ValueError("accuracy must lie in [0, 1]")
        if not self.detection_time > 0 or not np.isfinite(self.detection_time):
            raise ValueError("detection time must be positive and finite")
        if self.n_test < 1:
            raise ValueError("n_test must be >= 1")


def accuracy(y_true: Sequence[int], y_pred: Sequence[int]) -> float:
    """Fraction of positions where prediction equals truth."""
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if y_true.shape != y_pred.shape or y_true.size == 0:
        raise ValueError("need equal-length, non-empty label vectors")
    return int(np.count_nonzero(y_true == y_pred)) / y_true.size


class WallTimer:
    """Times the predict pass with a clock returning seconds."""

    def __init__(self, clock: Callable[[], float] = time.perf_counter):
        self.clock = clock

    def measure(self, model: TrainedModel, X: np.ndarray) -> tuple[np.ndarray, float]:
        start = self.clock()
        pred = model.predict(X)
        return pred, self.clock() - start


class CostTimer:
    """Deterministic stand-in for wall time: the predict pass is charged
    ``seconds_per_op`` per elementary operation the model performs."""

    def __init__(self, seconds_per_op: float = 1e-8):
        self.seconds_per_op = seconds_per_op

    def measure(self, model: TrainedModel, X: np.ndarray) -> tuple[np.ndarray, float]:
        pred = model.predict(X)
        return pred, model.op_count(X) * self.seconds_per_op


def evaluate(model: TrainedModel, test_set, timer: WallTimer | CostTimer | None = None,
             clock: Callable[[], float] | None = None) -> EvaluationResult:
    X, y, _ = _xy(test_set)
    if len(y) == 0:
        raise ValueError("test set is empty")
    if timer is None:
        timer = WallTimer(clock) if clock is not None else WallTimer()
    pred, elapsed = timer.measure(model, X)
    if not elapsed > 0:
        raise ValueError(f"timer reported non-positive detection time {elapsed!r}")
    return EvaluationResult(model.algorithm, accuracy(y, pred), float(elapsed), len(y))
