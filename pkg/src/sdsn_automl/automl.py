"""Network-aware model selection.

Every algorithm is trained and evaluated on the data gathered during a
buffer period; each gets ``total = alpha * accuracy + beta * speed`` where
speed is its detection time normalized over the batch so that the fastest
candidate scores 1 and the slowest 0. The highest total wins, ties going to
the lower algorithm index.
"""

from __future__ import annotations

import logging
import math
import threading
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .datasets import Dataset
from .ml import ALGORITHMS, EvaluationResult, TrainedModel, WallTimer, algorithm_index, evaluate, train
from .traffic import PAYLOAD_CLASSES, SPEED_CLASSES, classify

log = logging.getLogger(__name__)

DEFAULT_ALPHA = 0.7
DEFAULT_BETA = 0.3
WEIGHT_GRID = tuple(round(0.1 * i, 1) for i in range(1, 10))


@dataclass(frozen=True)
class SelectionWeights:
    alpha: dict[str, float]
    beta: dict[str, float]

    def __post_init__(self):
        for a in ALGORITHMS:
            if a not in self.alpha or a not in self.beta:
                raise ValueError(f"missing weights for {a}")
            al, be = self.alpha[a], self.beta[a]
            if not (math.isfinite(al) and math.isfinite(be)) or al < 0 or be < 0:
                raise ValueError(f"weights for {a} must be finite and non-negative")
            if al == 0 and be == 0:
                raise ValueError(f"alpha and beta for {a} cannot both be zero")

    @classmethod
    def uniform(cls, alpha: float = DEFAULT_ALPHA, beta: float = DEFAULT_BETA) -> "SelectionWeights":
        return cls({a: alpha for a in ALGORITHMS}, {a: beta for a in ALGORITHMS})

    def pair(self, algorithm: str) -> tuple[float, float]:
        return self.alpha[algorithm], self.beta[algorithm]


@dataclass(frozen=True)
class ModelScore:
    algorithm: str
    accuracy: float
    detection_time: float
    speed_score: float
    total: float


@dataclass(frozen=True)
class BufferSchedule:
    period_s: float = 120.0

    def __post_init__(self):
        if not 60.0 <= self.period_s <= 300.0:
            raise ValueError(f"buffer period must be within [60, 300] s, got {self.period_s}")


def score_batch(evals: Sequence[EvaluationResult], weights: SelectionWeights) -> list[ModelScore]:
    if not evals:
        raise ValueError("nothing to score")
    seen = set()
    for e in evals:
        if e.algorithm in seen:
            raise ValueError(f"duplicate evaluation for {e.algorithm}")
        seen.add(e.algorithm)
    bmin = min(e.detection_time for e in evals)
    bmax = max(e.detection_time for e in evals)
    out = []
    for e in evals:
        speed = 1.0 if bmax == bmin else (bmax - e.detection_time) / (bmax - bmin)
        alpha, beta = weights.pair(e.algorithm)
        out.append(ModelScore(e.algorithm, e.accuracy, e.detection_time, speed,
                              alpha * e.accuracy + beta * speed))
    return out


def select(scores: Sequence[ModelScore]) -> str:
    if not scores:
        raise ValueError("nothing to select from")
    best = max(s.total for s in scores)
    return min((s.algorithm for s in scores if s.total == best), key=algorithm_index)


def stratified_split(y: np.ndarray, train_frac: float = 0.7, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(seed)
    tr, va = [], []
    for c in (0, 1):
        idx = np.nonzero(y == c)[0]
        idx = idx[rng.permutation(len(idx))]
        k = int(round(train_frac * len(idx)))
        k = min(max(k, 1), len(idx) - 1) if len(idx) > 1 else len(idx)
        tr.append(idx[:k])
        va.append(idx[k:])
    return np.sort(np.concatenate(tr)), np.sort(np.concatenate(va))


class NetworkState(NamedTuple):
    payload_class: str
    speed_class: str


def describe_state(X: np.ndarray) -> NetworkState:
    """Payload and speed class of the typical flow in a batch of feature rows."""
    X = np.asarray(X, dtype=float)
    return NetworkState(classify(float(np.median(X[:, 2])), PAYLOAD_CLASSES),
                        classify(float(np.median(X[:, 0])), SPEED_CLASSES))


@dataclass
class SelectionOutcome:
    algorithm: str
    model: TrainedModel
    scores: list[ModelScore]
    evaluations: list[EvaluationResult]
    state: NetworkState | None = None

    def __iter__(self):
        return iter((self.algorithm, self.model))


def reselect_cycle(window_data: Dataset, weights: SelectionWeights, *, seed: int = 0,
                   hyperparameters: dict[str, dict] | None = None, timer=None,
                   incumbent: SelectionOutcome | None = None,
                   algorithms: Iterable[str] = ALGORITHMS) -> SelectionOutcome | None:
    """Split 70/30 (stratified), train and evaluate every algorithm, pick the
    winner. Single-label windows keep the incumbent."""
    y = window_data.y
    if len(np.unique(y)) < 2:
        log.warning("buffer window has a single label (%d samples); keeping incumbent", len(y))
        return incumbent
    X = window_data.X
    tr, va = stratified_split(y, 0.7, seed)
    timer = timer or WallTimer()
    hyper = hyperparameters or {}
    models, evals = {}, []
    for a in algorithms:
        models[a] = train(a, (X[tr], y[tr]), hyper.get(a), seed)
        evals.append(evaluate(models[a], (X[va], y[va]), timer))
    scores = score_batch(evals, weights)
    winner = select(scores)
    return SelectionOutcome(winner, models[winner], scores, evals, describe_state(X))


@dataclass
class StateWeights:
    """Global weights plus optional per-network-state overrides."""

    default: SelectionWeights = field(default_factory=SelectionWeights.uniform)
    per_state: dict[NetworkState, SelectionWeights] = field(default_factory=dict)

    def for_state(self, state: NetworkState | None) -> SelectionWeights:
        return self.per_state.get(state, self.default) if state is not None else self.default


def calibrate_weights(history: Sequence[tuple[NetworkState, Sequence[EvaluationResult]]],
                      strategy: str = "global", grid: Sequence[float] = WEIGHT_GRID,
                      default: tuple[float, float] = (DEFAULT_ALPHA, DEFAULT_BETA)) -> StateWeights:
    """``global``: one (alpha, beta) pair for everything. ``per_state``: for
    each observed state, the pair (alpha, 1 - alpha), alpha from ``grid``,
    whose induced winners have the highest mean validation accuracy over that
    state's batches; the first grid point wins ties."""
    if not history:
        raise ValueError("calibration history is empty")
    base = StateWeights(SelectionWeights.uniform(*default))
    if strategy == "global":
        return base
    if strategy != "per_state":
        raise ValueError(f"unknown calibration strategy {strategy!r}")
    by_state: dict[NetworkState, list[Sequence[EvaluationResult]]] = {}
    for state, batch in history:
        if batch:
            by_state.setdefault(NetworkState(*state), []).append(batch)
    for state in sorted(by_state):
        best_pair, best_acc = None, -1.0
        for alpha in grid:
            w = SelectionWeights.uniform(alpha, round(1.0 - alpha, 10))
            accs = []
            for batch in by_state[state]:
                winner = select(score_batch(batch, w))
                accs.append(next(e.accuracy for e in batch if e.algorithm == winner))
            mean = sum(accs) / len(accs)
            if mean > best_acc:
                best_pair, best_acc = w, mean
        base.per_state[state] = best_pair
    return base


class ModelSlot:
    """The live detector. Readers get an immutable (algorithm, model) pair;
    a swap replaces it atomically."""

    def __init__(self):
        self._lock = threading.Lock()
        self._current: tuple[str, TrainedModel] | None = None
        self.swaps = 0

    def read(self) -> tuple[str, TrainedModel] | None:
        return self._current

    def swap(self, algorithm: str, model: TrainedModel) -> None:
        with self._lock:
            self._current = (algorithm, model)
            self.swaps += 1
