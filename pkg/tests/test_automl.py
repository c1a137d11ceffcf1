import threading

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sdsn_automl.automl import (BufferSchedule, ModelSlot, NetworkState, SelectionWeights,
                                calibrate_weights, describe_state, reselect_cycle, score_batch, select,
                                stratified_split)
from sdsn_automl.datasets import Dataset, LabeledSample
from sdsn_automl.ml import ALGORITHMS, CostTimer, EvaluationResult, algorithm_index, train
from sdsn_automl.monitoring import FeatureVector

unit = st.floats(0, 1, allow_nan=False)
times = st.floats(1e-6, 1.0, allow_nan=False)


@st.composite
def batches(draw, min_size=1):
    algs = draw(st.lists(st.sampled_from(ALGORITHMS), min_size=min_size, max_size=6, unique=True))
    return [EvaluationResult(a, draw(unit), draw(times), 10) for a in algs]


def exhaustive_winner(scores):
    for s in scores:
        if all(s.total > o.total or (s.total == o.total and algorithm_index(s.algorithm) <= algorithm_index(o.algorithm))
               for o in scores):
            return s.algorithm


@given(batches(), unit, unit)
def test_select_matches_pairwise_oracle(batch, alpha, beta):
    if alpha == beta == 0:
        alpha = 1.0
    scores = score_batch(batch, SelectionWeights.uniform(alpha, beta))
    assert select(scores) == exhaustive_winner(scores)


@given(batches())
def test_speed_term_is_normalised(batch):
    scores = score_batch(batch, SelectionWeights.uniform(0.0, 1.0))
    sp = [s.speed_score for s in scores]
    assert all(0.0 <= v <= 1.0 for v in sp)
    if len({e.detection_time for e in batch}) > 1:
        assert min(sp) == 0.0 and max(sp) == 1.0
    else:
        assert sp == [1.0] * len(sp)


def test_dominant_algorithm_wins():
    batch = [EvaluationResult("knn", 0.8, 0.5, 10), EvaluationResult("naive_bayes", 0.9, 0.1, 10)]
    assert select(score_batch(batch, SelectionWeights.uniform(0.01, 0.01))) == "naive_bayes"


def test_ties_go_to_lower_index():
    batch = [EvaluationResult(a, 1.0, 0.2, 10) for a in reversed(ALGORITHMS)]
    assert select(score_batch(batch, SelectionWeights.uniform())) == "decision_tree"


def test_duplicate_and_empty_rejected():
    e = EvaluationResult("knn", 0.5, 0.1, 10)
    with pytest.raises(ValueError):
        score_batch([e, e], SelectionWeights.uniform())
    with pytest.raises(ValueError):
        select([])


@pytest.mark.parametrize("alpha, beta", [(-0.1, 0.5), (0.0, 0.0), (float("nan"), 1.0)])
def test_invalid_weights(alpha, beta):
    with pytest.raises(ValueError):
        SelectionWeights.uniform(alpha, beta)


@pytest.mark.parametrize("period, ok", [(59.9, False), (60, True), (300, True), (301, False)])
def test_buffer_bounds(period, ok):
    if ok:
        assert BufferSchedule(period).period_s == period
    else:
        with pytest.raises(ValueError):
            BufferSchedule(period)


@settings(max_examples=50)
@given(st.lists(st.integers(0, 1), min_size=4, max_size=200), st.integers(0, 1000))
def test_stratified_split_partitions(labels, seed):
    y = np.array(labels)
    tr, va = stratified_split(y, 0.7, seed)
    assert sorted(np.concatenate([tr, va]).tolist()) == list(range(len(y)))
    for c in (0, 1):
        n = int((y == c).sum())
        assert abs(int((y[tr] == c).sum()) - 0.7 * n) <= 1


def toy_dataset(n=90, seed=0):
    rng = np.random.default_rng(seed)
    samples = []
    for i in range(n):
        lab = i % 3 == 0
        rate = rng.uniform(2000, 5000) if lab else rng.uniform(1, 90)
        fv = FeatureVector(rate, rate * 500, 500.0, 10.0, 1, 5 if lab else 1)
        samples.append(LabeledSample(fv, int(lab)))
    return Dataset(samples)


def test_reselect_cycle_end_to_end():
    out = reselect_cycle(toy_dataset(), SelectionWeights.uniform(), timer=CostTimer())
    assert out.algorithm in ALGORITHMS
    assert [s.algorithm for s in out.scores] == list(ALGORITHMS)
    assert out.state == NetworkState("small", "low")
    assert select(out.scores) == out.algorithm


def test_single_label_window_keeps_incumbent():
    ds = toy_dataset()
    incumbent = reselect_cycle(ds, SelectionWeights.uniform(), timer=CostTimer())
    normal_only = ds.subset([i for i, s in enumerate(ds.samples) if s.label == 0])
    assert reselect_cycle(normal_only, SelectionWeights.uniform(), incumbent=incumbent) is incumbent


def test_describe_state_uses_medians():
    X = np.array([[50, 0, 5000, 0, 1, 1], [60, 0, 6000, 0, 1, 1], [5000, 0, 200, 0, 1, 1]], dtype=float)
    assert describe_state(X) == NetworkState("medium", "low")


def test_per_state_calibration_picks_accuracy_maximising_alpha():
    state = NetworkState("small", "fast")
    # the fast model is less accurate; only a high alpha selects the accurate one
    batch = [EvaluationResult("decision_tree", 0.80, 0.001, 10),
             EvaluationResult("random_forest", 0.95, 0.010, 10)]
    w = calibrate_weights([(state, batch)], "per_state")
    alpha = w.for_state(state).alpha["decision_tree"]
    # oracle: first grid alpha for which forest's total beats tree's
    first = next(a for a in [round(0.1 * i, 1) for i in range(1, 10)] if a * 0.95 > a * 0.80 + (1 - a))
    assert alpha == first
    assert w.for_state(NetworkState("large", "low")) == w.default
    assert calibrate_weights([(state, batch)]).per_state == {}


def test_model_slot_swaps_atomically():
    slot = ModelSlot()
    X = np.array([[0.0], [1.0]])
    models = [("decision_tree", train("decision_tree", (X, np.array([0, 1])))),
              ("naive_bayes", train("naive_bayes", (X, np.array([0, 1]))))]
    seen = []
    stop = threading.Event()

    def reader():
        while not stop.is_set():
            cur = slot.read()
            if cur is not None:
                seen.append(cur[0] == cur[1].algorithm)

    t = threading.Thread(target=reader)
    t.start()
    for i in range(2000):
        slot.swap(*models[i % 2])
    stop.set()
    t.join()
    assert slot.swaps == 2000
    assert all(seen)
