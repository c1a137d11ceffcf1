import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra import numpy as hnp

from sdsn_automl.ml import ALGORITHMS, CostTimer, WallTimer, accuracy, evaluate, train
from sdsn_automl.ml.bayes import GaussianNaiveBayes
from sdsn_automl.ml.neighbors import KNearestNeighbors
from sdsn_automl.ml.tree import DecisionTree, RandomForest


def blobs(n=120, d=4, gap=4.0, seed=0):
    rng = np.random.default_rng(seed)
    y = np.arange(n) % 2
    X = rng.normal(size=(n, d)) + gap * y[:, None]
    return X, y


def gini_oracle(X, y):
    """Exhaustive best split: (feature, threshold) with the lowest weighted
    Gini, scanning features and thresholds in ascending order."""
    def gini(labels):
        if len(labels) == 0:
            return 0.0
        p = labels.mean()
        return 1 - p**2 - (1 - p) ** 2
    best = (np.inf, None)
    for f in range(X.shape[1]):
        vals = np.unique(X[:, f])
        for a, b in zip(vals, vals[1:]):
            thr = (a + b) / 2
            m = X[:, f] <= thr
            score = m.sum() * gini(y[m]) + (~m).sum() * gini(y[~m])
            if score < best[0] - 1e-9:
                best = (score, (f, thr))
    return best[1]


@settings(max_examples=100)
@given(hnp.arrays(np.int64, st.tuples(st.integers(4, 25), st.integers(1, 4)), elements=st.integers(0, 6)),
       st.data())
def test_root_split_matches_exhaustive_search(X, data):
    y = np.array(data.draw(st.lists(st.integers(0, 1), min_size=len(X), max_size=len(X))))
    X = X.astype(float)
    expected = gini_oracle(X, y)
    tree = DecisionTree(max_depth=1).fit(X, y)
    if expected is None or len(set(y)) < 2:
        assert tree.n_nodes == 1
    else:
        assert (tree.feature_[0], tree.threshold_[0]) == expected


def test_tree_fits_separable_data_and_respects_depth():
    X, y = blobs(gap=10)
    assert (DecisionTree().fit(X, y).predict(X) == y).all()
    X, y = blobs(gap=0.5, seed=3)
    t = DecisionTree(max_depth=2).fit(X, y)
    assert t.n_nodes <= 7


def test_forest_with_shared_seed_votes_like_one_tree():
    X, y = blobs(gap=1.0, seed=4)
    rf = RandomForest(n_trees=5, shared_seed=True).fit(X, y, np.random.default_rng(1))
    assert all((t.predict(X) == rf.trees_[0].predict(X)).all() for t in rf.trees_)
    assert (rf.predict(X) == rf.trees_[0].predict(X)).all()


def knn_oracle(Xtr, ytr, Xte, k):
    mu, sd = Xtr.mean(0), Xtr.std(0)
    sd[sd == 0] = 1.0
    A, B = (Xtr - mu) / sd, (Xte - mu) / sd
    out = []
    for q in B:
        d = [(float(((q - a) ** 2).sum()), i) for i, a in enumerate(A)]
        near = [i for _, i in sorted(d)[:k]]
        out.append(int(2 * ytr[near].sum() > k))
    return np.array(out)


@settings(max_examples=40)
@given(st.integers(0, 10_000), st.integers(1, 7))
def test_knn_matches_brute_force(seed, k):
    rng = np.random.default_rng(seed)
    Xtr = rng.integers(0, 4, size=(30, 3)).astype(float)
    ytr = rng.integers(0, 2, 30)
    Xte = rng.integers(0, 4, size=(10, 3)).astype(float)
    got = KNearestNeighbors(k=k).fit(Xtr, ytr).predict(Xte)
    assert (got == knn_oracle(Xtr, ytr, Xte, k)).all()


def test_naive_bayes_closed_form():
    X, y = blobs(n=40, d=2, gap=1.5, seed=2)
    nb = GaussianNaiveBayes().fit(X, y)
    q = np.array([[0.7, 0.9]])
    logp = []
    for c in (0, 1):
        Xc = X[y == c]
        mu, var = Xc.mean(0), Xc.var(0) + 1e-9
        lp = np.log(len(Xc) / len(X))
        lp += sum(-0.5 * np.log(2 * np.pi * v) - (qi - m) ** 2 / (2 * v) for qi, m, v in zip(q[0], mu, var))
        logp.append(lp)
    assert nb.predict(q)[0] == int(logp[1] > logp[0])


def test_naive_bayes_constant_feature_is_finite():
    X = np.array([[1.0, 0.0], [1.0, 1.0], [1.0, 5.0], [1.0, 6.0]])
    y = np.array([0, 0, 1, 1])
    assert (GaussianNaiveBayes().fit(X, y).predict(X) == y).all()


@pytest.mark.parametrize("algorithm", ALGORITHMS)
def test_every_algorithm_learns_blobs(algorithm):
    X, y = blobs(gap=6.0)
    m = train(algorithm, (X, y), seed=3)
    assert accuracy(y, m.predict(X)) >= 0.95
    assert m.predict(X[0]) in (0, 1)
    again = train(algorithm, (X, y), seed=3)
    assert (again.predict(X) == m.predict(X)).all()


def test_train_rejects_bad_input():
    X, y = blobs()
    with pytest.raises(ValueError):
        train("decision_tree", (X, np.zeros_like(y)))
    with pytest.raises(ValueError):
        train("boosting", (X, y))
    Xbad = X.copy()
    Xbad[0, 0] = np.nan
    with pytest.raises(ValueError):
        train("knn", (Xbad, y))
    m = train("knn", (X, y))
    with pytest.raises(ValueError):
        m.predict(X[:, :2])


@given(st.lists(st.tuples(st.integers(0, 1), st.integers(0, 1)), min_size=1, max_size=200))
def test_accuracy_is_correct_count_over_n(pairs):
    yt, yp = zip(*pairs)
    assert accuracy(yt, yp) == sum(a == b for a, b in pairs) / len(pairs)


def test_timers():
    X, y = blobs()
    m = train("decision_tree", (X, y))
    ticks = itertools.count(0, 0.25)
    r = evaluate(m, (X, y), WallTimer(lambda: next(ticks)))
    assert r.detection_time == 0.25 and r.n_test == len(y)
    r = evaluate(m, (X, y), CostTimer(1e-6))
    assert r.detection_time == pytest.approx(m.op_count(X) * 1e-6)
    with pytest.raises(ValueError):
        evaluate(m, (X, y), clock=lambda: 1.0)


def test_tree_cheaper_than_forest():
    X, y = blobs()
    dt = train("decision_tree", (X, y))
    rf = train("random_forest", (X, y))
    assert dt.op_count(X) < rf.op_count(X)
