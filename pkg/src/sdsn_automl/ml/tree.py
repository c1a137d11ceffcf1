"""CART decision tree (Gini) and a bagged random forest built on it."""

from __future__ import annotations

import numpy as np


class DecisionTree:
    """Binary CART classifier.

    Samples go left when ``x[feature] <= threshold``. Among equally good
    splits the lowest feature index wins, then the lowest threshold.
    """

    def __init__(self, max_depth: int = 10, min_split: int = 2, max_features: int | None = None):
        self.max_depth = max_depth
        self.min_split = min_split
        self.max_features = max_features

    def fit(self, X: np.ndarray, y: np.ndarray, rng: np.random.Generator | None = None) -> "DecisionTree":
        n, d = X.shape
        m = d if self.max_features is None else min(d, self.max_features)
        feature, threshold, left, right, value = [], [], [], [], []

        def new_node(idx):
            ones = int(y[idx].sum())
            feature.append(-1)
            threshold.append(0.0)
            left.append(-1)
            right.append(-1)
            value.append(1 if 2 * ones > len(idx) else 0)  # tie -> 0
            return len(feature) - 1, ones

        root, ones = new_node(np.arange(n))
        stack = [(root, np.arange(n), 0, ones)]
        while stack:
            node, idx, depth, ones = stack.pop()
            if depth >= self.max_depth or len(idx) < self.min_split or ones in (0, len(idx)):
                continue
            feats = range(d) if m == d else np.sort(rng.choice(d, m, replace=False))
            best = _best_split(X, y, idx, feats)
            if best is None:
                continue
            f, thr = best
            mask = X[idx, f] <= thr
            li, ri = idx[mask], idx[~mask]
            feature[node], threshold[node] = int(f), float(thr)
            ln, lones = new_node(li)
            rn, rones = new_node(ri)
            left[node], right[node] = ln, rn
            stack.append((rn, ri, depth + 1, rones))
            stack.append((ln, li, depth + 1, lones))

        self.feature_ = np.array(feature)
        self.threshold_ = np.array(threshold)
        self.left_ = np.array(left)
        self.right_ = np.array(right)
        self.value_ = np.array(value)
        return self

    @property
    def n_nodes(self) -> int:
        return len(self.feature_)

    def _descend(self, X: np.ndarray) -> tuple[np.ndarray, int]:
        node = np.zeros(len(X), dtype=int)
        visits = len(X)
        active = np.nonzero(self.feature_[node] >= 0)[0]
        while active.size:
            cur = node[active]
            go_left = X[active, self.feature_[cur]] <= self.threshold_[cur]
            node[active] = np.where(go_left, self.left_[cur], self.right_[cur])
            visits += active.size
            active = active[self.feature_[node[active]] >= 0]
        return node, visits

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.value_[self._descend(X)[0]]

    def op_count(self, X: np.ndarray) -> int:
        return self._descend(X)[1]


def _best_split(X, y, idx, feats):
    best_score, best = np.inf, None
    yi = y[idx]
    n = len(idx)
    total1 = int(yi.sum())
    for f in feats:
        x = X[idx, f]
        order = np.argsort(x, kind="stable")
        xs, ys = x[order], yi[order]
        valid = np.nonzero(xs[1:] > xs[:-1])[0]  # split after position i
        if valid.size == 0:
            continue
        cum1 = np.cumsum(ys)[valid].astype(float)
        nl = (valid + 1).astype(float)
        nr = n - nl
        l0 = nl - cum1
        r1 = total1 - cum1
        r0 = nr - r1
        # n * weighted Gini = nl - (l1^2 + l0^2)/nl + nr - (r1^2 + r0^2)/nr
        score = n - (cum1**2 + l0**2) / nl - (r1**2 + r0**2) / nr
        # scores within rounding noise count as ties, so the lowest threshold
        # (and across features the lowest index) wins them
        tol = 1e-9 * n
        j = int(np.nonzero(score <= score.min() + tol)[0][0])
        if score[j] < best_score - tol:
            best_score = score[j]
            i = valid[j]
            best = (f, (xs[i] + xs[i + 1]) / 2.0)
    return best


class RandomForest:
    """Bootstrap-aggregated CART trees with per-node feature subsampling.

    ``shared_seed`` gives every tree the same random stream, which makes all
    trees identical (handy for checking the vote against a single tree).
    """

    def __init__(self, n_trees: int = 50, max_depth: int = 10, min_split: int = 2,
                 max_features: int | str | None = "sqrt", bootstrap: bool = True,
                 shared_seed: bool = False):
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.min_split = min_split
        self.max_features = max_features
        self.bootstrap = bootstrap
        self.shared_seed = shared_seed

    def fit(self, X: np.ndarray, y: np.ndarray, rng: np.random.Generator) -> "RandomForest":
        n, d = X.shape
        mf = self.max_features
        if mf == "sqrt":
            mf = max(1, int(np.sqrt(d)))
        base = int(rng.integers(2**63))
        self.trees_ = []
        for t in range(self.n_trees):
            tree_rng = np.random.default_rng([base, 0 if self.shared_seed else t])
            idx = tree_rng.integers(0, n, n) if self.bootstrap else np.arange(n)
            tree = DecisionTree(self.max_depth, self.min_split, mf)
            self.trees_.append(tree.fit(X[idx], y[idx], tree_rng))
        return self

    def predict(self, X: np.ndarray) -> np.ndarray:
        votes = np.zeros(len(X), dtype=int)
        for tree in self.trees_:
            votes += tree.predict(X)
        return (2 * votes > len(self.trees_)).astype(int)  # tie -> 0

    def op_count(self, X: np.ndarray) -> int:
        return sum(t.op_count(X) for t in self.trees_) + len(X) * len(self.trees_)
