"""Logistic regression and a linear SVM, both trained by full-batch
(sub)gradient descent on standardized features."""

from __future__ import annotations

import numpy as np

from .scaling import Standardizer


class LogisticRegression:
    def __init__(self, epochs: int = 500, step: float = 0.1):
        self.epochs = epochs
        self.step = step

    def fit(self, X, y, rng=None):
        self.scaler_ = Standardizer().fit(X)
        Z = self.scaler_.transform(X)
        n, d = Z.shape
        w, b = np.zeros(d), 0.0
        for _ in range(self.epochs):
            p = _sigmoid(Z @ w + b)
            g = p - y
            w -= self.step * (Z.T @ g) / n
            b -= self.step * g.mean()
        self.w_, self.b_ = w, b
        return self

    def predict_proba(self, X):
        return _sigmoid(self.scaler_.transform(X) @ self.w_ + self.b_)

    def predict(self, X):
        return (self.predict_proba(X) > 0.5).astype(int)

    def op_count(self, X):
        n, d = X.shape
        return n * (3 * d + 2)


class LinearSVM:
    """Minimizes lam/2 |w|^2 + mean(hinge) with step ``step / sqrt(epoch)``."""

    def __init__(self, lam: float = 1e-3, epochs: int = 500, step: float = 0.1):
        self.lam = lam
        self.epochs = epochs
        self.step = step

    def fit(self, X, y, rng=None):
        self.scaler_ = Standardizer().fit(X)
        Z = self.scaler_.transform(X)
        s = 2.0 * y - 1.0
        n, d = Z.shape
        w, b = np.zeros(d), 0.0
        for epoch in range(1, self.epochs + 1):
            active = s * (Z @ w + b) < 1.0
            gw = self.lam * w - (Z[active].T @ s[active]) / n
            gb = -s[active].sum() / n
            eta = self.step / np.sqrt(epoch)
            w -= eta * gw
            b -= eta * gb
        self.w_, self.b_ = w, b
        return self

    def decision_function(self, X):
        return self.scaler_.transform(X) @ self.w_ + self.b_

    def predict(self, X):
        return (self.decision_function(X) > 0).astype(int)

    def op_count(self, X):
        n, d = X.shape
        return n * (3 * d + 1)


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))
