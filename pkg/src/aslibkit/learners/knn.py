from __future__ import annotations

import numpy as np

from .._util import canonical_row_order
from ..errors import LearnerError


class KNearestNeighbors:
    """Euclidean k-NN; distance ties go to the lower (canonical) row index."""

    def __init__(self, task="classification", k_neighbors=5):
        self.task = task
        self.k_neighbors = int(k_neighbors)

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y)
        if X.ndim != 2 or y.shape[0] != X.shape[0] or X.shape[0] == 0:
            raise LearnerError("DIMENSION", f"X {X.shape} incompatible with labels {y.shape}")
        if not 1 <= self.k_neighbors <= X.shape[0]:
            raise LearnerError("DIMENSION", f"k_neighbors={self.k_neighbors} but {X.shape[0]} rows")
        if self.task == "classification":
            self.classes_, enc = np.unique(y, return_inverse=True)
            yw = enc.astype(np.int64)
        else:
            self.classes_ = None
            yw = y.astype(float)
        order = canonical_row_order(X, yw)
        self.X_, self.y_ = X[order], yw[order]
        self.n_features_ = X.shape[1]
        return self

    def neighbors(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.n_features_:
            raise LearnerError("SCHEMA", f"expected {self.n_features_} features, got shape {X.shape}")
        d2 = ((X[:, None, :] - self.X_[None, :, :]) ** 2).sum(axis=2)
        return np.argsort(d2, axis=1, kind="stable")[:, : self.k_neighbors]

    def predict(self, X) -> np.ndarray:
        nb = self.neighbors(X)
        labels = self.y_[nb]
        if self.task == "regression":
            return labels.mean(axis=1)
        k = len(self.classes_)
        counts = np.stack([np.bincount(row, minlength=k) for row in labels])
        return self.classes_[np.argmax(counts, axis=1)]

    def to_dict(self):
        return {
            "task": self.task,
            "k_neighbors": self.k_neighbors,
            "X": self.X_.tolist(),
            "y": self.y_.tolist(),
            "classes": None if self.classes_ is None else self.classes_.tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        m = cls(d["task"], d["k_neighbors"])
        m.X_ = np.array(d["X"], dtype=float).reshape(len(d["X"]), -1)
        m.y_ = np.array(d["y"], dtype=np.int64 if d["task"] == "classification" else float)
        m.classes_ = None if d["classes"] is None else np.array(d["classes"])
        m.n_features_ = m.X_.shape[1]
        return m


def fit_knn(X, labels, k_neighbors=5, task="classification") -> KNearestNeighbors:
    return KNearestNeighbors(task, k_neighbors).fit(X, labels)
