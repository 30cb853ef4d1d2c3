from __future__ import annotations

import numpy as np

from .._util import canonical_row_order, derive_seed
from .tree import DecisionTree, _check_xy


class RandomForest:
    """Bagged, decorrelated CART ensemble.

    Each tree sees a bootstrap resample and draws ``mtry`` candidate features
    per split; trees are grown fully unless ``max_depth`` says otherwise.
    Tree ``t`` uses its own generator seeded from ``(seed, t)``.
    """

    def __init__(self, task="classification", ntree=100, mtry=None, seed=0, bootstrap=True,
                 max_depth=None, min_leaf=1):
        if int(ntree) < 1:
            raise ValueError("ntree must be >= 1")
        self.task = task
        self.ntree = int(ntree)
        self.mtry = mtry
        self.seed = int(seed)
        self.bootstrap = bootstrap
        self.max_depth = max_depth
        self.min_leaf = min_leaf

    def _default_mtry(self, d: int) -> int:
        if self.task == "classification":
            return max(1, int(np.floor(np.sqrt(d))))
        return max(1, d // 3)

    def fit(self, X, y):
        X, y = _check_xy(X, y)
        d = X.shape[1]
        mtry = self._default_mtry(d) if self.mtry is None else int(self.mtry)
        if not 1 <= mtry:
            raise ValueError("mtry must be >= 1")
        self.mtry_ = min(mtry, d)
        if self.task == "classification":
            self.classes_, y_enc = np.unique(y, return_inverse=True)
            y_work = y_enc.astype(np.int64)
        else:
            self.classes_ = None
            y_work = y.astype(float)
        order = canonical_row_order(X, y_work)
        X, y_work = X[order], y_work[order]
        n = X.shape[0]
        self.n_features_ = d
        self.trees_ = []
        for t in range(self.ntree):
            rng = np.random.default_rng(derive_seed(self.seed, "tree", t))
            rows = rng.integers(0, n, size=n) if self.bootstrap else np.arange(n)
            tree = DecisionTree(self.task, self.max_depth, self.min_leaf, mtry=self.mtry_, rng=rng)
            # class indices stay global so votes line up across trees
            tree.fit(X[rows], y_work[rows], canonical=False)
            if self.task == "classification":
                tree.value = tree.classes_[tree.value.astype(np.int64)].astype(float)
                tree.classes_ = None
            self.trees_.append(tree)
        return self

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        votes = np.stack([t.predict_raw(X) for t in self.trees_])
        if self.task == "regression":
            return votes.mean(axis=0)
        k = len(self.classes_)
        counts = np.zeros((X.shape[0], k), dtype=np.int64)
        for row in votes.astype(np.int64):
            counts[np.arange(X.shape[0]), row] += 1
        return self.classes_[np.argmax(counts, axis=1)]

    def to_dict(self) -> dict:
        return {
            "task": self.task,
            "ntree": self.ntree,
            "mtry": self.mtry_,
            "seed": self.seed,
            "bootstrap": self.bootstrap,
            "n_features": self.n_features_,
            "classes": None if self.classes_ is None else self.classes_.tolist(),
            "trees": [t.to_dict() for t in self.trees_],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RandomForest":
        f = cls(d["task"], d["ntree"], d["mtry"], d["seed"], d["bootstrap"])
        f.mtry_ = d["mtry"]
        f.n_features_ = d["n_features"]
        f.classes_ = None if d["classes"] is None else np.array(d["classes"])
        f.trees_ = [DecisionTree.from_dict(t) for t in d["trees"]]
        return f
