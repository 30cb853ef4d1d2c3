"""CART decision trees (Gini for classification, squared loss for regression)."""

from __future__ import annotations

import numpy as np

from .._util import canonical_row_order
from ..errors import LearnerError

_TOL = 1e-12


def _check_xy(X, y):
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise LearnerError("DIMENSION", f"X must be 2-D, got shape {X.shape}")
    y = np.asarray(y)
    if y.ndim != 1 or y.shape[0] != X.shape[0]:
        raise LearnerError("DIMENSION", f"{X.shape[0]} rows but {y.shape[0] if y.ndim else 0} labels")
    if X.shape[0] == 0:
        raise LearnerError("DIMENSION", "no training rows")
    if np.isnan(X).any():
        raise LearnerError("DIMENSION", "X contains missing values")
    return X, y


class DecisionTree:
    """Greedy top-down CART.

    Splits maximise impurity reduction; exact ties go to the lowest feature
    index, then the lowest threshold. Thresholds are midpoints between
    consecutive distinct values; rows with ``x <= threshold`` go left.
    """

    def __init__(self, task: str = "classification", max_depth: int | None = None, min_leaf: int = 1,
                 mtry: int | None = None, rng: np.random.Generator | None = None):
        if task not in ("classification", "regression"):
            raise ValueError(task)
        self.task = task
        self.max_depth = max_depth
        self.min_leaf = max(1, int(min_leaf))
        self.mtry = mtry
        self.rng = rng

    # nodes are stored in flat lists; leaves have feature == -1
    def fit(self, X, y, canonical: bool = True):
        X, y = _check_xy(X, y)
        if self.task == "classification":
            self.classes_, y_enc = np.unique(y, return_inverse=True)
            y_work = y_enc.astype(np.int64)
        else:
            self.classes_ = None
            y_work = y.astype(float)
        if canonical:
            order = canonical_row_order(X, y_work)
            X, y_work = X[order], y_work[order]
        self.n_features_ = X.shape[1]
        self.feature, self.threshold, self.left, self.right, self.value = [], [], [], [], []
        self._build(X, y_work)
        self.feature = np.array(self.feature, dtype=np.int64)
        self.threshold = np.array(self.threshold, dtype=float)
        self.left = np.array(self.left, dtype=np.int64)
        self.right = np.array(self.right, dtype=np.int64)
        self.value = np.array(self.value, dtype=float)
        return self

    def _leaf_value(self, y):
        if self.task == "classification":
            return float(np.argmax(np.bincount(y, minlength=len(self.classes_))))
        return float(np.mean(y))

    def _new_node(self, value) -> int:
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(value)
        return len(self.feature) - 1

    def _build(self, X, y):
        root = self._new_node(self._leaf_value(y))
        stack = [(root, np.arange(X.shape[0]), 0)]
        while stack:
            node, idx, depth = stack.pop()
            yi = y[idx]
            if self.max_depth is not None and depth >= self.max_depth:
                continue
            if idx.size < 2 * self.min_leaf:
                continue
            if self.task == "classification":
                if np.all(yi == yi[0]):
                    continue
            elif yi.max() == yi.min():
                continue
            split = self._best_split(X[idx], yi)
            if split is None:
                continue
            feat, thr = split
            go_left = X[idx, feat] <= thr
            li, ri = idx[go_left], idx[~go_left]
            lnode = self._new_node(self._leaf_value(y[li]))
            rnode = self._new_node(self._leaf_value(y[ri]))
            self.feature[node] = feat
            self.threshold[node] = thr
            self.left[node] = lnode
            self.right[node] = rnode
            # push right first so the left subtree is numbered first
            stack.append((rnode, ri, depth + 1))
            stack.append((lnode, li, depth + 1))

    def _candidates(self, d: int) -> np.ndarray:
        if self.mtry is None or self.mtry >= d:
            return np.arange(d)
        return np.sort(self.rng.choice(d, size=self.mtry, replace=False))

    def _best_split(self, Xn, yn):
        m = Xn.shape[0]
        feats = self._candidates(Xn.shape[1])
        Xf = Xn[:, feats]
        order = np.argsort(Xf, axis=0, kind="stable")
        xs = np.take_along_axis(Xf, order, axis=0)
        n_left = np.arange(1, m)[:, None].astype(float)
        n_right = m - n_left
        if self.task == "regression":
            ys = yn[order]
            cs = np.cumsum(ys, axis=0)
            cs2 = np.cumsum(ys * ys, axis=0)
            tot, tot2 = cs[-1], cs2[-1]
            sl, sl2 = cs[:-1], cs2[:-1]
            sr, sr2 = tot - sl, tot2 - sl2
            child = (sl2 - sl * sl / n_left) + (sr2 - sr * sr / n_right)
            parent = float(tot2[0] - tot[0] * tot[0] / m)
        else:
            k = int(yn.max()) + 1
            onehot = np.zeros((m, k))
            onehot[np.arange(m), yn] = 1.0
            counts = np.cumsum(onehot[order], axis=0)  # m x f x k
            left = counts[:-1]
            right = counts[-1][None, :, :] - left
            child = (n_left - (left ** 2).sum(axis=2) / n_left) + (n_right - (right ** 2).sum(axis=2) / n_right)
            tot = counts[-1][0]
            parent = float(m - (tot ** 2).sum() / m)
        valid = xs[:-1] < xs[1:]
        if self.min_leaf > 1:
            sizes = np.arange(1, m)[:, None]
            valid &= (sizes >= self.min_leaf) & (m - sizes >= self.min_leaf)
        if not valid.any():
            return None
        gain = np.where(valid, parent - child, -np.inf)
        # feature-major scan: lowest feature index, then lowest threshold
        g = gain.T.ravel()
        best = g.max()
        tol = _TOL * max(1.0, abs(parent))
        flat = int(np.flatnonzero(g >= best - tol)[0])
        fj, p = divmod(flat, m - 1)
        lo, hi = xs[p, fj], xs[p + 1, fj]
        thr = lo + (hi - lo) / 2.0
        if not (lo <= thr < hi):
            thr = lo
        return int(feats[fj]), float(thr)

    def apply(self, X) -> np.ndarray:
        """Leaf index for each row."""
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.n_features_:
            raise LearnerError("SCHEMA", f"expected {self.n_features_} features, got shape {X.shape}")
        node = np.zeros(X.shape[0], dtype=np.int64)
        active = self.feature[node] >= 0
        while active.any():
            rows = np.flatnonzero(active)
            nd = node[rows]
            go_left = X[rows, self.feature[nd]] <= self.threshold[nd]
            node[rows] = np.where(go_left, self.left[nd], self.right[nd])
            active = self.feature[node] >= 0
        return node

    def predict_raw(self, X) -> np.ndarray:
        """Leaf values: class indices (classification) or means (regression)."""
        return self.value[self.apply(X)]

    def predict(self, X) -> np.ndarray:
        raw = self.predict_raw(X)
        if self.task == "classification":
            return self.classes_[raw.astype(np.int64)]
        return raw

    @property
    def depth(self) -> int:
        depth = np.zeros(len(self.feature), dtype=int)
        for n in range(len(self.feature)):
            if self.feature[n] >= 0:
                depth[self.left[n]] = depth[n] + 1
                depth[self.right[n]] = depth[n] + 1
        return int(depth.max()) if len(depth) else 0

    @property
    def n_leaves(self) -> int:
        return int(np.sum(self.feature < 0))

    def to_dict(self) -> dict:
        return {
            "task": self.task,
            "max_depth": self.max_depth,
            "min_leaf": self.min_leaf,
            "n_features": self.n_features_,
            "classes": None if self.classes_ is None else self.classes_.tolist(),
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DecisionTree":
        t = cls(d["task"], d["max_depth"], d["min_leaf"])
        t.n_features_ = d["n_features"]
        t.classes_ = None if d["classes"] is None else np.array(d["classes"])
        t.feature = np.array(d["feature"], dtype=np.int64)
        t.threshold = np.array(d["threshold"], dtype=float)
        t.left = np.array(d["left"], dtype=np.int64)
        t.right = np.array(d["right"], dtype=np.int64)
        t.value = np.array(d["value"], dtype=float)
        return t


def fit_cart(X, labels, task: str = "classification", max_depth: int | None = None, min_leaf: int = 1) -> DecisionTree:
    return DecisionTree(task, max_depth=max_depth, min_leaf=min_leaf).fit(X, labels)
