from __future__ import annotations

import numpy as np

from ..errors import LearnerError


class LinearRegression:
    """Least squares ``y = X @ coef + intercept``.

    A rank-deficient design is solved with ``ridge_lambda`` added to the
    diagonal of the normal equations (intercept unpenalised); with
    ``ridge_lambda == 0`` the minimum-norm least-squares solution is used.
    """

    def __init__(self, ridge_lambda: float = 1e-6):
        if ridge_lambda < 0:
            raise ValueError("ridge_lambda must be >= 0")
        self.ridge_lambda = float(ridge_lambda)

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0] or X.shape[0] < 1:
            raise LearnerError("DIMENSION", f"X {X.shape} incompatible with y {y.shape}")
        n, d = X.shape
        A = np.hstack([X, np.ones((n, 1))])
        self.regularized_ = False
        if np.linalg.matrix_rank(A) == d + 1:
            beta, *_ = np.linalg.lstsq(A, y, rcond=None)
        elif self.ridge_lambda > 0:
            penalty = np.eye(d + 1) * self.ridge_lambda
            penalty[d, d] = 0.0
            beta = np.linalg.solve(A.T @ A + penalty, A.T @ y)
            self.regularized_ = True
        else:
            beta, *_ = np.linalg.lstsq(A, y, rcond=None)
        self.coef_ = beta[:d]
        self.intercept_ = float(beta[d])
        self.n_features_ = d
        return self

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.n_features_:
            raise LearnerError("SCHEMA", f"expected {self.n_features_} features, got shape {X.shape}")
        return X @ self.coef_ + self.intercept_

    def to_dict(self) -> dict:
        return {"ridge_lambda": self.ridge_lambda, "coef": self.coef_.tolist(), "intercept": self.intercept_}

    @classmethod
    def from_dict(cls, d):
        m = cls(d["ridge_lambda"])
        m.coef_ = np.array(d["coef"], dtype=float)
        m.intercept_ = float(d["intercept"])
        m.n_features_ = len(m.coef_)
        return m


def fit_linear_regression(X, y, ridge_lambda: float = 1e-6) -> LinearRegression:
    return LinearRegression(ridge_lambda).fit(X, y)
