"""Random-search hyperparameter tuning with inner cross-validation."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .._util import canonical_row_order, derive_seed

DEFAULT_BUDGET = 25
PAPER_BUDGET = 250


def sample_config(template, rng: np.random.Generator, n_features: int, n_rows: int):
    """One configuration drawn uniformly from the learner's search ranges."""
    kind = template.kind
    if kind.startswith("random_forest"):
        return template.with_params(
            ntree=int(rng.integers(10, 201)), mtry=int(rng.integers(1, min(30, n_features) + 1))
        )
    if kind.startswith("cart"):
        return template.with_params(max_depth=int(rng.integers(1, 31)), min_leaf=int(rng.integers(1, 21)))
    if kind == "knn":
        return template.with_params(k_neighbors=int(rng.integers(1, max(1, min(30, n_rows)) + 1)))
    if kind == "linear_regression":
        return template.with_params(ridge_lambda=float(10.0 ** rng.uniform(-6, 2)))
    return template


def _inner_folds(n: int, folds: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(derive_seed(seed, "inner-folds"))
    return np.arange(n)[rng.permutation(n)] % folds


def _loss(config, X, Y, fold_ids, folds) -> float:
    from . import fit_learner

    losses = []
    for f in range(folds):
        tr, te = fold_ids != f, fold_ids == f
        if not te.any() or not tr.any():
            continue
        if config.task == "classification":
            model = fit_learner(config, X[tr], Y[tr])
            losses.append(float(np.mean(model.predict(X[te]) != Y[te])))
        else:
            Yt = Y.reshape(len(Y), -1)
            errs = []
            for j in range(Yt.shape[1]):
                model = fit_learner(config, X[tr], Yt[tr, j])
                errs.append(float(np.mean((model.predict(X[te]) - Yt[te, j]) ** 2)))
            losses.append(math.fsum(errs) / len(errs))
    return math.fsum(losses) / len(losses) if losses else 0.0


def tune_random_search(template, X, labels, budget: int = DEFAULT_BUDGET, inner_folds: int = 3, seed: int = 0,
                       threads: int = 1, return_scores: bool = False):
    """Best of ``budget`` sampled configurations by inner-CV mean loss.

    Loss is the misclassification rate for classifiers and the mean squared
    error (averaged over columns of a 2-D target) for regressors. Ties go to
    the earliest sample. Learners without a search space are returned as is.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    X = np.asarray(X, dtype=float)
    Y = np.asarray(labels)
    order = canonical_row_order(X, Y.reshape(len(Y), -1)[:, 0] if Y.ndim > 1 else Y)
    X, Y = X[order], Y[order]
    n, d = X.shape
    rng = np.random.default_rng(derive_seed(seed, "random-search"))
    configs = [sample_config(template, rng, d, max(1, n - n // max(inner_folds, 2))) for _ in range(budget)]
    if template.kind == "kmeans_auto" or n < 2:
        scores = [0.0] * budget
    else:
        folds = min(inner_folds, n)
        fold_ids = _inner_folds(n, folds, seed)
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                scores = list(pool.map(lambda c: _loss(c, X, Y, fold_ids, folds), configs))
        else:
            scores = [_loss(c, X, Y, fold_ids, folds) for c in configs]
    best = int(np.argmin(scores))
    if return_scores:
        return configs[best], list(zip(configs, scores))
    return configs[best]
