"""From-scratch learners behind the selectors."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any, Mapping

import numpy as np

from ..errors import LearnerError
from .forest import RandomForest
from .kmeans import Clustering, kmeans_auto, lloyd
from .knn import KNearestNeighbors, fit_knn
from .linear import LinearRegression, fit_linear_regression
from .tree import DecisionTree, fit_cart

KINDS = (
    "linear_regression",
    "cart_classification",
    "cart_regression",
    "random_forest_classification",
    "random_forest_regression",
    "knn",
    "kmeans_auto",
)

_ALLOWED = {
    "linear_regression": {"ridge_lambda"},
    "cart_classification": {"max_depth", "min_leaf"},
    "cart_regression": {"max_depth", "min_leaf"},
    "random_forest_classification": {"ntree", "mtry", "max_depth", "min_leaf", "bootstrap"},
    "random_forest_regression": {"ntree", "mtry", "max_depth", "min_leaf", "bootstrap"},
    "knn": {"k_neighbors", "task"},
    "kmeans_auto": {"max_clusters", "n_init"},
}


@dataclass(frozen=True)
class LearnerConfig:
    kind: str
    hyperparameters: Mapping[str, Any] = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise LearnerError("CONFIG", f"unknown learner kind {self.kind!r}")
        hp = dict(self.hyperparameters)
        unknown = set(hp) - _ALLOWED[self.kind]
        if unknown:
            raise LearnerError("CONFIG", f"{self.kind} does not take {sorted(unknown)}")
        checks = {
            "ntree": lambda v: int(v) >= 1,
            "mtry": lambda v: v is None or int(v) >= 1,
            "min_leaf": lambda v: int(v) >= 1,
            "max_depth": lambda v: v is None or int(v) >= 0,
            "k_neighbors": lambda v: int(v) >= 1,
            "max_clusters": lambda v: 1 <= int(v) <= 30,
            "ridge_lambda": lambda v: float(v) >= 0,
            "n_init": lambda v: int(v) >= 1,
            "task": lambda v: v in ("classification", "regression"),
            "bootstrap": lambda v: isinstance(v, bool),
        }
        for key, value in hp.items():
            if not checks[key](value):
                raise LearnerError("CONFIG", f"{key}={value!r} out of range for {self.kind}")
        object.__setattr__(self, "hyperparameters", hp)

    @property
    def task(self) -> str:
        if self.kind == "kmeans_auto":
            return "clustering"
        if self.kind == "knn":
            return self.hyperparameters.get("task", "classification")
        return "regression" if self.kind.endswith("regression") else "classification"

    def with_params(self, **params) -> "LearnerConfig":
        return replace(self, hyperparameters={**self.hyperparameters, **params})

    def to_dict(self) -> dict:
        return {"kind": self.kind, "hyperparameters": dict(sorted(self.hyperparameters.items())), "seed": self.seed}

    @classmethod
    def from_dict(cls, d) -> "LearnerConfig":
        return cls(d["kind"], dict(d.get("hyperparameters", {})), int(d.get("seed", 0)))


def fit_random_forest(X, labels, config: LearnerConfig):
    hp = config.hyperparameters
    task = "regression" if config.kind == "random_forest_regression" else "classification"
    return RandomForest(
        task,
        ntree=hp.get("ntree", 100),
        mtry=hp.get("mtry"),
        seed=config.seed,
        bootstrap=hp.get("bootstrap", True),
        max_depth=hp.get("max_depth"),
        min_leaf=hp.get("min_leaf", 1),
    ).fit(X, labels)


def fit_learner(config: LearnerConfig, X, y=None):
    """Fit the learner described by ``config``; ``y`` is ignored for k-means."""
    hp = config.hyperparameters
    kind = config.kind
    if kind == "kmeans_auto":
        return kmeans_auto(X, hp.get("max_clusters", 30), seed=config.seed, n_init=hp.get("n_init", 1))
    if kind == "linear_regression":
        return fit_linear_regression(X, y, hp.get("ridge_lambda", 1e-6))
    if kind in ("cart_classification", "cart_regression"):
        return fit_cart(X, y, config.task, hp.get("max_depth"), hp.get("min_leaf", 1))
    if kind.startswith("random_forest"):
        return fit_random_forest(X, y, config)
    return fit_knn(X, y, min(int(hp.get("k_neighbors", 5)), np.asarray(X).shape[0]), config.task)


_MODEL_TYPES = {
    "linear": LinearRegression,
    "tree": DecisionTree,
    "forest": RandomForest,
    "knn": KNearestNeighbors,
    "kmeans": Clustering,
}


def model_to_dict(model) -> dict:
    for tag, cls in _MODEL_TYPES.items():
        if isinstance(model, cls):
            return {"type": tag, "state": model.to_dict()}
    raise LearnerError("CONFIG", f"cannot serialise {type(model).__name__}")


def model_from_dict(d: dict):
    try:
        cls = _MODEL_TYPES[d["type"]]
    except KeyError:
        raise LearnerError("CONFIG", f"unknown model type {d.get('type')!r}") from None
    return cls.from_dict(d["state"])


from .tuning import tune_random_search  # noqa: E402

__all__ = [
    "KINDS",
    "Clustering",
    "DecisionTree",
    "KNearestNeighbors",
    "LearnerConfig",
    "LinearRegression",
    "RandomForest",
    "fit_cart",
    "fit_knn",
    "fit_learner",
    "fit_linear_regression",
    "fit_random_forest",
    "kmeans_auto",
    "lloyd",
    "model_from_dict",
    "model_to_dict",
    "tune_random_search",
]
