"""Selection strategies: classification, regression and clustering selectors.

Two reference selectors are included for testing the evaluation pipeline:
``sbs_constant`` always emits the training single best solver, and
``oracle_cheat`` reads the true best algorithm of each test instance.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Any, Sequence

import numpy as np

from ._util import derive_seed, lex_argmin
from .errors import AslibError, PreprocessError, SelectorError
from .evaluation import ScheduleEntry, SelectionOutput, sbs_algorithm
from .learners import LearnerConfig, fit_learner, model_from_dict, model_to_dict, tune_random_search
from .learners.tuning import DEFAULT_BUDGET
from .preprocess import FeaturePreprocessor, PreparedData

APPROACHES = ("classification", "regression", "clustering", "sbs_constant", "oracle_cheat")
MODEL_FORMAT = "aslibkit-selector/1"

_LEARNER_ALIASES = {
    "random_forest": "random_forest",
    "rf": "random_forest",
    "forest": "random_forest",
    "cart": "cart",
    "tree": "cart",
    "rpart": "cart",
    "linear_regression": "linear_regression",
    "linear": "linear_regression",
    "lm": "linear_regression",
    "knn": "knn",
    "kmeans": "kmeans_auto",
    "kmeans_auto": "kmeans_auto",
    "xmeans": "kmeans_auto",
}

_DEFAULT_LEARNER = {"classification": "random_forest", "regression": "random_forest", "clustering": "kmeans_auto"}

_SPEC_KEYS = {"approach", "learner", "steps", "features", "tune", "tune_budget", "seed", "variance_threshold"}
_HP_KEYS = {"ntree", "mtry", "max_depth", "min_leaf", "k_neighbors", "max_clusters", "ridge_lambda", "n_init", "bootstrap"}


def learner_kind(approach: str, learner: str) -> str:
    """Map a short learner name to the concrete kind for an approach."""
    base = _LEARNER_ALIASES.get(learner)
    if base is None:
        raise SelectorError("SPEC", f"unknown learner {learner!r}")
    if approach == "clustering":
        if base != "kmeans_auto":
            raise SelectorError("SPEC", "the clustering approach uses learner=kmeans")
        return base
    if base == "kmeans_auto":
        raise SelectorError("SPEC", f"kmeans cannot drive the {approach} approach")
    if base == "linear_regression":
        if approach != "regression":
            raise SelectorError("SPEC", "linear_regression only supports the regression approach")
        return base
    if base == "knn":
        return "knn"
    return f"{base}_{approach}"


@dataclass(frozen=True)
class SelectorSpec:
    approach: str
    learner: LearnerConfig | None = None
    steps_used: tuple[str, ...] | None = None
    features_used: tuple[str, ...] | None = None
    tune: bool = False
    tune_budget: int = DEFAULT_BUDGET
    seed: int = 0
    variance_threshold: float = 0.0

    def __post_init__(self):
        if self.approach not in APPROACHES:
            raise SelectorError("SPEC", f"unknown approach {self.approach!r}")
        if self.approach in _DEFAULT_LEARNER and self.learner is None:
            kind = learner_kind(self.approach, _DEFAULT_LEARNER[self.approach])
            object.__setattr__(self, "learner", LearnerConfig(kind, seed=self.seed))
        if self.steps_used is not None:
            object.__setattr__(self, "steps_used", tuple(self.steps_used))
        if self.features_used is not None:
            object.__setattr__(self, "features_used", tuple(self.features_used))
        if self.tune_budget < 1:
            raise SelectorError("SPEC", "tune_budget must be >= 1")

    def to_dict(self) -> dict:
        return {
            "approach": self.approach,
            "learner": None if self.learner is None else self.learner.to_dict(),
            "steps_used": None if self.steps_used is None else list(self.steps_used),
            "features_used": None if self.features_used is None else list(self.features_used),
            "tune": self.tune,
            "tune_budget": self.tune_budget,
            "seed": self.seed,
            "variance_threshold": self.variance_threshold,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SelectorSpec":
        learner = d.get("learner")
        if isinstance(learner, dict):
            learner = LearnerConfig.from_dict(learner)
        return cls(
            approach=d["approach"],
            learner=learner,
            steps_used=d.get("steps_used"),
            features_used=d.get("features_used"),
            tune=bool(d.get("tune", False)),
            tune_budget=int(d.get("tune_budget", DEFAULT_BUDGET)),
            seed=int(d.get("seed", 0)),
            variance_threshold=float(d.get("variance_threshold", 0.0)),
        )


def _coerce(value: str):
    v = value.strip()
    low = v.lower()
    if low in ("true", "yes"):
        return True
    if low in ("false", "no"):
        return False
    if low in ("none", "null"):
        return None
    try:
        return int(v)
    except ValueError:
        pass
    try:
        return float(v)
    except ValueError:
        return v


def _split_list(value) -> tuple[str, ...]:
    if isinstance(value, (list, tuple)):
        return tuple(str(v) for v in value)
    parts = [p.strip() for p in str(value).replace("|", ";").replace("+", ";").split(";")]
    return tuple(p for p in parts if p)


def parse_selector_spec(text: str | dict) -> SelectorSpec:
    """Parse ``approach=regression, learner=random_forest, ntree=50, seed=42`` or a JSON object.

    Hyperparameter keys go to the learner. ``steps`` and ``features`` take
    ``;``-separated names (``|`` and ``+`` work too).
    """
    if isinstance(text, dict):
        items = dict(text)
    else:
        s = text.strip()
        if s.startswith("{"):
            try:
                items = json.loads(s)
            except json.JSONDecodeError as exc:
                raise SelectorError("SPEC", f"bad JSON selector spec: {exc}") from None
        else:
            items = {}
            for part in s.split(","):
                if not part.strip():
                    continue
                if "=" not in part:
                    raise SelectorError("SPEC", f"expected key=value, got {part.strip()!r}")
                key, value = part.split("=", 1)
                key = key.strip()
                if key in items:
                    raise SelectorError("SPEC", f"duplicate key {key!r}")
                items[key] = _coerce(value)
    # the serialised form written by SelectorSpec.to_dict
    if isinstance(items.get("learner"), dict) or "steps_used" in items or "features_used" in items:
        try:
            return SelectorSpec.from_dict(items)
        except (KeyError, TypeError, ValueError, AslibError) as exc:
            raise SelectorError("SPEC", f"bad serialised selector spec: {exc}") from None
    unknown = set(items) - _SPEC_KEYS - _HP_KEYS
    if unknown:
        raise SelectorError("SPEC", f"unknown selector keys {sorted(unknown)}")
    if "approach" not in items:
        raise SelectorError("SPEC", "selector spec needs approach=...")
    approach = str(items["approach"])
    if approach not in APPROACHES:
        raise SelectorError("SPEC", f"unknown approach {approach!r}")
    seed = int(items.get("seed", 0))
    hp = {k: v for k, v in items.items() if k in _HP_KEYS}
    learner = None
    if approach in _DEFAULT_LEARNER:
        name = items.get("learner", _DEFAULT_LEARNER[approach])
        kind = learner_kind(approach, str(name))
        if kind == "knn":
            hp["task"] = approach
        try:
            learner = LearnerConfig(kind, hp, seed)
        except AslibError as exc:
            raise SelectorError("SPEC", exc.message) from None
    elif hp or "learner" in items:
        raise SelectorError("SPEC", f"{approach} takes no learner")
    return SelectorSpec(
        approach=approach,
        learner=learner,
        steps_used=_split_list(items["steps"]) if items.get("steps") is not None else None,
        features_used=_split_list(items["features"]) if items.get("features") is not None else None,
        tune=bool(items.get("tune", False)),
        tune_budget=int(items.get("tune_budget", DEFAULT_BUDGET)),
        seed=seed,
        variance_threshold=float(items.get("variance_threshold", 0.0)),
    )


@dataclass(frozen=True, eq=False)
class SelectorModel:
    """A trained mapping from feature vectors to algorithms."""

    spec: SelectorSpec
    algorithms: tuple[str, ...]
    feature_names: tuple[str, ...]
    cutoff: float
    mode: str  # classification | regression | clustering | constant | oracle
    preprocessor: FeaturePreprocessor | None = None
    models: tuple[Any, ...] = ()
    cluster_algorithms: tuple[str, ...] = ()
    constant: str | None = None
    oracle: dict | None = field(default=None, repr=False)
    learner: LearnerConfig | None = None
    notes: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "format": MODEL_FORMAT,
            "spec": self.spec.to_dict(),
            "algorithms": list(self.algorithms),
            "feature_names": list(self.feature_names),
            "cutoff": self.cutoff,
            "mode": self.mode,
            "preprocessor": None if self.preprocessor is None else self.preprocessor.to_dict(),
            "models": [model_to_dict(m) for m in self.models],
            "cluster_algorithms": list(self.cluster_algorithms),
            "constant": self.constant,
            "oracle": self.oracle,
            "learner": None if self.learner is None else self.learner.to_dict(),
            "notes": list(self.notes),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SelectorModel":
        if d.get("format") != MODEL_FORMAT:
            raise SelectorError("FORMAT", f"unsupported model format {d.get('format')!r}")
        return cls(
            spec=SelectorSpec.from_dict(d["spec"]),
            algorithms=tuple(d["algorithms"]),
            feature_names=tuple(d["feature_names"]),
            cutoff=float(d["cutoff"]),
            mode=d["mode"],
            preprocessor=None if d["preprocessor"] is None else FeaturePreprocessor.from_dict(d["preprocessor"]),
            models=tuple(model_from_dict(m) for m in d["models"]),
            cluster_algorithms=tuple(d["cluster_algorithms"]),
            constant=d["constant"],
            oracle=d["oracle"],
            learner=None if d["learner"] is None else LearnerConfig.from_dict(d["learner"]),
            notes=tuple(d.get("notes", ())),
        )

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "SelectorModel":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def _constant_model(prepared: PreparedData, spec, k, note=None) -> SelectorModel:
    alg = sbs_algorithm(prepared, k) if prepared.n_instances else prepared.algorithms[0]
    return SelectorModel(
        spec, prepared.algorithms, prepared.feature_names, prepared.cutoff, "constant", constant=alg,
        notes=(note,) if note else (),
    )


def train_selector(
    prepared_train: PreparedData,
    spec: SelectorSpec | str,
    k: float = 10.0,
    seed: int | None = None,
    leak: PreparedData | None = None,
) -> SelectorModel:
    """Fit a selector on training data.

    Presolved training instances are left out of supervised fitting. Targets
    are the cost-adjusted labels with unsolved cells charged ``k * cutoff``.
    ``leak`` is only read by the ``oracle_cheat`` selector.
    """
    if isinstance(spec, str):
        spec = parse_selector_spec(spec)
    p = prepared_train
    if p.n_instances == 0:
        raise SelectorError("EMPTY_TRAIN", "no training instances")
    seed = spec.seed if seed is None else seed
    if spec.approach == "sbs_constant":
        return _constant_model(p, spec, k)
    if spec.approach == "oracle_cheat":
        src = leak if leak is not None else p
        oracle = dict(zip(src.instances, src.vbs_choice(k)))
        return SelectorModel(spec, p.algorithms, p.feature_names, p.cutoff, "oracle", oracle=oracle,
                             constant=sbs_algorithm(p, k))

    rows = np.flatnonzero(~p.presolved)
    if rows.size == 0:
        note = "every training instance is presolved; using the training SBS"
        warnings.warn(note, RuntimeWarning, stacklevel=2)
        return _constant_model(p, spec, k, note)
    try:
        pre = FeaturePreprocessor.fit(
            p.raw_features[rows], p.feature_names, normalize=spec.approach == "clustering" or spec.learner.kind == "knn",
            variance_threshold=spec.variance_threshold,
        )
    except PreprocessError as exc:
        note = f"{exc.message}; using the training SBS"
        warnings.warn(note, RuntimeWarning, stacklevel=2)
        return _constant_model(p, spec, k, note)
    X = pre.transform(p.raw_features[rows])
    Y = p.penalized_labels(k)[rows]
    cfg = replace(spec.learner, seed=derive_seed(seed, "learner"))
    common = dict(spec=spec, algorithms=p.algorithms, feature_names=p.feature_names, cutoff=p.cutoff, preprocessor=pre)

    if spec.approach == "classification":
        y = np.atleast_1d(lex_argmin(Y, p.algorithms))
        if np.unique(y).size == 1:
            note = f"SINGLE_CLASS: every training instance prefers {p.algorithms[int(y[0])]!r}"
            warnings.warn(note, RuntimeWarning, stacklevel=2)
            return SelectorModel(mode="constant", constant=p.algorithms[int(y[0])], notes=(note,), **common)
        if spec.tune:
            cfg = tune_random_search(cfg, X, y, spec.tune_budget, 3, derive_seed(seed, "tune"))
        model = fit_learner(cfg, X, y)
        return SelectorModel(mode="classification", models=(model,), learner=cfg, **common)

    if spec.approach == "regression":
        if spec.tune:
            cfg = tune_random_search(cfg, X, Y, spec.tune_budget, 3, derive_seed(seed, "tune"))
        models = tuple(
            fit_learner(replace(cfg, seed=derive_seed(cfg.seed, "algorithm", a)), X, Y[:, j])
            for j, a in enumerate(p.algorithms)
        )
        return SelectorModel(mode="regression", models=models, learner=cfg, **common)

    # clustering: each cluster runs the algorithm with the lowest total PAR-k
    clustering = fit_learner(cfg, X)
    fallback = sbs_algorithm(p.subset(rows), k)
    owners = []
    for c in range(clustering.chosen_k):
        members = clustering.assignments == c
        if not members.any():
            owners.append(fallback)
            continue
        totals = np.array([math.fsum(Y[members, j]) for j in range(Y.shape[1])])
        owners.append(p.algorithms[lex_argmin(totals, p.algorithms)])
    return SelectorModel(mode="clustering", models=(clustering,), cluster_algorithms=tuple(owners), learner=cfg, **common)


def _choose(model: SelectorModel, raw: np.ndarray, instances: Sequence[str] | None) -> list[str]:
    n = raw.shape[0]
    if model.mode == "constant":
        return [model.constant] * n
    if model.mode == "oracle":
        if instances is None:
            raise SelectorError("SCHEMA", "the oracle selector needs instance ids")
        return [model.oracle.get(i, model.constant) for i in instances]
    if raw.ndim != 2 or raw.shape[1] != len(model.feature_names):
        raise SelectorError("SCHEMA", f"expected {len(model.feature_names)} features, got shape {raw.shape}")
    X = model.preprocessor.transform(raw)
    if model.mode == "classification":
        idx = model.models[0].predict(X).astype(int)
        return [model.algorithms[j] for j in idx]
    if model.mode == "regression":
        preds = np.column_stack([m.predict(X) for m in model.models])
        idx = np.atleast_1d(lex_argmin(preds, model.algorithms))
        return [model.algorithms[j] for j in idx]
    cl = model.models[0].predict(X)
    return [model.cluster_algorithms[c] for c in cl]


def select(model: SelectorModel, features, instance_id: str | None = None) -> tuple[ScheduleEntry, ...]:
    """Schedule for one instance: the chosen algorithm with the full cutoff."""
    raw = np.asarray(features, dtype=float).reshape(1, -1)
    alg = _choose(model, raw, None if instance_id is None else [instance_id])[0]
    return (ScheduleEntry(alg, model.cutoff),)


def select_many(model: SelectorModel, prepared: PreparedData) -> SelectionOutput:
    if tuple(prepared.feature_names) != tuple(model.feature_names) and model.mode not in ("constant", "oracle"):
        raise SelectorError("SCHEMA", "feature names differ from the training schema")
    choices = _choose(model, prepared.raw_features, prepared.instances) if prepared.n_instances else []
    return SelectionOutput.single(dict(zip(prepared.instances, choices)), model.cutoff)
