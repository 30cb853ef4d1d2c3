"""Seeded synthetic scenarios with planted structure."""

from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass, fields

import numpy as np

from ._util import derive_seed
from .io import write_scenario
from .scenario import (
    CVFolds,
    FeatureCostTable,
    FeatureStep,
    FeatureStepStatusTable,
    FeatureTable,
    MetaInfo,
    PerformanceMeasure,
    RunRecord,
    Scenario,
)

MODES = ("feature_determined", "clustered", "dominant_single", "complementary_pair")

# planted mean runtimes as fractions of the cutoff
FAST = 0.01
SLOW = 0.3
WEAK = 0.6


@dataclass(frozen=True)
class GenSpec:
    n_instances: int = 200
    n_algorithms: int = 4
    n_features: int = 6
    n_steps: int = 2
    cutoff: float = 1000.0
    noise_sd: float = 0.3
    planted: str = "feature_determined"
    presolve_rate: float = 0.0
    missing_rate: float = 0.0
    seed: int = 0
    n_folds: int = 10
    cost_scale: float = 1.0

    def __post_init__(self):
        if self.planted not in MODES:
            raise ValueError(f"planted must be one of {MODES}")
        if self.n_instances < 1 or self.n_algorithms < 1 or self.n_steps < 1:
            raise ValueError("n_instances, n_algorithms and n_steps must be >= 1")
        if self.n_steps > self.n_features:
            raise ValueError("n_steps must not exceed n_features")
        if self.planted == "complementary_pair" and self.n_algorithms < 2:
            raise ValueError("complementary_pair needs at least two algorithms")
        for name in ("presolve_rate", "missing_rate"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.noise_sd < 0 or self.cutoff <= 0 or self.cost_scale < 0:
            raise ValueError("noise_sd, cost_scale must be >= 0 and cutoff > 0")
        if not 2 <= self.n_folds <= self.n_instances:
            raise ValueError("n_folds must lie in [2, n_instances]")

    @classmethod
    def from_dict(cls, d: dict) -> "GenSpec":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown generator fields {sorted(unknown)}")
        return cls(**d)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class PlantedTruth:
    """What the generator knows: per-instance best algorithm and baseline scores.

    Baselines use all feature steps (presolved instances count 0) and the
    penalty factor ``k``.
    """

    best_algorithm: dict
    vbs_par10: float
    sbs_par10: float
    sbs_algorithm: str
    dominator: str | None
    pair: tuple[str, ...] | None
    k: float = 10.0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pair"] = None if self.pair is None else list(self.pair)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _phi(x: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.vectorize(math.erf)(x / math.sqrt(2.0)))


def _planted_means(spec: GenSpec, rng, X):
    """Mean runtimes (fractions of the cutoff) plus the planted roles."""
    n, m = spec.n_instances, spec.n_algorithms
    slow = SLOW + 0.05 * np.arange(m)
    mu = np.tile(slow, (n, 1))
    dominator = pair = None
    if spec.planted == "feature_determined":
        owner = np.minimum((_phi(X[:, 0]) * m).astype(int), m - 1)
        mu[np.arange(n), owner] = FAST
    elif spec.planted == "clustered":
        owner = np.arange(n) % m
        mu[np.arange(n), owner] = FAST
    elif spec.planted == "dominant_single":
        mu[:, 0] = FAST
        dominator = 0
    else:
        mu[:] = WEAK + 0.05 * np.arange(m)
        first = X[:, 0] <= 0
        mu[:, 0] = np.where(first, FAST, SLOW)
        mu[:, 1] = np.where(first, SLOW, FAST)
        pair = (0, 1)
    return mu, dominator, pair


def _features(spec: GenSpec, rng):
    n, d = spec.n_instances, spec.n_features
    if spec.planted == "clustered":
        m = spec.n_algorithms
        centers = rng.normal(0.0, 1.0, size=(m, d))
        centers *= 8.0 / np.maximum(np.linalg.norm(centers, axis=1, keepdims=True), 1e-12)
        owner = np.arange(n) % m
        return centers[owner] + rng.normal(0.0, 0.5, size=(n, d))
    return rng.normal(0.0, 1.0, size=(n, d))


def _round(x, digits=4):
    return float(np.round(x, digits))


def generate(spec: GenSpec) -> tuple[Scenario, PlantedTruth]:
    """Build a scenario and its planted truth; identical specs give identical output."""
    rng = np.random.default_rng(derive_seed(spec.seed, "generate", spec.planted))
    n, m, d, s = spec.n_instances, spec.n_algorithms, spec.n_features, spec.n_steps
    cutoff = float(spec.cutoff)
    width = len(str(n))
    instances = tuple(f"inst_{i:0{width}d}" for i in range(1, n + 1))
    algorithms = tuple(f"algo_{a}" for a in range(1, m + 1))
    feature_names = tuple(f"f{j}" for j in range(1, d + 1))
    step_names = tuple(f"step{j}" for j in range(1, s + 1))
    blocks = np.array_split(np.arange(d), s)
    steps = tuple(
        FeatureStep(name, () if j == 0 else (step_names[0],), tuple(feature_names[f] for f in blocks[j]))
        for j, name in enumerate(step_names)
    )
    step_of_col = np.empty(d, dtype=int)
    for j, b in enumerate(blocks):
        step_of_col[b] = j

    X = np.round(_features(spec, rng), 6)
    mu, dominator, pair = _planted_means(spec, rng, X)
    noise = rng.normal(0.0, 1.0, size=(n, m)) * spec.noise_sd
    rt = np.round(np.maximum(mu * cutoff * np.exp(noise), 1e-3), 4)
    if dominator is not None:
        others = np.delete(rt, dominator, axis=1)
        rt[:, dominator] = np.round(np.maximum(0.5 * np.minimum(others.min(axis=1), cutoff), 1e-3), 4)
    timeout = rt >= cutoff
    rt = np.where(timeout, cutoff, rt)

    # feature steps: costs, presolving, missing cells
    costs = np.round(spec.cost_scale * np.exp(rng.normal(0.0, 0.5, size=(n, s))), 4)
    presolve_draw = rng.random(n)
    presolve_step = rng.integers(0, s, size=n)
    presolved = presolve_draw < spec.presolve_rate
    status = [["ok"] * s for _ in range(n)]
    values = X.copy()
    cost_table = costs.copy()
    for i in np.flatnonzero(presolved):
        p = presolve_step[i]
        status[i][p] = "presolved"
        for j in range(p + 1, s):
            status[i][j] = "unknown"
            cost_table[i, j] = np.nan
        values[i, step_of_col > p] = np.nan
    miss = rng.random((n, d)) < spec.missing_rate
    values[miss] = np.nan
    # never blank an instance's whole vector
    for i in np.flatnonzero(np.isnan(values).all(axis=1)):
        keep = 0
        values[i, keep] = X[i, keep]

    perm = rng.permutation(n)
    folds = np.empty(n, dtype=int)
    folds[perm] = np.arange(n) % spec.n_folds + 1

    meta = MetaInfo(
        scenario_id=f"synthetic-{spec.planted}-{spec.seed}",
        measures=(PerformanceMeasure("runtime", "runtime", False),),
        algorithm_cutoff_time=cutoff,
        algorithms=algorithms,
        feature_names=feature_names,
        feature_steps=steps,
        default_steps=step_names,
        format_version="2.0",
    )
    runs = tuple(
        RunRecord(instances[i], 1, algorithms[a], (_round(rt[i, a]),), "timeout" if timeout[i, a] else "ok")
        for i in range(n)
        for a in range(m)
    )
    ones = (1,) * n
    scenario = Scenario(
        meta=meta,
        runs=runs,
        features=FeatureTable(instances, ones, feature_names, values),
        feature_status=FeatureStepStatusTable(instances, ones, step_names, tuple(tuple(r) for r in status)),
        folds=CVFolds(instances, ones, tuple(int(f) for f in folds)),
        feature_costs=FeatureCostTable(instances, ones, step_names, cost_table) if spec.cost_scale > 0 else None,
        readme=_readme(spec),
    )
    return scenario, _truth(spec, rt, timeout, presolved, algorithms, instances, dominator, pair)


def _truth(spec, rt, timeout, presolved, algorithms, instances, dominator, pair, k=10.0) -> PlantedTruth:
    cutoff = float(spec.cutoff)
    par = np.where(timeout, k * cutoff, rt)
    order = sorted(range(len(algorithms)), key=lambda a: algorithms[a])
    best = {}
    vbs = []
    for i, inst in enumerate(instances):
        a = min(order, key=lambda j: par[i, j])
        best[inst] = algorithms[a]
        vbs.append(0.0 if presolved[i] else float(par[i, a]))
    par_effective = np.where(presolved[:, None], 0.0, par)
    totals = [math.fsum(par_effective[:, j]) for j in range(len(algorithms))]
    sbs = min(order, key=lambda j: totals[j])
    n = len(instances)
    return PlantedTruth(
        best_algorithm=best,
        vbs_par10=math.fsum(vbs) / n,
        sbs_par10=totals[sbs] / n,
        sbs_algorithm=algorithms[sbs],
        dominator=None if dominator is None else algorithms[dominator],
        pair=None if pair is None else tuple(algorithms[p] for p in pair),
        k=k,
    )


def _readme(spec: GenSpec) -> str:
    return (
        f"Synthetic scenario, planted structure '{spec.planted}', seed {spec.seed}.\n"
        f"{spec.n_instances} instances, {spec.n_algorithms} algorithms, {spec.n_features} features "
        f"in {spec.n_steps} steps, cutoff {spec.cutoff:g} s.\n"
    )


def truth_path(out_dir) -> str:
    """Sidecar location for the planted truth: next to, not inside, the scenario directory."""
    out_dir = os.path.normpath(str(out_dir))
    return out_dir + ".planted_truth.json"


def write_generated(spec: GenSpec, out_dir, truth_file=None) -> tuple[Scenario, PlantedTruth]:
    scenario, truth = generate(spec)
    write_scenario(scenario, out_dir)
    with open(truth_file or truth_path(out_dir), "w") as fh:
        fh.write(truth.to_json() + "\n")
    return scenario, truth
