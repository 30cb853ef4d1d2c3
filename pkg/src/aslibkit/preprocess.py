"""Data preparation: repetition aggregation, feature cleaning, cost folding."""

from __future__ import annotations

import csv
import math
import warnings
from collections import Counter, defaultdict
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Sequence

import numpy as np

from ._util import lex_argmin
from .errors import PreprocessError
from .scenario import (
    RUN_STATUSES,
    STEP_STATUSES,
    CVFolds,
    FeatureCostTable,
    FeatureStepStatusTable,
    FeatureTable,
    RunRecord,
    Scenario,
)


def _combine_status(statuses: Sequence[str], order: Sequence[str]) -> str:
    """ok if any repetition is ok, otherwise the modal status (ties: enum order)."""
    present = [s for s in statuses if s is not None]
    if not present:
        return None
    if "ok" in present:
        return "ok"
    counts = Counter(present)
    rank = {s: n for n, s in enumerate(order)}
    return min(counts, key=lambda s: (-counts[s], rank.get(s, len(rank))))


def _nanmean_rows(values: np.ndarray) -> np.ndarray:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return np.nanmean(values, axis=0)


def aggregate_repetitions(scenario: Scenario) -> Scenario:
    """Collapse repetitions: mean of present values, any-ok status rule."""
    reps = {r.repetition for r in scenario.runs}
    reps |= set(scenario.features.repetitions) | set(scenario.feature_status.repetitions) | set(scenario.folds.repetitions)
    if scenario.feature_costs is not None:
        reps |= set(scenario.feature_costs.repetitions)
    if reps <= {1}:
        return scenario

    groups: dict[tuple[str, str], list[RunRecord]] = defaultdict(list)
    for r in scenario.runs:
        groups[(r.instance_id, r.algorithm_id)].append(r)
    runs = []
    n_measures = len(scenario.meta.measures)
    for (inst, alg), recs in sorted(groups.items()):
        values = []
        for m in range(n_measures):
            present = [rec.values[m] for rec in recs if rec.values[m] is not None]
            values.append(math.fsum(present) / len(present) if present else None)
        runs.append(RunRecord(inst, 1, alg, tuple(values), _combine_status([rec.status for rec in recs], RUN_STATUSES)))

    def by_instance(table):
        rows: dict[str, list[int]] = defaultdict(list)
        for n, inst in enumerate(table.instances):
            rows[inst].append(n)
        return sorted(rows.items())

    ft = scenario.features
    f_items = by_instance(ft)
    features = FeatureTable(
        [i for i, _ in f_items],
        [1] * len(f_items),
        ft.feature_names,
        np.array([_nanmean_rows(ft.values[idx]) for _, idx in f_items]).reshape(len(f_items), len(ft.feature_names)),
    )
    st = scenario.feature_status
    s_items = by_instance(st)
    status = FeatureStepStatusTable(
        [i for i, _ in s_items],
        [1] * len(s_items),
        st.steps,
        [
            tuple(_combine_status([st.status[n][j] for n in idx], STEP_STATUSES) for j in range(len(st.steps)))
            for _, idx in s_items
        ],
    )
    costs = None
    if scenario.feature_costs is not None:
        fc = scenario.feature_costs
        c_items = by_instance(fc)
        costs = FeatureCostTable(
            [i for i, _ in c_items],
            [1] * len(c_items),
            fc.steps,
            np.array([_nanmean_rows(fc.costs[idx]) for _, idx in c_items]).reshape(len(c_items), len(fc.steps)),
        )
    fold_of = scenario.folds.fold_of()
    insts = sorted(fold_of)
    folds = CVFolds(insts, [1] * len(insts), [fold_of[i] for i in insts])
    return replace(scenario, runs=tuple(runs), features=features, feature_status=status, feature_costs=costs, folds=folds)


# --------------------------------------------------------------------------- feature cleaning


def fit_cleaning(matrix: np.ndarray, variance_threshold: float = 0.0):
    """Columns to keep and their imputation means.

    A column is dropped when it has no present value, or when its variance over
    present values is <= ``variance_threshold`` (0 means exactly constant).
    """
    matrix = np.asarray(matrix, dtype=float)
    keep, means = [], []
    for j in range(matrix.shape[1]):
        col = matrix[:, j]
        present = col[~np.isnan(col)]
        if present.size == 0:
            continue
        if present.max() == present.min():
            continue
        if variance_threshold > 0 and present.var() <= variance_threshold:
            continue
        keep.append(j)
        means.append(math.fsum(present) / present.size)
    return np.array(keep, dtype=int), np.array(means, dtype=float)


def impute(matrix: np.ndarray, means: np.ndarray) -> np.ndarray:
    out = np.array(matrix, dtype=float, copy=True)
    mask = np.isnan(out)
    if mask.any():
        out[mask] = np.broadcast_to(means, out.shape)[mask]
    return out


def clean_features(features: FeatureTable, variance_threshold: float = 0.0):
    """Drop constant / all-missing columns and mean-impute the rest.

    Returns ``(cleaned_table, dropped_names, means_by_name)``.
    """
    if len(features.instances) == 0:
        raise PreprocessError("EMPTY", "feature table has no instances")
    keep, means = fit_cleaning(features.values, variance_threshold)
    if keep.size == 0:
        raise PreprocessError("EMPTY", "no features survive cleaning")
    names = [features.feature_names[j] for j in keep]
    dropped = [f for j, f in enumerate(features.feature_names) if j not in set(keep.tolist())]
    table = FeatureTable(features.instances, features.repetitions, names, impute(features.values[:, keep], means))
    return table, dropped, dict(zip(names, means.tolist()))


def normalize_features(matrix: np.ndarray):
    """Affine map of each column's [min, max] onto [-1, 1].

    Returns ``(normalized, (mins, maxs))``; reuse the ranges on test rows via
    :func:`apply_normalization`.
    """
    matrix = np.asarray(matrix, dtype=float)
    mins = matrix.min(axis=0) if matrix.shape[0] else np.zeros(matrix.shape[1])
    maxs = matrix.max(axis=0) if matrix.shape[0] else np.zeros(matrix.shape[1])
    return apply_normalization(matrix, mins, maxs), (mins, maxs)


def apply_normalization(matrix: np.ndarray, mins: np.ndarray, maxs: np.ndarray) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=float)
    span = maxs - mins
    safe = np.where(span > 0, span, 1.0)
    out = 2.0 * (matrix - mins) / safe - 1.0
    out = np.where(span > 0, out, 0.0)
    return np.clip(out, -1.0, 1.0)


@dataclass
class FeaturePreprocessor:
    """Cleaning + imputation (+ optional normalisation) fitted on training rows."""

    input_names: tuple[str, ...]
    keep: np.ndarray
    means: np.ndarray
    mins: np.ndarray | None = None
    maxs: np.ndarray | None = None

    @classmethod
    def fit(cls, matrix, names, normalize=False, variance_threshold=0.0) -> "FeaturePreprocessor":
        matrix = np.asarray(matrix, dtype=float)
        if matrix.shape[0] == 0:
            raise PreprocessError("EMPTY", "no training rows")
        keep, means = fit_cleaning(matrix, variance_threshold)
        if keep.size == 0:
            raise PreprocessError("EMPTY", "no features survive cleaning")
        pre = cls(tuple(names), keep, means)
        if normalize:
            _, (pre.mins, pre.maxs) = normalize_features(impute(matrix[:, keep], means))
        return pre

    @property
    def output_names(self) -> list[str]:
        return [self.input_names[j] for j in self.keep]

    def transform(self, matrix) -> np.ndarray:
        matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
        if matrix.shape[1] != len(self.input_names):
            raise PreprocessError("SCHEMA", f"expected {len(self.input_names)} features, got {matrix.shape[1]}")
        out = impute(matrix[:, self.keep], self.means)
        if self.mins is not None:
            out = apply_normalization(out, self.mins, self.maxs)
        return out

    def to_dict(self) -> dict:
        return {
            "input_names": list(self.input_names),
            "keep": self.keep.tolist(),
            "means": self.means.tolist(),
            "mins": None if self.mins is None else self.mins.tolist(),
            "maxs": None if self.maxs is None else self.maxs.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FeaturePreprocessor":
        return cls(
            tuple(d["input_names"]),
            np.array(d["keep"], dtype=int),
            np.array(d["means"], dtype=float),
            None if d["mins"] is None else np.array(d["mins"], dtype=float),
            None if d["maxs"] is None else np.array(d["maxs"], dtype=float),
        )


# --------------------------------------------------------------------------- cost folding


@dataclass(frozen=True, eq=False)
class PreparedData:
    """Per-instance model inputs and cost-adjusted performance labels.

    ``labels`` are feature cost + runtime (missing runtimes at the cutoff);
    ``solved_mask`` is False where the run failed or the adjusted label
    exceeds the cutoff. Presolved instances have all labels 0 and all solved.
    ``runtimes`` / ``raw_ok`` keep the unadjusted data the evaluator needs.
    """

    scenario_id: str
    measure: str
    instances: tuple[str, ...]
    algorithms: tuple[str, ...]
    steps: tuple[str, ...]
    feature_names: tuple[str, ...]
    raw_features: np.ndarray
    runtimes: np.ndarray
    raw_ok: np.ndarray
    labels: np.ndarray
    solved_mask: np.ndarray
    presolved: np.ndarray
    feature_cost_used: np.ndarray
    cutoff: float
    variance_threshold: float = 0.0

    def __post_init__(self):
        for name in ("raw_features", "runtimes", "raw_ok", "labels", "solved_mask", "presolved", "feature_cost_used"):
            arr = np.array(getattr(self, name), copy=True)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n_instances(self) -> int:
        return len(self.instances)

    @cached_property
    def _cleaning(self):
        keep, means = fit_cleaning(self.raw_features, self.variance_threshold)
        return keep, means

    @property
    def design_matrix(self) -> np.ndarray:
        """Cleaned, mean-imputed feature matrix fitted on these rows."""
        keep, means = self._cleaning
        if keep.size == 0:
            raise PreprocessError("EMPTY", "no features survive cleaning")
        return impute(self.raw_features[:, keep], means)

    @property
    def dropped_features(self) -> list[str]:
        keep = set(self._cleaning[0].tolist())
        return [f for j, f in enumerate(self.feature_names) if j not in keep]

    @property
    def imputation_means(self) -> dict[str, float]:
        keep, means = self._cleaning
        return {self.feature_names[j]: float(m) for j, m in zip(keep, means)}

    def penalized_labels(self, k: float = 10.0) -> np.ndarray:
        """Labels with every unsolved cell charged ``k * cutoff``."""
        return np.where(self.solved_mask, self.labels, k * self.cutoff)

    def baseline_times(self) -> np.ndarray:
        """Cost-free per-cell times for the VBS/SBS baselines (NaN = unsolved).

        Presolved instances count 0 for every algorithm.
        """
        t = np.where(self.raw_ok, self.runtimes, np.nan)
        t[self.presolved] = 0.0
        return t

    def baseline_par(self, k: float = 10.0) -> np.ndarray:
        t = self.baseline_times()
        return np.where(np.isnan(t), k * self.cutoff, t)

    def oracle_times(self) -> np.ndarray:
        """Best cost-free time per instance, the cutoff where nothing solves."""
        t = np.where(self.raw_ok, self.runtimes, np.inf)
        best = t.min(axis=1) if t.shape[1] else np.full(len(self.instances), np.inf)
        return np.where(np.isfinite(best), best, self.cutoff)

    def vbs_choice(self, k: float = 10.0) -> list[str]:
        idx = lex_argmin(self.baseline_par(k), self.algorithms)
        return [self.algorithms[j] for j in np.atleast_1d(idx)]

    def subset(self, rows) -> "PreparedData":
        rows = np.asarray(rows, dtype=int)
        return replace(
            self,
            instances=tuple(self.instances[r] for r in rows),
            raw_features=self.raw_features[rows],
            runtimes=self.runtimes[rows],
            raw_ok=self.raw_ok[rows],
            labels=self.labels[rows],
            solved_mask=self.solved_mask[rows],
            presolved=self.presolved[rows],
            feature_cost_used=self.feature_cost_used[rows],
        )

    def to_csv(self, path) -> None:
        """Debug dump: one row per instance with costs, labels and flags."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(
                ["instance_id", "presolved", "feature_cost"]
                + [f"label:{a}" for a in self.algorithms]
                + [f"solved:{a}" for a in self.algorithms]
                + [f"feature:{f}" for f in self.feature_names]
            )
            for n, inst in enumerate(self.instances):
                w.writerow(
                    [inst, int(self.presolved[n]), repr(float(self.feature_cost_used[n]))]
                    + [repr(float(v)) for v in self.labels[n]]
                    + [int(v) for v in self.solved_mask[n]]
                    + ["" if math.isnan(v) else repr(float(v)) for v in self.raw_features[n]]
                )


def resolve_steps(meta, steps: Sequence[str] | None) -> tuple[str, ...]:
    """Validate ``steps`` (None = default steps) and order them by declaration."""
    if steps is None:
        steps = meta.default_steps
    declared = meta.step_names
    unknown = [s for s in steps if s not in declared]
    if unknown:
        raise PreprocessError("UNKNOWN_STEP", f"undeclared feature steps: {unknown}")
    chosen = set(steps)
    for s in chosen:
        missing = [r for r in meta.step(s).requires if r not in chosen]
        if missing:
            raise PreprocessError("STEP_ORDER", f"step {s!r} requires {missing}, which are not selected")
    return tuple(n for n in declared if n in chosen)


def apply_feature_costs(
    scenario: Scenario,
    steps: Sequence[str] | None = None,
    measure: str | None = None,
    features: Sequence[str] | None = None,
    variance_threshold: float = 0.0,
) -> PreparedData:
    """Fold feature-step costs into per-algorithm performance labels.

    Steps are walked in declaration order; an instance presolved by a step
    pays the cost up to and including that step and gets label 0 for every
    algorithm. Otherwise every label is total cost + runtime and any label
    above the cutoff is unsolved. ``features`` restricts model inputs to a
    subset of the features the steps provide.
    """
    scenario = aggregate_repetitions(scenario)
    meta = scenario.meta
    m = meta.measure(measure)
    if m.kind != "runtime":
        raise PreprocessError("UNSUPPORTED_MEASURE", f"measure {m.name!r} is not a runtime measure")
    steps = resolve_steps(meta, steps)
    cutoff = float(meta.algorithm_cutoff_time)

    owner = meta.step_of_feature()
    provided = [f for f in meta.feature_names if owner.get(f) in steps]
    if features is None:
        feat_names = provided
    else:
        bad = [f for f in features if f not in provided]
        if bad:
            raise PreprocessError("UNKNOWN_FEATURE", f"features not provided by the selected steps: {bad}")
        chosen = set(features)
        feat_names = [f for f in provided if f in chosen]

    instances, algorithms, values, status = scenario.performance(m.name)
    n = len(instances)
    present = ~np.isnan(values)
    ok = (status == "ok") & present

    step_idx = {s: j for j, s in enumerate(steps)}
    st = scenario.feature_status
    st_row = {inst: r for r, inst in enumerate(st.instances)}
    st_col = [st.steps.index(s) if s in st.steps else None for s in steps]
    fc = scenario.feature_costs
    cost = np.zeros((n, len(steps)))
    if fc is not None:
        fc_row = {inst: r for r, inst in enumerate(fc.instances)}
        fc_col = [fc.steps.index(s) if s in fc.steps else None for s in steps]
        for i, inst in enumerate(instances):
            r = fc_row.get(inst)
            if r is None:
                continue
            for j, c in enumerate(fc_col):
                if c is not None and not math.isnan(fc.costs[r, c]):
                    cost[i, j] = fc.costs[r, c]

    presolved = np.zeros(n, dtype=bool)
    cost_used = np.zeros(n)
    presolved_at = np.full(n, len(steps))
    for i, inst in enumerate(instances):
        r = st_row.get(inst)
        for j in range(len(steps)):
            if r is not None and st_col[j] is not None and st.status[r][st_col[j]] == "presolved":
                presolved[i] = True
                presolved_at[i] = j
                break
        upto = presolved_at[i] + 1 if presolved[i] else len(steps)
        cost_used[i] = math.fsum(cost[i, :upto])

    ft = scenario.features
    ft_row = {inst: r for r, inst in enumerate(ft.instances)}
    ft_col = [ft.feature_names.index(f) if f in ft.feature_names else None for f in feat_names]
    raw = np.full((n, len(feat_names)), np.nan)
    feat_step = [step_idx[owner[f]] for f in feat_names]
    for i, inst in enumerate(instances):
        r = ft_row.get(inst)
        if r is None:
            continue
        for j, c in enumerate(ft_col):
            if c is None:
                continue
            if presolved[i] and feat_step[j] > presolved_at[i]:
                continue
            raw[i, j] = ft.values[r, c]

    filled = np.where(present, values, cutoff)
    labels = cost_used[:, None] + filled
    solved = ok & (labels <= cutoff)
    labels[presolved] = 0.0
    solved[presolved] = True

    return PreparedData(
        scenario_id=meta.scenario_id,
        measure=m.name,
        instances=instances,
        algorithms=algorithms,
        steps=steps,
        feature_names=tuple(feat_names),
        raw_features=raw,
        runtimes=values,
        raw_ok=ok & (values <= cutoff),
        labels=labels,
        solved_mask=solved,
        presolved=presolved,
        feature_cost_used=cost_used,
        cutoff=cutoff,
        variance_threshold=variance_threshold,
    )
