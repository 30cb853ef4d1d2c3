"""Scenario data model and cross-file validation."""

from __future__ import annotations

import json
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

RUN_STATUSES = ("ok", "timeout", "memout", "not_applicable", "crash", "other")
STEP_STATUSES = ("ok", "timeout", "memout", "presolved", "crash", "other", "unknown")
MEASURE_KINDS = ("runtime", "solution_quality")

DESCRIPTION_FILE = "description.txt"
RUNS_FILE = "algorithm_runs.arff"
FEATURES_FILE = "feature_values.arff"
STATUS_FILE = "feature_runstatus.arff"
COSTS_FILE = "feature_costs.arff"
CV_FILE = "cv.arff"
GROUND_TRUTH_FILE = "ground_truth.arff"
README_FILE = "readme.txt"
CITATION_FILE = "citation.bib"

_FILE_ORDER = (DESCRIPTION_FILE, RUNS_FILE, FEATURES_FILE, STATUS_FILE, COSTS_FILE, CV_FILE, README_FILE)


def _frozen(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class PerformanceMeasure:
    name: str
    kind: str = "runtime"
    maximize: bool = False


@dataclass(frozen=True)
class FeatureStep:
    name: str
    requires: tuple[str, ...] = ()
    provides: tuple[str, ...] = ()


@dataclass(frozen=True)
class MetaInfo:
    scenario_id: str
    measures: tuple[PerformanceMeasure, ...]
    algorithm_cutoff_time: float
    algorithms: tuple[str, ...]
    feature_names: tuple[str, ...]
    feature_steps: tuple[FeatureStep, ...]
    default_steps: tuple[str, ...]
    algorithm_deterministic: tuple[bool, ...] = ()
    feature_deterministic: tuple[bool, ...] = ()
    algorithm_cutoff_memory: float | None = None
    features_cutoff_time: float | None = None
    features_cutoff_memory: float | None = None
    format_version: str | None = None

    def __post_init__(self):
        if not self.algorithm_deterministic:
            object.__setattr__(self, "algorithm_deterministic", (True,) * len(self.algorithms))
        if not self.feature_deterministic:
            object.__setattr__(self, "feature_deterministic", (True,) * len(self.feature_names))

    @property
    def step_names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.feature_steps)

    def step(self, name: str) -> FeatureStep:
        for s in self.feature_steps:
            if s.name == name:
                return s
        raise KeyError(name)

    def measure(self, name: str | None = None) -> PerformanceMeasure:
        """The designated measure: ``name`` or the first declared one."""
        if name is None:
            return self.measures[0]
        for m in self.measures:
            if m.name == name:
                return m
        raise KeyError(f"unknown performance measure {name!r}")

    def measure_index(self, name: str | None = None) -> int:
        return self.measures.index(self.measure(name))

    def step_of_feature(self) -> dict[str, str]:
        owner = {}
        for s in self.feature_steps:
            for f in s.provides:
                owner.setdefault(f, s.name)
        return owner

    def step_closure(self, steps: Iterable[str]) -> tuple[str, ...]:
        """Dependency closure of ``steps``, in declaration order."""
        by_name = {s.name: s for s in self.feature_steps}
        todo = list(steps)
        seen: set[str] = set()
        while todo:
            name = todo.pop()
            if name in seen:
                continue
            seen.add(name)
            todo.extend(by_name[name].requires)
        return tuple(n for n in self.step_names if n in seen)


@dataclass(frozen=True)
class RunRecord:
    instance_id: str
    repetition: int
    algorithm_id: str
    values: tuple[float | None, ...]  # aligned with MetaInfo.measures, canonical (minimised) sign
    status: str


class _Table:
    """Shared behaviour for the (instance, repetition)-keyed tables."""

    instances: tuple[str, ...]
    repetitions: tuple[int, ...]

    def keys(self) -> list[tuple[str, int]]:
        return list(zip(self.instances, self.repetitions))

    def instance_set(self) -> set[str]:
        return set(self.instances)

    def _order(self) -> list[int]:
        return sorted(range(len(self.instances)), key=lambda r: (self.instances[r], self.repetitions[r]))


@dataclass(frozen=True, eq=False)
class FeatureTable(_Table):
    instances: tuple[str, ...]
    repetitions: tuple[int, ...]
    feature_names: tuple[str, ...]
    values: np.ndarray  # rows x features, NaN = missing

    def __post_init__(self):
        object.__setattr__(self, "instances", tuple(self.instances))
        object.__setattr__(self, "repetitions", tuple(int(r) for r in self.repetitions))
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        vals = _frozen(self.values).reshape(len(self.instances), len(self.feature_names))
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __eq__(self, other):
        if not isinstance(other, FeatureTable):
            return NotImplemented
        return (
            self.instances == other.instances
            and self.repetitions == other.repetitions
            and self.feature_names == other.feature_names
            and np.array_equal(self.values, other.values, equal_nan=True)
        )

    __hash__ = None

    def canonical(self) -> "FeatureTable":
        order = self._order()
        return FeatureTable(
            [self.instances[r] for r in order],
            [self.repetitions[r] for r in order],
            self.feature_names,
            self.values[order] if order else self.values,
        )


@dataclass(frozen=True)
class FeatureStepStatusTable(_Table):
    instances: tuple[str, ...]
    repetitions: tuple[int, ...]
    steps: tuple[str, ...]
    status: tuple[tuple[str | None, ...], ...]  # rows x steps

    def __post_init__(self):
        object.__setattr__(self, "instances", tuple(self.instances))
        object.__setattr__(self, "repetitions", tuple(int(r) for r in self.repetitions))
        object.__setattr__(self, "steps", tuple(self.steps))
        object.__setattr__(self, "status", tuple(tuple(row) for row in self.status))

    def canonical(self) -> "FeatureStepStatusTable":
        order = self._order()
        return FeatureStepStatusTable(
            [self.instances[r] for r in order],
            [self.repetitions[r] for r in order],
            self.steps,
            [self.status[r] for r in order],
        )


@dataclass(frozen=True, eq=False)
class FeatureCostTable(_Table):
    instances: tuple[str, ...]
    repetitions: tuple[int, ...]
    steps: tuple[str, ...]
    costs: np.ndarray  # rows x steps, NaN = missing

    def __post_init__(self):
        object.__setattr__(self, "instances", tuple(self.instances))
        object.__setattr__(self, "repetitions", tuple(int(r) for r in self.repetitions))
        object.__setattr__(self, "steps", tuple(self.steps))
        vals = _frozen(self.costs).reshape(len(self.instances), len(self.steps))
        vals.setflags(write=False)
        object.__setattr__(self, "costs", vals)

    def __eq__(self, other):
        if not isinstance(other, FeatureCostTable):
            return NotImplemented
        return (
            self.instances == other.instances
            and self.repetitions == other.repetitions
            and self.steps == other.steps
            and np.array_equal(self.costs, other.costs, equal_nan=True)
        )

    __hash__ = None

    def canonical(self) -> "FeatureCostTable":
        order = self._order()
        return FeatureCostTable(
            [self.instances[r] for r in order],
            [self.repetitions[r] for r in order],
            self.steps,
            self.costs[order] if order else self.costs,
        )


@dataclass(frozen=True)
class CVFolds(_Table):
    instances: tuple[str, ...]
    repetitions: tuple[int, ...]
    folds: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "instances", tuple(self.instances))
        object.__setattr__(self, "repetitions", tuple(int(r) for r in self.repetitions))
        object.__setattr__(self, "folds", tuple(int(f) for f in self.folds))

    def fold_of(self) -> dict[str, int]:
        """Fold per instance, taken from its lowest repetition."""
        out: dict[str, tuple[int, int]] = {}
        for inst, rep, fold in zip(self.instances, self.repetitions, self.folds):
            if inst not in out or rep < out[inst][0]:
                out[inst] = (rep, fold)
        return {k: v[1] for k, v in out.items()}

    @property
    def n_folds(self) -> int:
        return len(set(self.folds))

    def canonical(self) -> "CVFolds":
        order = self._order()
        return CVFolds(
            [self.instances[r] for r in order],
            [self.repetitions[r] for r in order],
            [self.folds[r] for r in order],
        )


@dataclass(frozen=True, eq=False)
class Scenario:
    meta: MetaInfo
    runs: tuple[RunRecord, ...]
    features: FeatureTable
    feature_status: FeatureStepStatusTable
    folds: CVFolds
    feature_costs: FeatureCostTable | None = None
    ground_truth: object | None = None  # opaque ArffTable
    readme: str | None = None
    citations: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "runs", tuple(self.runs))

    def __eq__(self, other):
        if not isinstance(other, Scenario):
            return NotImplemented
        return (
            self.meta == other.meta
            and self.runs == other.runs
            and self.features == other.features
            and self.feature_status == other.feature_status
            and self.folds == other.folds
            and self.feature_costs == other.feature_costs
            and self.ground_truth == other.ground_truth
            and self.readme == other.readme
            and self.citations == other.citations
        )

    __hash__ = None

    @property
    def instance_ids(self) -> tuple[str, ...]:
        """Sorted instance ids appearing in the run data."""
        return tuple(sorted({r.instance_id for r in self.runs}))

    @property
    def n_repetitions(self) -> int:
        return max((r.repetition for r in self.runs), default=0)

    def canonical(self) -> "Scenario":
        """Same scenario with every table in canonical row order."""
        runs = sorted(self.runs, key=lambda r: (r.instance_id, r.repetition, r.algorithm_id))
        return replace(
            self,
            runs=tuple(runs),
            features=self.features.canonical(),
            feature_status=self.feature_status.canonical(),
            folds=self.folds.canonical(),
            feature_costs=None if self.feature_costs is None else self.feature_costs.canonical(),
        )

    def restrict_algorithms(self, algorithms: Sequence[str]) -> "Scenario":
        keep = set(algorithms)
        unknown = keep - set(self.meta.algorithms)
        if unknown:
            raise KeyError(f"unknown algorithms: {sorted(unknown)}")
        idx = [i for i, a in enumerate(self.meta.algorithms) if a in keep]
        meta = replace(
            self.meta,
            algorithms=tuple(self.meta.algorithms[i] for i in idx),
            algorithm_deterministic=tuple(self.meta.algorithm_deterministic[i] for i in idx),
        )
        return replace(self, meta=meta, runs=tuple(r for r in self.runs if r.algorithm_id in keep))

    def performance(self, measure: str | None = None, repetition: int | None = None):
        """Dense (instances x algorithms) view of one measure.

        Returns ``(instances, algorithms, values, status)`` where ``values``
        holds NaN for missing cells and ``status`` is an object array (None
        where no run record exists). With several repetitions, ``repetition``
        picks one (default: the lowest present per cell).
        """
        key = ("_perf", measure, repetition)
        cache = self.__dict__.setdefault("_cache", {})
        if key in cache:
            return cache[key]
        mi = self.meta.measure_index(measure)
        instances = self.instance_ids
        algorithms = self.meta.algorithms
        row = {i: n for n, i in enumerate(instances)}
        col = {a: n for n, a in enumerate(algorithms)}
        values = np.full((len(instances), len(algorithms)), np.nan)
        status = np.full((len(instances), len(algorithms)), None, dtype=object)
        best_rep = np.full((len(instances), len(algorithms)), np.iinfo(np.int64).max)
        for r in self.runs:
            if repetition is not None and r.repetition != repetition:
                continue
            if r.algorithm_id not in col:
                continue
            i, j = row[r.instance_id], col[r.algorithm_id]
            if r.repetition < best_rep[i, j]:
                best_rep[i, j] = r.repetition
                v = r.values[mi]
                values[i, j] = np.nan if v is None else v
                status[i, j] = r.status
        values.setflags(write=False)
        status.setflags(write=False)
        cache[key] = (instances, algorithms, values, status)
        return cache[key]


# --------------------------------------------------------------------------- validation


@dataclass(frozen=True, order=True)
class Finding:
    severity: str  # "error" | "warning"
    code: str
    message: str
    file: str | None = None
    row: int | None = None

    def to_dict(self) -> dict:
        return {"severity": self.severity, "code": self.code, "message": self.message, "file": self.file, "row": self.row}


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...] = field(default_factory=tuple)

    @property
    def errors(self) -> list[Finding]:
        return [f for f in self.findings if f.severity == "error"]

    @property
    def warnings(self) -> list[Finding]:
        return [f for f in self.findings if f.severity == "warning"]

    @property
    def ok(self) -> bool:
        return not self.errors

    def codes(self) -> list[str]:
        return [f.code for f in self.findings]

    def to_json(self) -> str:
        return json.dumps([f.to_dict() for f in self.findings], indent=2)

    def __iter__(self):
        return iter(self.findings)

    def __len__(self):
        return len(self.findings)


class _Collector:
    def __init__(self):
        self.items: list[Finding] = []

    def error(self, code, message, file=None, row=None):
        self.items.append(Finding("error", code, message, file, row))

    def warning(self, code, message, file=None, row=None):
        self.items.append(Finding("warning", code, message, file, row))

    def report(self) -> ValidationReport:
        rank = {f: n for n, f in enumerate(_FILE_ORDER)}
        items = sorted(
            self.items,
            key=lambda f: (rank.get(f.file, len(rank)), f.row or 0, f.severity, f.code, f.message),
        )
        return ValidationReport(tuple(items))


def _sample(names: Iterable[str], limit: int = 5) -> str:
    names = sorted(names)
    shown = ", ".join(names[:limit])
    if len(names) > limit:
        shown += f", ... ({len(names)} total)"
    return shown


def _find_cycle(steps: Sequence[FeatureStep]) -> list[str] | None:
    graph = {s.name: [r for r in s.requires] for s in steps}
    state: dict[str, int] = {}
    stack: list[str] = []

    def visit(node: str) -> list[str] | None:
        state[node] = 1
        stack.append(node)
        for nxt in graph.get(node, ()):
            if nxt not in graph:
                continue
            if state.get(nxt) == 1:
                return stack[stack.index(nxt):] + [nxt]
            if state.get(nxt) is None:
                found = visit(nxt)
                if found:
                    return found
        stack.pop()
        state[node] = 2
        return None

    for s in steps:
        if state.get(s.name) is None:
            found = visit(s.name)
            if found:
                return found
    return None


def validate_meta(meta: MetaInfo, out: _Collector | None = None) -> ValidationReport:
    """Check the invariants that involve only the description file."""
    col = out or _Collector()
    f = DESCRIPTION_FILE
    if not meta.scenario_id:
        col.error("EMPTY_NAME", "scenario_id is empty", f)
    names = [m.name for m in meta.measures]
    if not meta.measures:
        col.error("MISSING_KEY", "no performance measure declared", f)
    for name, n in Counter(names).items():
        if not name:
            col.error("EMPTY_NAME", "performance measure with empty name", f)
        elif n > 1:
            col.error("DUPLICATE_MEASURE", f"performance measure {name!r} declared {n} times", f)
    for m in meta.measures:
        if m.kind not in MEASURE_KINDS:
            col.error("MEASURE_KIND", f"measure {m.name!r} has unknown type {m.kind!r}", f)
        if m.kind == "runtime" and m.maximize:
            col.error("MEASURE_KIND", f"runtime measure {m.name!r} declared as maximised", f)
    if not (meta.algorithm_cutoff_time > 0 and math.isfinite(meta.algorithm_cutoff_time)):
        col.error("CUTOFF", f"algorithm_cutoff_time must be > 0, got {meta.algorithm_cutoff_time}", f)
    for name, n in Counter(meta.algorithms).items():
        if n > 1:
            col.error("DUPLICATE_ALGORITHM", f"algorithm {name!r} declared {n} times", f)
    for name, n in Counter(meta.feature_names).items():
        if n > 1:
            col.error("DUPLICATE_FEATURE", f"feature {name!r} declared {n} times", f)
    step_names = [s.name for s in meta.feature_steps]
    for name, n in Counter(step_names).items():
        if n > 1:
            col.error("DUPLICATE_STEP", f"feature step {name!r} declared {n} times", f)
    declared = set(step_names)
    for s in meta.feature_steps:
        if not s.provides:
            col.error("STEP_PROVIDES_EMPTY", f"feature step {s.name!r} provides no features", f)
        if s.name in s.requires:
            col.error("STEP_REQUIRES", f"feature step {s.name!r} requires itself", f)
        if len(set(s.requires)) != len(s.requires):
            col.error("STEP_REQUIRES", f"feature step {s.name!r} lists a requirement twice", f)
        for r in s.requires:
            if r not in declared:
                col.error("UNKNOWN_STEP", f"feature step {s.name!r} requires undeclared step {r!r}", f)
    for d in meta.default_steps:
        if d not in declared:
            col.error("UNKNOWN_STEP", f"default step {d!r} is not declared", f)
    cycle = _find_cycle(meta.feature_steps)
    if cycle:
        col.error("STEP_CYCLE", "feature-step dependency cycle: " + " -> ".join(cycle), f)
    providers: dict[str, list[str]] = defaultdict(list)
    for s in meta.feature_steps:
        for feat in s.provides:
            providers[feat].append(s.name)
    for feat in meta.feature_names:
        p = providers.get(feat, [])
        if len(p) != 1:
            col.error("FEATURE_PROVIDER", f"feature {feat!r} is provided by {len(p)} steps (expected exactly 1)", f)
    extra = set(providers) - set(meta.feature_names)
    if extra:
        col.error("FEATURE_PROVIDER", f"steps provide undeclared features: {_sample(extra)}", f)
    if out is None:
        return col.report()
    return ValidationReport()


def _check_instance_set(col, file, found: set[str], expected: set[str], what: str):
    missing = expected - found
    extra = found - expected
    if missing:
        col.error("INSTANCE_SET_MISMATCH", f"{len(missing)} instances with runs lack {what}: {_sample(missing)}", file)
    if extra:
        col.error("INSTANCE_SET_MISMATCH", f"{len(extra)} instances in {what} have no runs: {_sample(extra)}", file)


def _check_duplicate_keys(col, file, table: _Table):
    seen: dict[tuple[str, int], int] = {}
    for n, key in enumerate(table.keys(), start=1):
        if key in seen:
            col.error("DUPLICATE_ROW", f"row for instance {key[0]!r} repetition {key[1]} repeats row {seen[key]}", file, n)
        else:
            seen[key] = n
        if key[1] < 1:
            col.error("BAD_REPETITION", f"repetition must be a positive integer, got {key[1]}", file, n)


def validate_scenario(scenario: Scenario) -> ValidationReport:
    """Return every invariant violation in ``scenario``.

    Referential breaks between files are errors; data oddities such as
    timeouts recorded below the cutoff are warnings.
    """
    col = _Collector()
    meta = scenario.meta
    validate_meta(meta, col)

    # algorithm runs
    seen: dict[tuple[str, int, str], int] = {}
    declared_algs = set(meta.algorithms)
    run_algs: set[str] = set()
    run_instances: set[str] = set()
    cutoff = meta.algorithm_cutoff_time
    for n, r in enumerate(scenario.runs, start=1):
        key = (r.instance_id, r.repetition, r.algorithm_id)
        if key in seen:
            col.error("DUPLICATE_RUN", f"run {key} repeats row {seen[key]}", RUNS_FILE, n)
        else:
            seen[key] = n
        if r.repetition < 1:
            col.error("BAD_REPETITION", f"repetition must be a positive integer, got {r.repetition}", RUNS_FILE, n)
        run_algs.add(r.algorithm_id)
        run_instances.add(r.instance_id)
        if r.status not in RUN_STATUSES:
            col.error("BAD_STATUS", f"unknown run status {r.status!r}", RUNS_FILE, n)
        if len(r.values) != len(meta.measures):
            col.error("ARITY", f"run carries {len(r.values)} measure values, {len(meta.measures)} declared", RUNS_FILE, n)
            continue
        if r.status == "ok":
            for m, v in zip(meta.measures, r.values):
                if v is None or (isinstance(v, float) and math.isnan(v)):
                    col.error("MISSING_VALUE", f"status ok but measure {m.name!r} missing", RUNS_FILE, n)
        if r.status == "timeout":
            for m, v in zip(meta.measures, r.values):
                if m.kind == "runtime" and v is not None and v < cutoff:
                    col.warning(
                        "TIMEOUT_UNDER_CUTOFF",
                        f"status timeout but {m.name}={v:g} below cutoff {cutoff:g}",
                        RUNS_FILE,
                        n,
                    )
    undeclared = run_algs - declared_algs
    if undeclared:
        col.error("ALGORITHM_SET_MISMATCH", f"runs use undeclared algorithms: {_sample(undeclared)}", RUNS_FILE)
    unused = declared_algs - run_algs
    if unused:
        col.error("ALGORITHM_SET_MISMATCH", f"declared algorithms without runs: {_sample(unused)}", RUNS_FILE)

    # feature values
    ft = scenario.features
    if set(ft.feature_names) != set(meta.feature_names):
        missing = set(meta.feature_names) - set(ft.feature_names)
        extra = set(ft.feature_names) - set(meta.feature_names)
        parts = []
        if missing:
            parts.append(f"missing columns {_sample(missing)}")
        if extra:
            parts.append(f"undeclared columns {_sample(extra)}")
        col.error("FEATURE_NAME_MISMATCH", "; ".join(parts), FEATURES_FILE)
    _check_duplicate_keys(col, FEATURES_FILE, ft)
    _check_instance_set(col, FEATURES_FILE, ft.instance_set(), run_instances, "feature values")
    if ft.values.size or len(ft.instances):
        all_missing = np.all(np.isnan(ft.values), axis=1) if ft.values.shape[1] else np.ones(len(ft.instances), bool)
        for n in np.flatnonzero(all_missing):
            col.warning("ALL_FEATURES_MISSING", f"instance {ft.instances[n]!r} has no feature values", FEATURES_FILE, int(n) + 1)
        groups: dict[tuple, list[int]] = defaultdict(list)
        for n in range(len(ft.instances)):
            if all_missing[n]:
                continue
            groups[tuple(None if math.isnan(v) else v for v in ft.values[n])].append(n)
        for rows in groups.values():
            insts = sorted({ft.instances[r] for r in rows})
            if len(insts) > 1:
                col.warning(
                    "DUPLICATE_FEATURE_VECTOR",
                    f"instances share identical feature vectors: {_sample(insts)}",
                    FEATURES_FILE,
                    rows[0] + 1,
                )

    # feature step status
    st = scenario.feature_status
    declared_steps = set(meta.step_names)
    if set(st.steps) != declared_steps:
        col.error(
            "STEP_SET_MISMATCH",
            f"status columns {_sample(st.steps)} differ from declared steps {_sample(declared_steps)}",
            STATUS_FILE,
        )
    _check_duplicate_keys(col, STATUS_FILE, st)
    _check_instance_set(col, STATUS_FILE, st.instance_set(), run_instances, "feature step status")
    for n, row in enumerate(st.status, start=1):
        for step, s in zip(st.steps, row):
            if s is None:
                col.error("STATUS_MISSING", f"no status for step {step!r}", STATUS_FILE, n)
            elif s not in STEP_STATUSES:
                col.error("BAD_STATUS", f"unknown feature step status {s!r}", STATUS_FILE, n)

    # feature costs
    fc = scenario.feature_costs
    if fc is not None:
        unknown = set(fc.steps) - declared_steps
        if unknown:
            col.error("STEP_SET_MISMATCH", f"cost columns for undeclared steps: {_sample(unknown)}", COSTS_FILE)
        _check_duplicate_keys(col, COSTS_FILE, fc)
        extra = fc.instance_set() - run_instances
        if extra:
            col.error("INSTANCE_SET_MISMATCH", f"costs for instances without runs: {_sample(extra)}", COSTS_FILE)
        bad = np.argwhere(fc.costs < 0)
        for n, j in bad:
            col.error("NEGATIVE_COST", f"negative cost {fc.costs[n, j]:g} for step {fc.steps[j]!r}", COSTS_FILE, int(n) + 1)

    # cv folds
    cv = scenario.folds
    _check_duplicate_keys(col, CV_FILE, cv)
    _check_instance_set(col, CV_FILE, cv.instance_set(), run_instances, "cv folds")
    fold_ids = set(cv.folds)
    if fold_ids:
        if min(fold_ids) < 1:
            for n, fold in enumerate(cv.folds, start=1):
                if fold < 1:
                    col.error("FOLD_RANGE", f"fold index {fold} < 1", CV_FILE, n)
        if fold_ids != set(range(1, max(fold_ids) + 1)) and min(fold_ids) >= 1:
            col.error("FOLD_RANGE", f"fold indices {sorted(fold_ids)} are not contiguous from 1", CV_FILE)

    if scenario.readme is None:
        col.warning("MISSING_README", "scenario has no readme.txt", README_FILE)
    return col.report()
