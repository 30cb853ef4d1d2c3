"""Selection metrics, VBS/SBS baselines, cross-validation and submission scoring."""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from ._util import derive_seed, exact_mean, json_float, lex_argmin
from .errors import EvaluationError, SubmissionError
from .preprocess import PreparedData, aggregate_repetitions, apply_feature_costs
from .scenario import CVFolds, Scenario

BUDGET_TOL = 1e-9


@dataclass(frozen=True)
class ScheduleEntry:
    algorithm_id: str
    budget: float


@dataclass(frozen=True)
class SelectionOutput:
    """Per-instance ordered schedules; length-1 schedules are plain selection."""

    schedules: Mapping[str, tuple[ScheduleEntry, ...]]

    @classmethod
    def single(cls, choices: Mapping[str, str], cutoff: float) -> "SelectionOutput":
        return cls({inst: (ScheduleEntry(alg, float(cutoff)),) for inst, alg in choices.items()})

    def __getitem__(self, instance: str) -> tuple[ScheduleEntry, ...]:
        return self.schedules[instance]

    def __len__(self):
        return len(self.schedules)

    def merged(self, other: "SelectionOutput") -> "SelectionOutput":
        out = dict(self.schedules)
        out.update(other.schedules)
        return SelectionOutput(out)


@dataclass(frozen=True)
class InstanceResult:
    instance_id: str
    time: float
    solved: bool
    par: float
    mcp: float
    presolved: bool = False

    def to_dict(self) -> dict:
        return {
            "instance_id": self.instance_id,
            "time": self.time,
            "solved": self.solved,
            "par": self.par,
            "mcp": self.mcp,
            "presolved": self.presolved,
        }


@dataclass(frozen=True)
class EvaluationReport:
    solved_fraction: float
    par_k: float
    mcp: float
    n_instances: int
    k: float
    per_instance: tuple[InstanceResult, ...] = field(repr=False)

    @classmethod
    def from_results(cls, results: Sequence[InstanceResult], k: float) -> "EvaluationReport":
        results = tuple(sorted(results, key=lambda r: r.instance_id))
        n = len(results)
        if n == 0:
            return cls(math.nan, math.nan, math.nan, 0, k, ())
        return cls(
            solved_fraction=sum(r.solved for r in results) / n,
            par_k=exact_mean(r.par for r in results),
            mcp=exact_mean(r.mcp for r in results),
            n_instances=n,
            k=k,
            per_instance=results,
        )

    @property
    def par10(self) -> float:
        return self.par_k

    def to_dict(self, per_instance: bool = False) -> dict:
        d = {
            "solved_fraction": json_float(self.solved_fraction),
            "par_k": json_float(self.par_k),
            "mcp": json_float(self.mcp),
            "n_instances": self.n_instances,
            "k": self.k,
        }
        if per_instance:
            d["per_instance"] = [r.to_dict() for r in self.per_instance]
        return d


def _check_selection(prepared: PreparedData, raw: Scenario | None, selection: SelectionOutput):
    wanted = set(prepared.instances)
    got = set(selection.schedules)
    if wanted - got:
        missing = sorted(wanted - got)
        raise EvaluationError("COVERAGE", f"{len(missing)} instances have no schedule, e.g. {missing[:3]}")
    if got - wanted:
        extra = sorted(got - wanted)
        raise EvaluationError("COVERAGE", f"{len(extra)} scheduled instances are not evaluated, e.g. {extra[:3]}")
    known = set(prepared.algorithms)
    declared = set(raw.meta.algorithms) if raw is not None else known
    for inst in prepared.instances:
        sched = selection.schedules[inst]
        if not sched:
            raise EvaluationError("COVERAGE", f"instance {inst!r} has an empty schedule")
        total = 0.0
        for e in sched:
            if e.algorithm_id not in known or e.algorithm_id not in declared:
                raise EvaluationError("UNKNOWN_ALGORITHM", f"{e.algorithm_id!r} (instance {inst!r})")
            if not (e.budget > 0) or e.budget > prepared.cutoff * (1 + BUDGET_TOL):
                raise EvaluationError("BUDGET", f"budget {e.budget!r} outside (0, cutoff] for instance {inst!r}")
            total += e.budget
        if total > prepared.cutoff * (1 + BUDGET_TOL):
            raise EvaluationError("BUDGET", f"schedule for {inst!r} totals {total:g} > cutoff {prepared.cutoff:g}")


def evaluate_selection(
    prepared: PreparedData, raw: Scenario | None, selection: SelectionOutput, k: float = 10.0
) -> EvaluationReport:
    """Score per-instance schedules with feature costs charged to the selector.

    Each instance first pays its feature cost; schedule entries then run in
    order, each charged min(budget, runtime). The instance is solved by the
    first entry whose run succeeded within its budget and within the cutoff
    overall. Unsolved instances score ``k * cutoff``. MCP compares the achieved
    time (cutoff if unsolved) with the best cost-free time, and is 0 on
    presolved instances.
    """
    _check_selection(prepared, raw, selection)
    cutoff = prepared.cutoff
    col = {a: j for j, a in enumerate(prepared.algorithms)}
    oracle = prepared.oracle_times()
    results = []
    for i, inst in enumerate(prepared.instances):
        cost = float(prepared.feature_cost_used[i])
        if prepared.presolved[i]:
            solved = cost <= cutoff
            time = min(cost, cutoff)
            results.append(InstanceResult(inst, time, solved, time if solved else k * cutoff, 0.0, True))
            continue
        total = cost
        solved = False
        for e in selection.schedules[inst]:
            j = col[e.algorithm_id]
            rt = prepared.runtimes[i, j]
            rt = e.budget if math.isnan(rt) else float(rt)
            if prepared.raw_ok[i, j] and rt <= e.budget and total + rt <= cutoff:
                total += rt
                solved = True
                break
            total += min(e.budget, rt)
        time = total if solved else cutoff
        results.append(InstanceResult(inst, time, solved, time if solved else k * cutoff, time - float(oracle[i]), False))
    return EvaluationReport.from_results(results, k)


def _fixed_choice_report(prepared: PreparedData, choice: Sequence[int], k: float) -> EvaluationReport:
    """Cost-free report for one algorithm index per instance."""
    t = prepared.baseline_times()
    oracle = prepared.oracle_times()
    results = []
    for i, inst in enumerate(prepared.instances):
        v = t[i, choice[i]]
        solved = not math.isnan(v)
        time = float(v) if solved else prepared.cutoff
        mcp = 0.0 if prepared.presolved[i] else time - float(oracle[i])
        results.append(InstanceResult(inst, time, solved, time if solved else k * prepared.cutoff, mcp, bool(prepared.presolved[i])))
    return EvaluationReport.from_results(results, k)


def vbs_baseline(prepared: PreparedData, raw: Scenario | None = None, k: float = 10.0) -> EvaluationReport:
    """Virtual best solver: per-instance best algorithm, no feature costs."""
    par = prepared.baseline_par(k)
    choice = np.atleast_1d(lex_argmin(par, prepared.algorithms)) if len(prepared.instances) else []
    rep = _fixed_choice_report(prepared, choice, k)
    # zero by definition; the per-instance values above already are 0
    return EvaluationReport(rep.solved_fraction, rep.par_k, 0.0, rep.n_instances, k, rep.per_instance)


def sbs_algorithm(prepared: PreparedData, k: float = 10.0) -> str:
    par = prepared.baseline_par(k)
    totals = np.array([math.fsum(par[:, j]) for j in range(par.shape[1])])
    return prepared.algorithms[lex_argmin(totals, prepared.algorithms)]


def sbs_baseline(prepared: PreparedData, raw: Scenario | None = None, k: float = 10.0) -> tuple[str, EvaluationReport]:
    """Single best solver by cost-free PAR-k, ties broken by algorithm id."""
    alg = sbs_algorithm(prepared, k)
    j = prepared.algorithms.index(alg)
    return alg, _fixed_choice_report(prepared, [j] * len(prepared.instances), k)


def gap_closed(selector_par10: float, sbs_par10: float, vbs_par10: float) -> float:
    """Fraction of the SBS-VBS gap closed; NaN when the gap is zero."""
    denom = sbs_par10 - vbs_par10
    if denom == 0 or math.isnan(denom):
        return math.nan
    return (sbs_par10 - selector_par10) / denom


# --------------------------------------------------------------------------- cross-validation


@dataclass(frozen=True)
class FoldResult:
    fold: int
    report: EvaluationReport
    selection: SelectionOutput = field(repr=False)


@dataclass(frozen=True)
class CVResult:
    scenario_id: str
    measure: str
    k: float
    per_fold: tuple[FoldResult, ...]
    pooled: EvaluationReport
    vbs: EvaluationReport
    sbs: EvaluationReport
    sbs_algorithm: str
    prepared: PreparedData = field(repr=False)

    @property
    def gap_closed(self) -> float:
        return gap_closed(self.pooled.par_k, self.sbs.par_k, self.vbs.par_k)

    @property
    def selection(self) -> SelectionOutput:
        out = SelectionOutput({})
        for f in self.per_fold:
            out = out.merged(f.selection)
        return out

    def to_dict(self) -> dict:
        return {
            "scenario_id": self.scenario_id,
            "measure": self.measure,
            "k": self.k,
            "solved_fraction": json_float(self.pooled.solved_fraction),
            "par10": json_float(self.pooled.par_k),
            "mcp": json_float(self.pooled.mcp),
            "gap_closed": json_float(self.gap_closed),
            "vbs": self.vbs.to_dict(),
            "sbs": dict(self.sbs.to_dict(), algorithm=self.sbs_algorithm),
            "per_fold": [dict(f.report.to_dict(), fold=f.fold) for f in self.per_fold],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _fold_indices(prepared: PreparedData, folds: CVFolds) -> dict[int, np.ndarray]:
    fold_of = folds.fold_of()
    missing = [i for i in prepared.instances if i not in fold_of]
    if missing:
        raise EvaluationError("COVERAGE", f"{len(missing)} instances have no fold, e.g. {missing[:3]}")
    out: dict[int, list[int]] = {}
    for n, inst in enumerate(prepared.instances):
        out.setdefault(fold_of[inst], []).append(n)
    return {f: np.array(rows, dtype=int) for f, rows in sorted(out.items())}


def cross_validate(
    scenario: Scenario,
    selector_spec,
    folds: CVFolds | None = None,
    k: float = 10.0,
    threads: int = 1,
    measure: str | None = None,
) -> CVResult:
    """Train on all folds but one, select on the held-out fold, pool results.

    Preprocessing state is fitted on the training part of each split. The
    seed of each split derives from the selector seed and the held-out
    instance ids, so fold labels are nominal and thread count is irrelevant.
    """
    from .selectors import SelectorSpec, parse_selector_spec, select_many, train_selector

    spec = parse_selector_spec(selector_spec) if isinstance(selector_spec, str) else selector_spec
    assert isinstance(spec, SelectorSpec)
    scenario = aggregate_repetitions(scenario)
    prepared = prepare_for_spec(scenario, spec, measure)
    fold_rows = _fold_indices(prepared, folds or scenario.folds)
    if len(fold_rows) < 2:
        raise EvaluationError("FOLDS", "cross-validation needs at least two folds")

    def run(item):
        fold, test = item
        train = np.setdiff1d(np.arange(prepared.n_instances), test)
        seed = derive_seed(spec.seed, "fold", tuple(prepared.instances[r] for r in test))
        test_data = prepared.subset(test)
        model = train_selector(prepared.subset(train), spec, k=k, seed=seed, leak=prepared)
        sel = select_many(model, test_data)
        return FoldResult(fold, evaluate_selection(test_data, scenario, sel, k), sel)

    items = list(fold_rows.items())
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            per_fold = list(pool.map(run, items))
    else:
        per_fold = [run(it) for it in items]
    pooled = EvaluationReport.from_results([r for f in per_fold for r in f.report.per_instance], k)
    alg, sbs = sbs_baseline(prepared, scenario, k)
    return CVResult(
        scenario_id=scenario.meta.scenario_id,
        measure=prepared.measure,
        k=k,
        per_fold=tuple(per_fold),
        pooled=pooled,
        vbs=vbs_baseline(prepared, scenario, k),
        sbs=sbs,
        sbs_algorithm=alg,
        prepared=prepared,
    )


def prepare_for_spec(scenario: Scenario, spec, measure: str | None = None) -> PreparedData:
    """PreparedData for the steps/features a selector consumes."""
    if spec.approach in ("sbs_constant", "oracle_cheat"):
        return apply_feature_costs(scenario, steps=[], measure=measure)
    steps = spec.steps_used
    if spec.features_used is not None:
        owner = scenario.meta.step_of_feature()
        steps = scenario.meta.step_closure({owner[f] for f in spec.features_used})
    return apply_feature_costs(
        scenario, steps=steps, measure=measure, features=spec.features_used, variance_threshold=spec.variance_threshold
    )


# --------------------------------------------------------------------------- submissions

SUBMISSION_HEADER = ["instance_id", "position", "algorithm", "budget"]


def read_submission(path) -> SelectionOutput:
    """Parse a submission CSV (instance_id,position,algorithm,budget)."""
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise SubmissionError("IO", str(exc), file=str(path)) from None
    except csv.Error as exc:
        raise SubmissionError("SYNTAX", str(exc), file=str(path)) from None
    if not rows or [c.strip() for c in rows[0]] != SUBMISSION_HEADER:
        raise SubmissionError("SYNTAX", f"header must be {','.join(SUBMISSION_HEADER)}", file=str(path), line=1)
    entries: dict[str, list[tuple[int, ScheduleEntry, int]]] = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 4:
            raise SubmissionError("SYNTAX", f"expected 4 fields, got {len(row)}", file=str(path), line=lineno)
        inst, pos, alg, budget = (c.strip() for c in row)
        try:
            pos_i = int(pos)
        except ValueError:
            raise SubmissionError("SYNTAX", f"position {pos!r} is not an integer", file=str(path), line=lineno) from None
        try:
            b = float(budget)
        except ValueError:
            raise SubmissionError("SYNTAX", f"budget {budget!r} is not a number", file=str(path), line=lineno) from None
        if not inst or not alg:
            raise SubmissionError("SYNTAX", "empty instance or algorithm", file=str(path), line=lineno)
        entries.setdefault(inst, []).append((pos_i, ScheduleEntry(alg, b), lineno))
    schedules = {}
    for inst, items in entries.items():
        items.sort(key=lambda t: t[0])
        positions = [p for p, _, _ in items]
        if positions != list(range(1, len(items) + 1)):
            raise SubmissionError(
                "SYNTAX", f"positions for {inst!r} must be 1..{len(items)}, got {positions}", file=str(path), line=items[0][2]
            )
        schedules[inst] = tuple(e for _, e, _ in items)
    return SelectionOutput(schedules)


def write_submission(selection: SelectionOutput, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUBMISSION_HEADER)
        for inst in sorted(selection.schedules):
            for pos, e in enumerate(selection.schedules[inst], start=1):
                w.writerow([inst, pos, e.algorithm_id, repr(float(e.budget))])


def score_submission(
    scenario: Scenario,
    submission_file,
    test_folds: Sequence[int] | None = None,
    steps: Sequence[str] | None = None,
    k: float = 10.0,
    measure: str | None = None,
) -> dict:
    """Solved fraction, PAR10 and MCP of a submitted schedule file.

    Evaluated on the instances of ``test_folds`` (all folds when None) with
    the feature costs of ``steps`` (default feature steps when None).
    """
    selection = read_submission(submission_file) if not isinstance(submission_file, SelectionOutput) else submission_file
    scenario = aggregate_repetitions(scenario)
    prepared = apply_feature_costs(scenario, steps=steps, measure=measure)
    if test_folds is not None:
        fold_of = scenario.folds.fold_of()
        wanted = set(int(f) for f in test_folds)
        rows = [n for n, inst in enumerate(prepared.instances) if fold_of.get(inst) in wanted]
        prepared = prepared.subset(rows)
    rep = evaluate_selection(prepared, scenario, selection, k)
    return {"solved_fraction": rep.solved_fraction, "par10": rep.par_k, "mcp": rep.mcp}
