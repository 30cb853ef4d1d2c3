"""Greedy forward selection of algorithms or features by cross-validated PAR10."""

from __future__ import annotations

import json
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Sequence

from ._util import json_float
from .evaluation import cross_validate
from .preprocess import resolve_steps
from .scenario import CVFolds, Scenario
from .selectors import SelectorSpec, parse_selector_spec

KINDS = ("algorithms", "features")


@dataclass(frozen=True)
class ForwardSelectionResult:
    kind: str
    selected: tuple[str, ...]
    score_trace: tuple[float, ...]
    baseline_score: float
    n_candidates: int

    @property
    def score(self) -> float:
        return self.score_trace[-1]

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "selected": list(self.selected),
            "score_trace": [json_float(s) for s in self.score_trace],
            "baseline_score": json_float(self.baseline_score),
            "reduced_score": json_float(self.score),
            "full_size": self.n_candidates,
            "reduced_size": len(self.selected),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def table(self) -> str:
        """Two columns, full set vs reduced set, for PAR10 and set size."""
        rows = [
            ("", "full", "reduced"),
            ("PAR10", f"{self.baseline_score:.2f}", f"{self.score:.2f}"),
            (f"#{self.kind}", str(self.n_candidates), str(len(self.selected))),
        ]
        w0 = max(len(r[0]) for r in rows)
        w1 = max(len(r[1]) for r in rows)
        w2 = max(len(r[2]) for r in rows)
        return "\n".join(f"{a:<{w0}}  {b:>{w1}}  {c:>{w2}}" for a, b, c in rows) + "\n"


def candidate_features(scenario: Scenario, spec: SelectorSpec) -> tuple[str, ...]:
    steps = resolve_steps(scenario.meta, spec.steps_used)
    owner = scenario.meta.step_of_feature()
    return tuple(f for f in scenario.meta.feature_names if owner.get(f) in steps)


def subset_score(scenario: Scenario, kind: str, subset: Sequence[str], spec: SelectorSpec,
                 folds: CVFolds | None = None, k: float = 10.0, threads: int = 1, measure: str | None = None) -> float:
    """Cross-validated PAR-k of ``spec`` restricted to ``subset``."""
    if kind == "algorithms":
        sc = scenario.restrict_algorithms(subset)
        sp = spec
    else:
        sc = scenario
        sp = replace(spec, features_used=tuple(subset), steps_used=None)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return cross_validate(sc, sp, folds, k=k, threads=threads, measure=measure).pooled.par_k


def forward_select(
    scenario: Scenario,
    kind: str,
    selector_spec,
    epsilon: float = 1.0,
    folds: CVFolds | None = None,
    k: float = 10.0,
    threads: int = 1,
    measure: str | None = None,
) -> ForwardSelectionResult:
    """Start empty; add the candidate with the lowest CV score while it improves by at least ``epsilon``.

    The first candidate is always taken. Equal scores go to the
    lexicographically smallest candidate. For features, a step's cost is
    paid once any of its features is in the set.
    """
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    spec = parse_selector_spec(selector_spec) if isinstance(selector_spec, (str, dict)) else selector_spec
    if kind == "algorithms":
        candidates = tuple(scenario.meta.algorithms)
    else:
        candidates = candidate_features(scenario, spec)
    if not candidates:
        raise ValueError("no candidates to select from")

    def score(subset):
        return subset_score(scenario, kind, subset, spec, folds, k, 1, measure)

    baseline = subset_score(scenario, kind, candidates, spec, folds, k, threads, measure)
    selected: list[str] = []
    trace: list[float] = []
    current = math.inf
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        while len(selected) < len(candidates):
            remaining = sorted(c for c in candidates if c not in selected)
            subsets = [_ordered(selected + [c], candidates) for c in remaining]
            scores = list(pool.map(score, subsets)) if pool else [score(s) for s in subsets]
            best = min(range(len(remaining)), key=lambda n: (scores[n], remaining[n]))
            if selected and current - scores[best] < epsilon:
                break
            selected.append(remaining[best])
            current = scores[best]
            trace.append(current)
    finally:
        if pool:
            pool.shutdown()
    return ForwardSelectionResult(kind, tuple(selected), tuple(trace), baseline, len(candidates))


def _ordered(subset, candidates):
    chosen = set(subset)
    return [c for c in candidates if c in chosen]
