"""Small hand-built scenarios for tests."""

from __future__ import annotations

import math

import numpy as np

from aslibkit.scenario import (
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


def make_scenario(
    runtimes,
    statuses=None,
    cutoff=100.0,
    algorithms=None,
    instances=None,
    steps=None,
    features=None,
    step_status=None,
    costs=None,
    folds=None,
    readme="fixture\n",
):
    """Scenario from dense arrays.

    ``runtimes`` is instances x algorithms (NaN = missing value); ``statuses``
    defaults to ok where the runtime is present and below the cutoff, timeout
    otherwise. ``steps`` is a list of (name, requires, provides).
    """
    rt = np.asarray(runtimes, dtype=float)
    n, m = rt.shape
    instances = tuple(instances or (f"i{r:02d}" for r in range(n)))
    algorithms = tuple(algorithms or (f"a{j}" for j in range(m)))
    if statuses is None:
        statuses = [["ok" if (not math.isnan(v) and v < cutoff) else "timeout" for v in row] for row in rt]
    if steps is None:
        steps = [("s1", (), ("f1",))]
    steps = tuple(FeatureStep(name, tuple(req), tuple(prov)) for name, req, prov in steps)
    feature_names = tuple(f for s in steps for f in s.provides)
    if features is None:
        features = np.arange(n * len(feature_names), dtype=float).reshape(n, len(feature_names))
    features = np.asarray(features, dtype=float).reshape(n, len(feature_names))
    if step_status is None:
        step_status = [["ok"] * len(steps) for _ in range(n)]
    if folds is None:
        folds = [r % 2 + 1 for r in range(n)]
    meta = MetaInfo(
        scenario_id="fixture",
        measures=(PerformanceMeasure("runtime", "runtime", False),),
        algorithm_cutoff_time=float(cutoff),
        algorithms=algorithms,
        feature_names=feature_names,
        feature_steps=steps,
        default_steps=tuple(s.name for s in steps),
    )
    runs = tuple(
        RunRecord(instances[i], 1, algorithms[j], (None if math.isnan(rt[i, j]) else float(rt[i, j]),), statuses[i][j])
        for i in range(n)
        for j in range(m)
    )
    ones = (1,) * n
    step_names = tuple(s.name for s in steps)
    return Scenario(
        meta=meta,
        runs=runs,
        features=FeatureTable(instances, ones, feature_names, features),
        feature_status=FeatureStepStatusTable(instances, ones, step_names, tuple(tuple(r) for r in step_status)),
        folds=CVFolds(instances, ones, tuple(folds)),
        feature_costs=None if costs is None else FeatureCostTable(instances, ones, step_names, np.asarray(costs, dtype=float)),
        readme=readme,
    )


CORPUS_DIR = __import__("pathlib").Path(__file__).parent / "corpus"


def corpus_outcome(path):
    """(first code, line, all codes) from parsing one adversarial file.

    ARFF files go through the ARFF parser; description files through the
    description parser and then metadata validation (cycles surface there).
    """
    from aslibkit.arff import parse_arff
    from aslibkit.description import parse_description
    from aslibkit.errors import FormatError
    from aslibkit.scenario import validate_meta

    data = path.read_bytes()
    try:
        if path.suffix == ".arff":
            parse_arff(data)
            return None, None, []
        report = validate_meta(parse_description(data))
    except FormatError as exc:
        return exc.code, exc.line, [exc.code]
    codes = [f.code for f in report.errors]
    return (codes[0] if codes else None), None, codes
