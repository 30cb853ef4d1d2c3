import json
from dataclasses import replace

import numpy as np

from aslibkit.generate import GenSpec, generate
from aslibkit.scenario import CVFolds, FeatureTable, RunRecord, validate_scenario
from builders import make_scenario


def base():
    return make_scenario([[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]], cutoff=5000)


def test_clean_fixture_has_no_findings():
    assert len(validate_scenario(base())) == 0


def test_instance_missing_from_features():
    s = base()
    f = s.features
    s = replace(s, features=FeatureTable(f.instances[:2], f.repetitions[:2], f.feature_names, f.values[:2]))
    rep = validate_scenario(s)
    assert "INSTANCE_SET_MISMATCH" in [e.code for e in rep.errors]


def test_fold_zero_is_out_of_range():
    s = base()
    s = replace(s, folds=CVFolds(s.folds.instances, s.folds.repetitions, (0, 1, 2)))
    assert "FOLD_RANGE" in [e.code for e in validate_scenario(s).errors]


def test_non_contiguous_folds():
    s = base()
    s = replace(s, folds=CVFolds(s.folds.instances, s.folds.repetitions, (1, 3, 3)))
    assert "FOLD_RANGE" in [e.code for e in validate_scenario(s).errors]


def test_timeout_under_cutoff_is_a_single_warning():
    s = make_scenario([[3.2, 2.0], [3.0, 4.0]], statuses=[["timeout", "ok"], ["ok", "ok"]], cutoff=5000)
    rep = validate_scenario(s)
    assert rep.errors == []
    assert [w.code for w in rep.warnings] == ["TIMEOUT_UNDER_CUTOFF"]


def test_all_missing_feature_vector_warns():
    s = make_scenario([[1.0], [2.0]], features=[[np.nan], [1.0]])
    assert [w.code for w in validate_scenario(s).warnings] == ["ALL_FEATURES_MISSING"]


def test_duplicate_feature_vectors_warn():
    s = make_scenario([[1.0], [2.0]], features=[[1.0], [1.0]])
    assert "DUPLICATE_FEATURE_VECTOR" in [w.code for w in validate_scenario(s).warnings]


def test_ok_run_without_value_is_an_error():
    s = make_scenario([[np.nan, 1.0]], statuses=[["ok", "ok"]])
    assert "MISSING_VALUE" in [e.code for e in validate_scenario(s).errors]


def test_duplicate_run_and_undeclared_algorithm():
    s = base()
    s = replace(s, runs=s.runs + (s.runs[0], RunRecord("i00", 1, "ghost", (1.0,), "ok")))
    codes = [e.code for e in validate_scenario(s).errors]
    assert "DUPLICATE_RUN" in codes
    assert "ALGORITHM_SET_MISMATCH" in codes


def test_negative_cost_is_an_error():
    s = make_scenario([[1.0], [1.0]], features=[[1.0], [2.0]], costs=[[-1.0], [0.5]])
    assert "NEGATIVE_COST" in [e.code for e in validate_scenario(s).errors]


def test_missing_readme_warns():
    s = replace(base(), readme=None)
    assert [w.code for w in validate_scenario(s).warnings] == ["MISSING_README"]


def test_report_is_pure_and_ordered():
    s = make_scenario([[3.2, 2.0], [3.0, 4.0]], statuses=[["timeout", "ok"], ["ok", "ok"]], cutoff=5000)
    s = replace(s, folds=CVFolds(s.folds.instances, s.folds.repetitions, (0, 2)))
    a, b = validate_scenario(s), validate_scenario(s)
    assert a.to_json() == b.to_json()
    doc = json.loads(a.to_json())
    assert all(set(d) == {"severity", "code", "message", "file", "row"} for d in doc)
    order = ["description.txt", "algorithm_runs.arff", "feature_values.arff", "feature_runstatus.arff",
             "feature_costs.arff", "cv.arff", "readme.txt"]
    files = [order.index(d["file"]) for d in doc if d["file"] in order]
    assert files == sorted(files)


def test_generated_scenarios_validate_cleanly():
    for mode in ("feature_determined", "clustered", "dominant_single", "complementary_pair"):
        s, _ = generate(GenSpec(n_instances=60, planted=mode, presolve_rate=0.1, missing_rate=0.1, seed=3))
        rep = validate_scenario(s)
        assert len(rep) == 0, rep.codes()


def test_performance_view_and_restriction():
    s = base()
    inst, algs, values, status = s.performance()
    assert algs == ("a0", "a1")
    assert values.tolist() == [[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]]
    r = s.restrict_algorithms(["a1"])
    assert r.meta.algorithms == ("a1",)
    assert len(validate_scenario(r)) == 0
