import json
import math

import numpy as np
import pytest
from scipy.cluster.hierarchy import linkage
from scipy.spatial.distance import squareform
from scipy.stats import spearmanr

from aslibkit.eda import (
    average_ranks,
    build_report,
    detect_duplicate_instances,
    dominance_pairs,
    feature_group_summary,
    pct,
    render_feature_group_table,
    spearman_matrix,
    summarize_algorithms,
    ward_linkage,
    write_report,
)
from aslibkit.evaluation import sbs_algorithm
from aslibkit.generate import GenSpec, generate
from aslibkit.preprocess import apply_feature_costs
from aslibkit.scenario import FeatureTable
from builders import make_scenario
from oracles import brute_force_dominance, rank_by_counting, spearman_formula


def test_dominance_examples():
    P = np.array([[1, 2], [2, 2], [3, 4]], dtype=float)
    assert dominance_pairs(P, ["a1", "a2"]) == [("a1", "a2")]
    assert dominance_pairs(np.array([[1, 1], [2, 2.0]]), ["a", "b"]) == []


def test_dominance_matches_brute_force():
    r = np.random.default_rng(0)
    for trial in range(20):
        P = r.integers(0, 3, size=(5, 5)).astype(float)
        names = [f"x{j}" for j in range(5)]
        assert dominance_pairs(P, names) == brute_force_dominance(P.tolist(), names)


def test_dominance_compares_timeouts_at_cutoff():
    s = make_scenario([[5.0, 200.0], [50.0, 300.0]], cutoff=100)
    assert dominance_pairs(s) == [("a0", "a1")]
    s = make_scenario([[200.0, 300.0], [200.0, 300.0]], cutoff=100)
    assert dominance_pairs(s) == []


def test_spearman_examples():
    x = np.array([1.0, 2.0, 3.0, 4.0])
    c = spearman_matrix(np.column_stack([x, 2 * x, -x]), ["a", "b", "c"])
    assert c.rho[0, 1] == 1 and c.rho[0, 2] == -1
    assert np.array_equal(c.rho, c.rho.T) and (np.diag(c.rho) == 1).all()


def test_spearman_with_ties_matches_oracles():
    x = [3.0, 1.0, 4.0, 1.0, 5.0, 9.0]
    y = [2.0, 7.0, 1.0, 8.0, 2.0, 8.0]
    c = spearman_matrix(np.column_stack([x, y]))
    assert average_ranks(np.array(x)).tolist() == rank_by_counting(x)
    assert c.rho[0, 1] == pytest.approx(spearman_formula(x, y), abs=1e-12)
    assert c.rho[0, 1] == pytest.approx(spearmanr(x, y).statistic, abs=1e-12)


def test_spearman_degenerate_column():
    P = np.array([[1.0, 5.0, 2.0], [2.0, 5.0, 1.0], [3.0, 5.0, 3.0]])
    c = spearman_matrix(P, ["a", "b", "c"])
    assert c.degenerate == ("b",)
    assert math.isnan(c.rho[1, 0]) and math.isnan(c.rho[1, 1])
    assert sorted(c.ward_order) == ["a", "c"]


def test_rank_invariance_to_imputed_magnitude():
    r = np.random.default_rng(3)
    rt = r.uniform(1, 150, size=(30, 4))
    lo = spearman_matrix(np.minimum(rt, 101))
    hi = spearman_matrix(np.where(rt > 101, 1e9, rt))
    assert np.array_equal(lo.rho, hi.rho) and lo.ward_order == hi.ward_order


def test_ward_against_scipy():
    r = np.random.default_rng(4)
    for trial in range(10):
        pts = r.normal(size=(7, 3))
        D = np.sqrt(((pts[:, None] - pts[None]) ** 2).sum(axis=2))
        merges, leaves = ward_linkage(D)
        Z = linkage(squareform(D, checks=False), method="ward")
        assert np.allclose([m[2] for m in merges], Z[:, 2], rtol=1e-10)
        assert [m[3] for m in merges] == Z[:, 3].astype(int).tolist()
        assert [tuple(sorted(m[:2])) for m in merges] == [tuple(sorted(map(int, z[:2]))) for z in Z]
        assert sorted(leaves) == list(range(7))


def test_ward_ties_merge_lowest_pair_first():
    D = np.ones((4, 4)) - np.eye(4)
    merges, leaves = ward_linkage(D)
    assert merges[0][:2] == (0, 1)
    assert leaves[:2] == [0, 1] or tuple(leaves[:2]) == (0, 1)


def test_feature_group_percentages():
    steps = [("A", (), ("f1",)), ("B", (), ("f2",))]
    s = make_scenario([[1.0]] * 3, steps=steps, features=np.zeros((3, 2)),
                      step_status=[["ok", "ok"], ["ok", "ok"], ["ok", "crash"]], costs=[[1, 0.5], [2, np.nan], [3, 1.5]])
    rows = feature_group_summary(s)
    assert rows[0]["status_pct"] == {"ok": 100.0}
    assert pct(rows[1]["status_pct"]["ok"]) == "66.67" and pct(rows[1]["status_pct"]["crash"]) == "33.33"
    assert (rows[0]["cost_min"], rows[0]["cost_mean"], rows[0]["cost_max"]) == (1, 2, 3)
    assert pct(rows[1]["missing_cost_pct"]) == "33.33"
    text = render_feature_group_table(rows)
    assert "66.67" in text and "33.33" in text


def test_two_decimal_rendering_of_table_style_shares():
    # 124 of 198 instances ok, the rest crashed
    statuses = [["ok"]] * 124 + [["crash"]] * 74
    s = make_scenario([[1.0]] * 198, step_status=statuses)
    row = feature_group_summary(s)[0]
    assert (pct(row["status_pct"]["ok"]), pct(row["status_pct"]["crash"])) == ("62.63", "37.37")


def test_duplicates():
    t = FeatureTable(("a", "b", "c", "d"), (1, 1, 1, 1), ("x", "y"),
                     np.array([[1, 2], [1, 2], [0, 5], [np.nan, 5]], dtype=float))
    assert detect_duplicate_instances(t) == [["a", "b"]]
    t = FeatureTable(("a", "b"), (1, 1), ("x",), np.array([[np.nan], [0.0]]))
    assert detect_duplicate_instances(t) == []


def test_algorithm_summaries():
    s = make_scenario([[1.0, 200.0], [3.0, 300.0]], cutoff=100)
    a, b = summarize_algorithms(s)
    assert a["mean"] == 2 and a["solved_pct"] == 100
    assert b["solved_pct"] == 0 and b["mean"] == 100
    assert a["cdf"][-1] == (3.0, 1.0)
    assert b["status_counts"] == {"timeout": 2}
    assert a["box"]["min"] == 1 and a["box"]["max"] == 3


def test_dominated_never_sbs():
    for seed in range(5):
        s, _ = generate(GenSpec(n_instances=60, planted="dominant_single", seed=seed))
        dominated = {b for _, b in dominance_pairs(s)}
        assert sbs_algorithm(apply_feature_costs(s, steps=[])) not in dominated


def test_report_files_and_idempotence(tmp_path):
    s, _ = generate(GenSpec(n_instances=40, seed=1, missing_rate=0.1))
    rep = build_report(s)
    files = write_report(rep, tmp_path / "out")
    names = {p.rsplit("/", 1)[-1] for p in map(str, files)}
    assert {"report.json", "algorithms.csv", "dominance.csv", "spearman.csv", "boxplot.svg", "spearman.svg"} <= names
    first = {n: (tmp_path / "out" / n).read_bytes() for n in names}
    write_report(build_report(s), tmp_path / "out")
    assert first == {n: (tmp_path / "out" / n).read_bytes() for n in names}
    d = json.loads(first["report.json"])
    assert sorted(d["correlation"]["ward_order"]) == sorted(s.meta.algorithms)
    assert "ward order:" in rep.text() and "algo_1" in rep.text()
