"""Exploratory analysis of a scenario: summaries, dominance, correlation, feature groups."""

from __future__ import annotations

import csv
import json
import math
import os
from collections import Counter
from dataclasses import dataclass

import numpy as np

from ._util import json_float
from .preprocess import aggregate_repetitions
from .scenario import RUN_STATUSES, STEP_STATUSES, FeatureTable, Scenario


def pct(x: float) -> str:
    """Percentages are shown with two decimals."""
    return f"{x:.2f}"


def performance_matrix(scenario: Scenario, measure: str | None = None):
    """(instances, algorithms, P, status) with failed runs imputed.

    For runtime measures every run that is not ``ok`` (or lacks a value)
    counts as the cutoff. For other measures, missing values get a value worse
    than every observed one. ``P`` is in minimisation form.
    """
    sc = aggregate_repetitions(scenario)
    m = sc.meta.measure(measure)
    instances, algorithms, values, status = sc.performance(m.name)
    ok = (status == "ok") & ~np.isnan(values)
    if m.kind == "runtime":
        cutoff = float(sc.meta.algorithm_cutoff_time)
        P = np.where(ok, np.minimum(values, cutoff), cutoff)
    else:
        present = values[~np.isnan(values)]
        worst = (present.max() + abs(present.max()) + 1.0) if present.size else 1.0
        P = np.where(np.isnan(values), worst, values)
    return instances, algorithms, P, status


def _matrix_args(data, algorithms, measure):
    if isinstance(data, Scenario):
        _, algorithms, P, _ = performance_matrix(data, measure)
        return np.asarray(P, dtype=float), tuple(algorithms)
    P = np.asarray(data, dtype=float)
    if algorithms is None:
        algorithms = tuple(f"a{j + 1}" for j in range(P.shape[1]))
    return P, tuple(algorithms)


def dominance_pairs(data, algorithms=None, measure: str | None = None) -> list[tuple[str, str]]:
    """Pairs (a, b) where a is never worse than b and strictly better at least once.

    ``data`` is a Scenario or an instances x algorithms matrix (minimised).
    """
    P, names = _matrix_args(data, algorithms, measure)
    le = (P[:, :, None] <= P[:, None, :]).all(axis=0)
    lt = (P[:, :, None] < P[:, None, :]).any(axis=0)
    dom = le & lt
    pairs = [(names[a], names[b]) for a, b in zip(*np.nonzero(dom))]
    return sorted(pairs)


def average_ranks(x: np.ndarray) -> np.ndarray:
    """1-based ranks; tied values share the mean of their positions."""
    x = np.asarray(x, dtype=float)
    order = np.argsort(x, kind="stable")
    xs = x[order]
    ranks = np.empty(len(x))
    start = 0
    while start < len(x):
        end = start
        while end + 1 < len(x) and xs[end + 1] == xs[start]:
            end += 1
        ranks[order[start:end + 1]] = (start + end) / 2.0 + 1.0
        start = end + 1
    return ranks


@dataclass(frozen=True)
class Correlation:
    algorithms: tuple[str, ...]
    rho: np.ndarray
    ward_order: tuple[str, ...]
    degenerate: tuple[str, ...]
    linkage: tuple[tuple[int, int, float, int], ...]

    def to_dict(self) -> dict:
        return {
            "algorithms": list(self.algorithms),
            "rho": [[json_float(v) for v in row] for row in self.rho],
            "ward_order": list(self.ward_order),
            "degenerate": list(self.degenerate),
        }


def spearman_matrix(data, algorithms=None, measure: str | None = None) -> Correlation:
    """Spearman rank correlation between algorithms plus a Ward leaf order.

    Constant algorithms have undefined correlation: their cells are NaN and
    they are left out of the clustering.
    """
    P, names = _matrix_args(data, algorithms, measure)
    if P.shape[0] < 2:
        raise ValueError("need at least two instances")
    m = P.shape[1]
    R = np.column_stack([average_ranks(P[:, j]) for j in range(m)]) if m else np.zeros((P.shape[0], 0))
    C = R - R.mean(axis=0)
    ss = [math.fsum(C[:, j] * C[:, j]) for j in range(m)]
    rho = np.full((m, m), np.nan)
    for a in range(m):
        if ss[a] == 0:
            continue
        rho[a, a] = 1.0
        for b in range(a + 1, m):
            if ss[b] == 0:
                continue
            r = math.fsum(C[:, a] * C[:, b]) / math.sqrt(ss[a] * ss[b])
            rho[a, b] = rho[b, a] = min(1.0, max(-1.0, r))
    good = [j for j in range(m) if ss[j] > 0]
    if good:
        D = 1.0 - rho[np.ix_(good, good)]
        np.fill_diagonal(D, 0.0)
        Z, leaves = ward_linkage(D)
        order = tuple(names[good[i]] for i in leaves)
    else:
        Z, order = (), ()
    return Correlation(names, rho, order, tuple(names[j] for j in range(m) if ss[j] == 0), tuple(Z))


def ward_linkage(D: np.ndarray):
    """Agglomerative Ward clustering on a symmetric distance matrix.

    Uses the Lance-Williams update. Each step merges the closest pair; ties
    go to the pair with the lowest cluster ids. Cluster ``n + s`` is the one
    formed at step ``s``. Returns (merges as (lo, hi, height, size), leaf order).
    """
    D = np.asarray(D, dtype=float)
    n = D.shape[0]
    if n == 1:
        return [], [0]
    size = {i: 1 for i in range(n)}
    dist = {(i, j): float(D[i, j]) for i in range(n) for j in range(i + 1, n)}
    children = {}
    active = list(range(n))
    merges = []
    for s in range(n - 1):
        (u, v), h = min(dist.items(), key=lambda kv: (kv[1], kv[0]))
        new = n + s
        children[new] = (u, v)
        nu, nv = size[u], size[v]
        active = [c for c in active if c not in (u, v)]
        for w in active:
            nw = size[w]
            duw = dist[(min(u, w), max(u, w))]
            dvw = dist[(min(v, w), max(v, w))]
            val = ((nu + nw) * duw * duw + (nv + nw) * dvw * dvw - nw * h * h) / (nu + nv + nw)
            dist[(w, new)] = math.sqrt(max(val, 0.0))
        dist = {key: d for key, d in dist.items() if u not in key and v not in key}
        size[new] = nu + nv
        active.append(new)
        merges.append((u, v, h, nu + nv))
    leaves = []
    stack = [2 * n - 2]
    while stack:
        c = stack.pop()
        if c < n:
            leaves.append(c)
        else:
            left, right = children[c]
            stack.append(right)
            stack.append(left)
    return merges, leaves


def feature_group_summary(scenario: Scenario) -> list[dict]:
    """Per feature step: feature count, status shares, cost statistics and missing-cost share."""
    meta = scenario.meta
    st = scenario.feature_status
    fc = scenario.feature_costs
    out = []
    for step in meta.feature_steps:
        col = st.steps.index(step.name) if step.name in st.steps else None
        statuses = [row[col] for row in st.status] if col is not None else []
        counts = Counter(statuses)
        total = len(statuses)
        status_pct = {s: 100.0 * counts[s] / total for s in STEP_STATUSES if counts.get(s)} if total else {}
        entry = {
            "step": step.name,
            "n_features": len(step.provides),
            "requires": list(step.requires),
            "status_pct": status_pct,
            "cost_min": None,
            "cost_mean": None,
            "cost_max": None,
            "missing_cost_pct": 100.0,
        }
        if fc is not None and step.name in fc.steps:
            c = fc.costs[:, fc.steps.index(step.name)]
            present = c[~np.isnan(c)]
            if present.size:
                entry["cost_min"] = float(present.min())
                entry["cost_mean"] = math.fsum(present) / present.size
                entry["cost_max"] = float(present.max())
            entry["missing_cost_pct"] = 100.0 * (c.size - present.size) / c.size if c.size else 0.0
        out.append(entry)
    return out


def render_feature_group_table(rows: list[dict]) -> str:
    statuses = [s for s in STEP_STATUSES if any(s in r["status_pct"] for r in rows)]
    header = ["step", "#features"] + [f"{s}[%]" for s in statuses] + ["cost min", "cost mean", "cost max", "missing[%]"]
    lines = [header]
    for r in rows:
        def fmt(v):
            return "-" if v is None else f"{v:.2f}"
        lines.append(
            [r["step"], str(r["n_features"])]
            + [pct(r["status_pct"].get(s, 0.0)) for s in statuses]
            + [fmt(r["cost_min"]), fmt(r["cost_mean"]), fmt(r["cost_max"]), pct(r["missing_cost_pct"])]
        )
    return _table(lines)


def _table(lines) -> str:
    widths = [max(len(row[c]) for row in lines) for c in range(len(lines[0]))]
    return "\n".join("  ".join(v.ljust(w) if c == 0 else v.rjust(w) for c, (v, w) in enumerate(zip(row, widths)))
                     for row in lines) + "\n"


def detect_duplicate_instances(features: FeatureTable | Scenario) -> list[list[str]]:
    """Groups of instances with identical raw feature vectors (missing cells must line up)."""
    if isinstance(features, Scenario):
        features = features.features
    first = {}
    for r, (inst, rep) in enumerate(zip(features.instances, features.repetitions)):
        if inst not in first or rep < first[inst][0]:
            first[inst] = (rep, r)
    groups: dict[tuple, list[str]] = {}
    for inst, (_, r) in first.items():
        row = features.values[r]
        key = tuple(("?",) if math.isnan(v) else (float(v),) for v in row)
        groups.setdefault(key, []).append(inst)
    dups = [sorted(g) for g in groups.values() if len(g) >= 2]
    return sorted(dups)


def summarize_algorithms(scenario: Scenario, measure: str | None = None) -> list[dict]:
    """Mean/sd/median (failures at the cutoff), solved share, status counts, CDF and box data."""
    sc = aggregate_repetitions(scenario)
    m = sc.meta.measure(measure)
    instances, algorithms, P, status = performance_matrix(sc, m.name)
    _, _, values, _ = sc.performance(m.name)
    cutoff = float(sc.meta.algorithm_cutoff_time)
    n = len(instances)
    sign = -1.0 if m.maximize else 1.0
    out = []
    for j, a in enumerate(algorithms):
        col = P[:, j]
        st = [s if s is not None else "missing" for s in status[:, j]]
        ok = np.array([s == "ok" for s in st]) & ~np.isnan(values[:, j])
        if m.kind == "runtime":
            ok &= values[:, j] <= cutoff
        shown = sign * col
        counts = Counter(st)
        solved_times = np.sort(col[ok]) if m.kind == "runtime" else np.zeros(0)
        cdf = []
        for idx, t in enumerate(solved_times):
            if idx + 1 < len(solved_times) and solved_times[idx + 1] == t:
                continue
            cdf.append((float(t), (idx + 1) / n))
        q = np.percentile(shown, [0, 25, 50, 75, 100]) if n else [math.nan] * 5
        out.append({
            "algorithm": a,
            "n": n,
            "mean": math.fsum(shown) / n if n else math.nan,
            "sd": float(np.std(shown, ddof=1)) if n > 1 else math.nan,
            "median": float(np.median(shown)) if n else math.nan,
            "solved_pct": 100.0 * int(ok.sum()) / n if n else math.nan,
            "status_counts": {s: counts[s] for s in list(RUN_STATUSES) + ["missing"] if counts.get(s)},
            "cdf": cdf,
            "box": {"min": float(q[0]), "q1": float(q[1]), "median": float(q[2]), "q3": float(q[3]), "max": float(q[4])},
        })
    return out


@dataclass(frozen=True)
class EdaReport:
    scenario_id: str
    measure: str
    algorithm_summaries: list
    dominance_pairs: list
    correlation: Correlation | None
    feature_group_summaries: list
    duplicate_groups: list

    def to_dict(self) -> dict:
        def clean(obj):
            if isinstance(obj, float):
                return json_float(obj)
            if isinstance(obj, dict):
                return {k: clean(v) for k, v in obj.items()}
            if isinstance(obj, (list, tuple)):
                return [clean(v) for v in obj]
            return obj

        return clean({
            "scenario_id": self.scenario_id,
            "measure": self.measure,
            "algorithm_summaries": self.algorithm_summaries,
            "dominance_pairs": [list(p) for p in self.dominance_pairs],
            "correlation": None if self.correlation is None else self.correlation.to_dict(),
            "feature_group_summaries": self.feature_group_summaries,
            "duplicate_groups": self.duplicate_groups,
        })

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def text(self) -> str:
        lines = [f"scenario {self.scenario_id} (measure {self.measure})", ""]
        rows = [["algorithm", "mean", "sd", "median", "solved[%]"]]
        for s in self.algorithm_summaries:
            rows.append([s["algorithm"], f"{s['mean']:.2f}", f"{s['sd']:.2f}", f"{s['median']:.2f}", pct(s["solved_pct"])])
        lines.append(_table(rows))
        lines.append("dominance: " + (", ".join(f"{a} > {b}" for a, b in self.dominance_pairs) or "none"))
        if self.correlation is not None:
            lines.append("ward order: " + " ".join(self.correlation.ward_order))
        lines.append("")
        lines.append(render_feature_group_table(self.feature_group_summaries))
        lines.append(f"duplicate feature vectors: {len(self.duplicate_groups)} groups")
        return "\n".join(lines) + "\n"


def build_report(scenario: Scenario, measure: str | None = None) -> EdaReport:
    m = scenario.meta.measure(measure)
    corr = None
    if len(scenario.instance_ids) >= 2 and len(scenario.meta.algorithms) >= 1:
        corr = spearman_matrix(scenario, measure=m.name)
    dom = dominance_pairs(scenario, measure=m.name) if len(scenario.meta.algorithms) >= 2 else []
    return EdaReport(
        scenario.meta.scenario_id,
        m.name,
        summarize_algorithms(scenario, m.name),
        dom,
        corr,
        feature_group_summary(scenario),
        detect_duplicate_instances(scenario.features),
    )


def _svg_box(summaries) -> str:
    w, h, pad = 60 * max(1, len(summaries)) + 40, 240, 20
    hi = max((s["box"]["max"] for s in summaries), default=1.0) or 1.0
    lo = min((s["box"]["min"] for s in summaries), default=0.0)
    span = (hi - lo) or 1.0

    def y(v):
        return h - pad - (v - lo) / span * (h - 2 * pad)

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}">']
    for n, s in enumerate(summaries):
        b = s["box"]
        x = 40 + 60 * n
        parts.append(f'<line x1="{x + 15}" y1="{y(b["min"]):.2f}" x2="{x + 15}" y2="{y(b["max"]):.2f}" stroke="black"/>')
        parts.append(
            f'<rect x="{x}" y="{y(b["q3"]):.2f}" width="30" height="{max(y(b["q1"]) - y(b["q3"]), 0.5):.2f}" '
            'fill="white" stroke="black"/>'
        )
        parts.append(f'<line x1="{x}" y1="{y(b["median"]):.2f}" x2="{x + 30}" y2="{y(b["median"]):.2f}" stroke="black"/>')
        parts.append(f'<text x="{x}" y="{h - 4}" font-size="9">{s["algorithm"]}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _svg_heatmap(corr: Correlation) -> str:
    names = list(corr.algorithms)
    cell = 24
    off = 80
    size = off + cell * len(names)
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}">']
    for a in range(len(names)):
        parts.append(f'<text x="2" y="{off + a * cell + 16}" font-size="9">{names[a]}</text>')
        for b in range(len(names)):
            r = corr.rho[a, b]
            if math.isnan(r):
                color = "#cccccc"
            else:
                t = (r + 1) / 2
                color = f"#{int(255 * (1 - t)):02x}{int(255 * (1 - abs(r) * 0.5)):02x}{int(255 * t):02x}"
            parts.append(f'<rect x="{off + b * cell}" y="{off + a * cell}" width="{cell}" height="{cell}" fill="{color}"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_report(report: EdaReport, out_dir, svg: bool = True) -> list[str]:
    """report.json plus one CSV per section (and SVGs); returns the written file names."""
    os.makedirs(out_dir, exist_ok=True)
    written = []

    def path(name):
        written.append(name)
        return os.path.join(out_dir, name)

    with open(path("report.json"), "w") as fh:
        fh.write(report.to_json() + "\n")
    with open(path("algorithms.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["algorithm", "mean", "sd", "median", "solved_pct"])
        for s in report.algorithm_summaries:
            w.writerow([s["algorithm"], repr(s["mean"]), repr(s["sd"]), repr(s["median"]), repr(s["solved_pct"])])
    with open(path("cdf.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["algorithm", "time", "fraction_solved"])
        for s in report.algorithm_summaries:
            for t, f in s["cdf"]:
                w.writerow([s["algorithm"], repr(t), repr(f)])
    with open(path("boxplot.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["algorithm", "min", "q1", "median", "q3", "max"])
        for s in report.algorithm_summaries:
            b = s["box"]
            w.writerow([s["algorithm"]] + [repr(b[k]) for k in ("min", "q1", "median", "q3", "max")])
    with open(path("dominance.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["dominator", "dominated"])
        w.writerows(report.dominance_pairs)
    if report.correlation is not None:
        with open(path("spearman.csv"), "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            names = list(report.correlation.algorithms)
            w.writerow([""] + names)
            for a, row in zip(names, report.correlation.rho):
                w.writerow([a] + ["" if math.isnan(v) else repr(float(v)) for v in row])
    with open(path("feature_groups.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["step", "n_features"] + [f"{s}_pct" for s in STEP_STATUSES] + ["cost_min", "cost_mean", "cost_max", "missing_cost_pct"])
        for r in report.feature_group_summaries:
            w.writerow(
                [r["step"], r["n_features"]]
                + [pct(r["status_pct"].get(s, 0.0)) for s in STEP_STATUSES]
                + ["" if r[k] is None else repr(r[k]) for k in ("cost_min", "cost_mean", "cost_max")]
                + [pct(r["missing_cost_pct"])]
            )
    with open(path("duplicates.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["group", "instance_id"])
        for g, members in enumerate(report.duplicate_groups, start=1):
            for inst in members:
                w.writerow([g, inst])
    if svg:
        with open(path("boxplot.svg"), "w") as fh:
            fh.write(_svg_box(report.algorithm_summaries))
        if report.correlation is not None:
            with open(path("spearman.svg"), "w") as fh:
                fh.write(_svg_heatmap(report.correlation))
    return written
