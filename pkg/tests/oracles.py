"""Independent reference implementations used as test oracles.

These work from plain Python lists and loops and share no code with the
package apart from reading the Scenario records.
"""

from __future__ import annotations

import itertools
import math


def raw_tables(scenario):
    """Plain dicts: runtime/status per (instance, algorithm), cost/status per (instance, step)."""
    rt, st = {}, {}
    for r in scenario.runs:
        rt[(r.instance_id, r.algorithm_id)] = r.values[0]
        st[(r.instance_id, r.algorithm_id)] = r.status
    fs = scenario.feature_status
    step_status = {}
    for inst, row in zip(fs.instances, fs.status):
        for name, s in zip(fs.steps, row):
            step_status[(inst, name)] = s
    cost = {}
    if scenario.feature_costs is not None:
        fc = scenario.feature_costs
        for r, inst in enumerate(fc.instances):
            for c, name in enumerate(fc.steps):
                v = float(fc.costs[r][c])
                cost[(inst, name)] = None if v != v else v
    return rt, st, step_status, cost


def brute_force_evaluation(scenario, schedules, steps, k=10.0):
    """Per-instance (time, solved, par, mcp) by direct simulation plus the three means."""
    cutoff = scenario.meta.algorithm_cutoff_time
    rt, st, step_status, cost = raw_tables(scenario)
    rows = []
    for inst in sorted(schedules):
        paid = 0.0
        presolved = False
        for s in steps:
            c = cost.get((inst, s))
            paid += 0.0 if c is None else c
            if step_status.get((inst, s)) == "presolved":
                presolved = True
                break
        best = cutoff
        for a in scenario.meta.algorithms:
            v = rt.get((inst, a))
            if st.get((inst, a)) == "ok" and v is not None and v <= cutoff and v < best:
                best = v
        if presolved:
            solved = paid <= cutoff
            time = min(paid, cutoff)
            rows.append((time, solved, time if solved else k * cutoff, 0.0))
            continue
        total = paid
        solved = False
        for alg, budget in schedules[inst]:
            v = rt.get((inst, alg))
            ok = st.get((inst, alg)) == "ok" and v is not None and v <= cutoff
            used = budget if v is None else min(budget, v)
            if ok and v <= budget and total + v <= cutoff:
                total += v
                solved = True
                break
            total += used
        time = total if solved else cutoff
        rows.append((time, solved, time if solved else k * cutoff, time - best))
    n = len(rows)
    return {
        "rows": rows,
        "solved_fraction": sum(1 for r in rows if r[1]) / n,
        "par": math.fsum(r[2] for r in rows) / n,
        "mcp": math.fsum(r[3] for r in rows) / n,
    }


def brute_force_dominance(P, names):
    out = []
    n = len(P)
    m = len(names)
    for a in range(m):
        for b in range(m):
            if a == b:
                continue
            never_worse = True
            strictly_better = False
            for i in range(n):
                if P[i][a] > P[i][b]:
                    never_worse = False
                if P[i][a] < P[i][b]:
                    strictly_better = True
            if never_worse and strictly_better:
                out.append((names[a], names[b]))
    return sorted(out)


def rank_by_counting(xs):
    """Average ranks: 1 + #smaller + (#equal - 1) / 2."""
    out = []
    for x in xs:
        smaller = sum(1 for y in xs if y < x)
        equal = sum(1 for y in xs if y == x)
        out.append(1 + smaller + (equal - 1) / 2)
    return out


def spearman_formula(x, y):
    rx, ry = rank_by_counting(x), rank_by_counting(y)
    n = len(x)
    mx, my = sum(rx) / n, sum(ry) / n
    num = sum((a - mx) * (b - my) for a, b in zip(rx, ry))
    den = math.sqrt(sum((a - mx) ** 2 for a in rx) * sum((b - my) ** 2 for b in ry))
    return num / den


def best_two_partition(points):
    """Exhaustive minimum of the 2-means objective over all bipartitions."""
    n = len(points)
    d = len(points[0])
    best = (math.inf, None)
    for mask in range(1, 2 ** (n - 1)):
        groups = ([], [])
        for i in range(n):
            groups[(mask >> i) & 1].append(points[i])
        w = 0.0
        for g in groups:
            c = [sum(p[j] for p in g) / len(g) for j in range(d)]
            w += sum(sum((p[j] - c[j]) ** 2 for j in range(d)) for p in g)
        if w < best[0]:
            labels = tuple((mask >> i) & 1 for i in range(n))
            best = (w, labels)
    return best


def same_partition(a, b) -> bool:
    pairs = {}
    for x, y in zip(a, b):
        if pairs.setdefault(x, y) != y:
            return False
    return len(set(pairs.values())) == len(pairs)


def all_subsets(items, min_size=1):
    for n in range(min_size, len(items) + 1):
        yield from itertools.combinations(items, n)
