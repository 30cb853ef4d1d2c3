"""
Exploratory analysis of a scenario
==================================

Summaries per algorithm, dominance, rank correlation with a Ward ordering,
feature-step diagnostics and duplicate instances, written as CSV/JSON/SVG.
"""

import tempfile
from pathlib import Path

import numpy as np

import aslibkit as ak
from aslibkit import eda

scenario, truth = ak.generate(ak.GenSpec(n_instances=150, planted="dominant_single", presolve_rate=0.1,
                                         missing_rate=0.05, seed=5))
report = eda.build_report(scenario)
print(report.text())

# the planted dominator beats every other algorithm
print(truth.dominator, [b for a, b in report.dominance_pairs if a == truth.dominator])

# ranks only: pushing timeouts from the cutoff to 1e9 leaves the correlation as is
_, algs, P, _ = eda.performance_matrix(scenario)
P_far = np.where(P >= scenario.meta.algorithm_cutoff_time, 1e9, P)
print(np.array_equal(eda.spearman_matrix(P, algs).rho, eda.spearman_matrix(P_far, algs).rho))

out = Path(tempfile.mkdtemp()) / "eda"
for path in eda.write_report(report, out):
    print(path)
