"""
Scenarios, baselines and schedules
==================================

Build a small synthetic scenario, write it in the ASlib layout, load it back
and score a few hand-made selections against the virtual and single best
solvers.
"""

import tempfile
from pathlib import Path

import numpy as np

import aslibkit as ak

# a scenario where the best algorithm is a function of feature f1
spec = ak.GenSpec(n_instances=120, n_algorithms=3, planted="feature_determined", seed=1)
out = Path(tempfile.mkdtemp()) / "demo-scenario"
scenario, truth = ak.write_generated(spec, out)
print(sorted(p.name for p in out.iterdir()))

# the on-disk copy is the same scenario, and it validates cleanly
loaded = ak.load_scenario(out)
print(loaded == scenario, ak.validate_scenario(loaded).errors)

# fold the feature costs into the runtimes; with steps=[] nothing is paid
prepared = ak.apply_feature_costs(loaded, steps=[])
vbs = ak.vbs_baseline(prepared)
sbs_alg, sbs = ak.sbs_baseline(prepared)
print(f"VBS PAR10 {vbs.par10:.2f}   SBS ({sbs_alg}) PAR10 {sbs.par10:.2f}")

# running one algorithm everywhere
for alg in prepared.algorithms:
    sel = ak.SelectionOutput.single({i: alg for i in prepared.instances}, prepared.cutoff)
    rep = ak.evaluate_selection(prepared, loaded, sel)
    print(alg, f"PAR10 {rep.par10:8.2f}  MCP {rep.mcp:7.2f}  gap {ak.gap_closed(rep.par10, sbs.par10, vbs.par10):+.3f}")

# a two-entry schedule: give the SBS a tenth of the cutoff, then fall back
cut = prepared.cutoff
fallback = [a for a in prepared.algorithms if a != sbs_alg][0]
sched = ak.SelectionOutput({
    i: (ak.ScheduleEntry(sbs_alg, 0.1 * cut), ak.ScheduleEntry(fallback, 0.9 * cut)) for i in prepared.instances
})
rep = ak.evaluate_selection(prepared, loaded, sched)
print(f"schedule PAR10 {rep.par10:.2f}, solved {rep.solved_fraction:.3f}")

# with feature costs the selector pays for its features, the oracle does not
with_costs = ak.apply_feature_costs(loaded)
print("mean feature cost", np.round(with_costs.feature_cost_used.mean(), 3))
