"""
Greedy portfolio and feature reduction
======================================

Forward selection adds one algorithm (or feature) at a time, keeping the one
that lowers cross-validated PAR10 most, and stops once the gain drops below
one second per instance.
"""

import warnings

import aslibkit as ak

warnings.simplefilter("ignore", RuntimeWarning)
spec = "approach=classification, learner=cart"

# two algorithms split the instances between them, the other three are weak
scenario, truth = ak.generate(ak.GenSpec(n_instances=200, n_algorithms=5, planted="complementary_pair", seed=2))
res = ak.forward_select(scenario, "algorithms", spec)
print("planted pair:", truth.pair)
print("selected:    ", res.selected, [round(s, 2) for s in res.score_trace])
print(res.table())

# features: only f1 carries the signal here, and steps are paid as a whole
scenario, _ = ak.generate(ak.GenSpec(n_instances=200, planted="feature_determined", noise_sd=0.1, seed=4))
res = ak.forward_select(scenario, "features", spec)
print("features:", res.selected)
print(res.table())
