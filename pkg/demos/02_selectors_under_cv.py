"""
Comparing selectors under cross-validation
==========================================

Each selector is trained on nine folds and scored on the tenth. The summary
number is the fraction of the SBS-to-VBS gap that the selector closes.
"""

import warnings

import aslibkit as ak

warnings.simplefilter("ignore", RuntimeWarning)

specs = [
    "approach=sbs_constant",
    "approach=classification, learner=cart",
    "approach=classification, learner=rf, ntree=30",
    "approach=regression, learner=rf, ntree=30",
    "approach=regression, learner=linear",
    "approach=clustering",
    "approach=oracle_cheat",
]

for mode in ("feature_determined", "clustered"):
    scenario, _ = ak.generate(ak.GenSpec(n_instances=200, planted=mode, seed=3))
    print(f"\n{mode}")
    for text in specs:
        cv = ak.cross_validate(scenario, text, threads=4)
        print(f"  {text:48s} PAR10 {cv.pooled.par10:8.2f}  gap {cv.gap_closed:+.3f}")

# a trained model is plain JSON and can be reused later
scenario, _ = ak.generate(ak.GenSpec(n_instances=200, seed=3))
prepared = ak.apply_feature_costs(scenario)
model = ak.train_selector(prepared, "approach=classification, learner=cart")
again = ak.SelectorModel.from_dict(model.to_dict())
print(ak.select_many(model, prepared) == ak.select_many(again, prepared))
print(ak.select(model, prepared.raw_features[0]))
