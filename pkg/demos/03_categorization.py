"""Training and cross-validating the issue-type classifier on a toy feature table."""

import numpy as np

from playtriage.corpus import Dataset
from playtriage.learner import (PipelineSpec, cross_validate, info_gain_rank, smote, train,
                                wrapper_select)

rng = np.random.default_rng(0)
classes = ["logic", "presentation", "performance", "non_informative"]
counts = [40, 12, 8, 60]                       # deliberately unbalanced
y = np.repeat(np.arange(4), counts)
X = rng.standard_normal((len(y), 8))
X[:, 0] += y * 1.2                             # one informative column
X[:, 3] += (y == 3) * 1.5                      # another one for non_informative
data = Dataset([f"f{i}" for i in range(8)], X, [classes[k] for k in y])

# %% SMOTE up to the majority count
balanced = smote(data, k=5, seed=0)
print({c: balanced.labels.count(c) for c in balanced.classes})

# %% information gain ranking, then the kNN wrapper
ranked = info_gain_rank(data)
print("ranked:", [(n, round(g, 3)) for n, g in ranked])
print("selected:", wrapper_select(data, ranked, seed=0))

# %% the four preprocessing options with a random forest
for use_smote, use_sel in ((False, False), (True, False), (False, True), (True, True)):
    spec = PipelineSpec("random_forest", smote=use_smote, attr_select=use_sel)
    m = cross_validate(data, spec, folds=5, seed=0)
    print(f"{spec.label:35s} mean AUC {m.mean_auc:.3f}  weighted F {m.weighted_f_measure:.3f}")

# %% a fitted model gives a class distribution per row
model = train(data, "random_forest", seed=0)
print(dict(zip(model.classes, model.predict_proba(X[:1])[0].round(2))))
