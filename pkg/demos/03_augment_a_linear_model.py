"""Give a linear model threshold-classifier features and compare test RMSE.

The target is non-linear in x, so plain least squares underfits. Appending the
S forest probabilities lets the same linear model follow the curve.
"""

import numpy as np

from threshaug import RegressorSpec, augment_features, fit_augmenter, fit_regressor, predict_regressor
from threshaug.forest import ForestParams
from threshaug.stats import rmse

rng = np.random.default_rng(1)
x = rng.uniform(-1, 1, size=(1500, 2))
y = np.sin(3 * x[:, 0]) + x[:, 1] ** 2 + rng.normal(0, 0.1, size=1500)
x_tr, x_te, y_tr, y_te = x[:1000], x[1000:], y[:1000], y[1000:]

native = fit_regressor(RegressorSpec("linear"), x_tr, y_tr)
print(f"native linear  test RMSE {rmse(y_te, predict_regressor(native, x_te)):.3f}")

for s in (2, 8, 32):
    aug = fit_augmenter(x_tr, y_tr, s, ForestParams(n_trees=100), seed=0)
    model = fit_regressor(RegressorSpec("linear"), augment_features(aug, x_tr), y_tr)
    err = rmse(y_te, predict_regressor(model, augment_features(aug, x_te)))
    print(f"S = {s:2d}         test RMSE {err:.3f}")
