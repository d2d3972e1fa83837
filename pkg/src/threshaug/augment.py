"""Threshold-classifier feature construction.

``fit_augmenter`` discretises the (transformed) training target into S
thresholds and trains one random forest per inferiority class
``y <= threshold_i``. ``augment_features`` appends the S predicted class-1
probabilities to any feature matrix with the training column count.
"""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .discretizer import ThresholdSet, compute_thresholds, encode_classes
from .forest import ForestModel, ForestParams, fit_forest_classifier, predict_class_probability


@dataclass(frozen=True)
class Augmenter:
    threshold_set: ThresholdSet
    classifiers: tuple[ForestModel, ...]
    fitted_d: int

    @property
    def effective_s(self) -> int:
        return self.threshold_set.effective_s

    @property
    def warning(self) -> str | None:
        return self.threshold_set.warning


def fit_augmenter(x_train, y_train_transformed, s: int, forest_params: ForestParams | None = None,
                  seed: int = 0, jobs: int = 1) -> Augmenter:
    x = np.ascontiguousarray(x_train, dtype=np.float64)
    y = np.asarray(y_train_transformed, dtype=np.float64).ravel()
    if x.ndim != 2 or x.shape[0] != y.shape[0]:
        raise ValueError(f"x rows ({x.shape[0]}) must match y length ({y.shape[0]})")
    tset = compute_thresholds(y, s)
    labels = encode_classes(y, tset)
    params = forest_params or ForestParams()

    def one(i: int) -> ForestModel:
        return fit_forest_classifier(x, labels[:, i], params, seed=seed + i)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            classifiers = tuple(pool.map(one, range(tset.effective_s)))
    else:
        classifiers = tuple(one(i) for i in range(tset.effective_s))
    return Augmenter(threshold_set=tset, classifiers=classifiers, fitted_d=x.shape[1])


def class_probabilities(a: Augmenter, x) -> np.ndarray:
    """The constructed block X' (n x effective_s)."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != a.fitted_d:
        raise ValueError(f"expected {a.fitted_d} columns, got shape {x.shape}")
    if x.shape[0] == 0:
        return np.zeros((0, a.effective_s))
    return np.hstack([predict_class_probability(m, x) for m in a.classifiers])


def augment_features(a: Augmenter, x) -> np.ndarray:
    """Return ``[x | X']`` with the original columns untouched."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    return np.hstack([x, class_probabilities(a, x)])


def dump_augmented(a: Augmenter, x, path, feature_names=None, include_native: bool = True) -> None:
    """Write X' (or X'') as comma-delimited text with a header row."""
    xp = class_probabilities(a, x)
    names = [f"X_prime_{i + 1}" for i in range(a.effective_s)]
    block = xp
    if include_native:
        x = np.asarray(x, dtype=np.float64)
        native = list(feature_names) if feature_names is not None else [
            f"x_{j + 1}" for j in range(x.shape[1])]
        names = native + names
        block = np.hstack([x, xp])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(names)
        for row in block:
            w.writerow([repr(float(v)) for v in row])
