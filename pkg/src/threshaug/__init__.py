"""Augment regression inputs with the probabilities of S threshold classifiers.

Typical use on one training fold::

    from threshaug import fit_target_transform, transform_target, fit_augmenter, augment_features

    tt = fit_target_transform(y_train)
    a = fit_augmenter(x_train, transform_target(tt, y_train), s=32, seed=0)
    x_train_ext = augment_features(a, x_train)
    x_test_ext = augment_features(a, x_test)
"""

from .augment import Augmenter, augment_features, fit_augmenter
from .dataset import Dataset, load_dataset, preprocess_features
from .discretizer import ThresholdSet, compute_thresholds, encode_classes
from .forest import ForestModel, ForestParams, fit_forest_classifier, predict_class_probability
from .harness import ExperimentConfig, ExperimentResult, kfold_split, run_experiment
from .regressors import RegressorSpec, fit_regressor, predict_regressor
from .stats import friedman_mean_ranks, nemenyi_cd, paired_t_test, rmse
from .target_transform import TargetTransform, fit_target_transform, transform_target

__version__ = "0.1.0"

__all__ = [
    "Augmenter", "augment_features", "fit_augmenter",
    "Dataset", "load_dataset", "preprocess_features",
    "ThresholdSet", "compute_thresholds", "encode_classes",
    "ForestModel", "ForestParams", "fit_forest_classifier", "predict_class_probability",
    "ExperimentConfig", "ExperimentResult", "kfold_split", "run_experiment",
    "RegressorSpec", "fit_regressor", "predict_regressor",
    "friedman_mean_ranks", "nemenyi_cd", "paired_t_test", "rmse",
    "TargetTransform", "fit_target_transform", "transform_target",
]
