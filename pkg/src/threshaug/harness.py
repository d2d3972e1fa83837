"""Cross-validated native-vs-augmented benchmark.

Per fold, every statistic is estimated on the training fold only:

1. feature standardisation (all columns, post one-hot);
2. target standardisation followed by Box-Cox;
3. one ``Augmenter`` per requested S, fitted on the whole training fold.

The training fold is then split 70/30. Each regressor is tuned on the 30%
part, refitted on the 70% part with the chosen parameters, and scored on the
70% part (train RMSE) and on the test fold (test RMSE). RMSE stays on the
transformed target scale.
"""

from __future__ import annotations

import logging
import math
import time
from pathlib import Path
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .augment import Augmenter, augment_features, fit_augmenter
from .dataset import Dataset, load_dataset, preprocess_features
from .forest import ForestParams
from .regressors import RegressorSpec, fit_regressor, predict_regressor
from .stats import rmse
from .target_transform import TargetTransform, fit_target_transform, transform_target

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class FoldSplit:
    fold_index: int
    train_indices: np.ndarray
    test_indices: np.ndarray


def kfold_split(n: int, k: int = 10, seed: int = 0) -> list[FoldSplit]:
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    if n < k:
        raise ValueError(f"cannot split {n} rows into {k} folds")
    perm = np.random.default_rng(seed).permutation(n)
    blocks = np.array_split(perm, k)
    folds = []
    for i, test in enumerate(blocks):
        test = np.sort(test)
        train = np.setdiff1d(perm, test)
        folds.append(FoldSplit(i, train, test))
    return folds


def derive_seed(*parts: int) -> int:
    """Stable 32-bit seed from integer parts."""
    return int(np.random.SeedSequence([int(p) for p in parts]).generate_state(1)[0])


@dataclass(frozen=True)
class DatasetSpec:
    path: str
    target: str
    name: str | None = None
    hints: dict[str, str] = field(default_factory=dict)
    delimiter: str = ","

    def load(self) -> Dataset:
        raw = load_dataset(self.path, self.target, self.hints, delimiter=self.delimiter)
        return preprocess_features(raw, self.target, name=self.label)

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        return Path(self.path).stem


@dataclass(frozen=True)
class ExperimentConfig:
    datasets: tuple[DatasetSpec, ...]
    s_values: tuple[int, ...] = (2, 4, 8, 16, 32)
    regressors: tuple[RegressorSpec, ...] = field(
        default_factory=lambda: tuple(RegressorSpec.default(k) for k in ("linear", "tree", "random_forest", "gbt"))
    )
    k: int = 10
    seed: int = 0
    validation_fraction: float = 0.3
    forest: ForestParams = field(default_factory=ForestParams)
    out_dir: str = "results"

    def __post_init__(self):
        if not self.datasets:
            raise ValueError("at least one dataset is required")
        if not self.s_values:
            raise ValueError("s_values must be non-empty")
        if list(self.s_values) != sorted(set(self.s_values)):
            raise ValueError("s_values must be strictly ascending")
        if min(self.s_values) < 1:
            raise ValueError("s_values must be >= 1")
        if self.k < 2:
            raise ValueError("k must be >= 2")
        if not 0 < self.validation_fraction < 1:
            raise ValueError("validation_fraction must be in (0, 1)")
        if not self.regressors:
            raise ValueError("at least one regressor is required")


@dataclass
class ExperimentResult:
    records: list[dict[str, Any]]
    timings: list[dict[str, Any]] = field(default_factory=list)

    def select(self, **match) -> list[dict[str, Any]]:
        return [r for r in self.records if all(r.get(k) == v for k, v in match.items())]

    @property
    def datasets(self) -> list[str]:
        return list(dict.fromkeys(r["dataset"] for r in self.records))

    @property
    def regressors(self) -> list[str]:
        return list(dict.fromkeys(r["regressor"] for r in self.records))

    @property
    def s_values(self) -> list[int]:
        return sorted({r["s"] for r in self.records if r["s"] is not None})


@dataclass(frozen=True)
class Scaler:
    mean: np.ndarray
    std: np.ndarray

    @classmethod
    def fit(cls, x) -> "Scaler":
        std = x.std(axis=0)
        return cls(x.mean(axis=0), np.where(std > 0, std, 1.0))

    def transform(self, x) -> np.ndarray:
        return (x - self.mean) / self.std


@dataclass(frozen=True)
class FoldState:
    """Everything fitted on one training fold."""

    split: FoldSplit
    scaler: Scaler
    target_transform: TargetTransform
    fit_rows: np.ndarray   # positions inside the training fold used for final fits (70%)
    val_rows: np.ndarray   # positions used for grid-search validation (30%)
    augmenters: dict[int, Augmenter]
    x_train: np.ndarray
    x_test: np.ndarray
    y_train: np.ndarray
    y_test: np.ndarray


def tuning_split(n_train: int, fraction: float, seed: int, fold: int):
    perm = np.random.default_rng(derive_seed(seed, fold, 7)).permutation(n_train)
    n_val = int(round(fraction * n_train))
    n_val = min(max(n_val, 1), n_train - 2)
    return np.sort(perm[n_val:]), np.sort(perm[:n_val])


def prepare_fold(x, y, split: FoldSplit, s_values, seed: int = 0, validation_fraction: float = 0.3,
                 forest: ForestParams | None = None) -> FoldState:
    x_tr, x_te = x[split.train_indices], x[split.test_indices]
    y_tr, y_te = y[split.train_indices], y[split.test_indices]
    scaler = Scaler.fit(x_tr)
    x_tr, x_te = scaler.transform(x_tr), scaler.transform(x_te)
    tt = fit_target_transform(y_tr)
    yt_tr = transform_target(tt, y_tr)
    yt_te = transform_target(tt, y_te)
    fit_rows, val_rows = tuning_split(len(y_tr), validation_fraction, seed, split.fold_index)
    aug_seed = derive_seed(seed, split.fold_index, 3)
    augmenters = {}
    for s in s_values:
        a = fit_augmenter(x_tr, yt_tr, s, forest, seed=aug_seed)
        if a.warning:
            log.warning("fold %d, S=%d: %s", split.fold_index, s, a.warning)
        augmenters[s] = a
    return FoldState(split, scaler, tt, fit_rows, val_rows, augmenters, x_tr, x_te, yt_tr, yt_te)


def grid_search(spec: RegressorSpec, x_fit, y_fit, x_val, y_val, seed: int = 0) -> dict[str, Any]:
    """Grid point with the lowest validation RMSE (first one on ties)."""
    if not spec.tunable:
        return dict(spec.params)
    if not spec.grid:
        raise ValueError(f"regressor {spec.kind!r} requires a non-empty grid")
    best, best_score = None, math.inf
    for point in spec.grid:
        cand = spec.with_params(point)
        model = fit_regressor(cand, x_fit, y_fit, seed=seed)
        score = rmse(y_val, predict_regressor(model, x_val))
        if score < best_score:
            best, best_score = cand.params, score
    return dict(best)


def _jsonable(params: dict[str, Any]) -> dict[str, Any]:
    return {k: (v.item() if isinstance(v, np.generic) else v) for k, v in sorted(params.items())}


def evaluate_variant(spec: RegressorSpec, fs: FoldState, x_tr, x_te, seed: int):
    xf, yf = x_tr[fs.fit_rows], fs.y_train[fs.fit_rows]
    xv, yv = x_tr[fs.val_rows], fs.y_train[fs.val_rows]
    params = grid_search(spec, xf, yf, xv, yv, seed=seed)
    model = fit_regressor(spec.with_params(params), xf, yf, seed=seed)
    train = rmse(yf, predict_regressor(model, xf))
    test = rmse(fs.y_test, predict_regressor(model, x_te))
    return params, train, test


def run_fold(ds: Dataset, split: FoldSplit, config: ExperimentConfig):
    records, timings = [], []
    t0 = time.perf_counter()
    try:
        fs = prepare_fold(ds.features, ds.target, split, config.s_values, config.seed,
                          config.validation_fraction, config.forest)
        err = None
    except Exception as exc:  # noqa: BLE001 - recorded, run continues
        fs, err = None, f"{type(exc).__name__}: {exc}"
    timings.append({"dataset": ds.name, "fold": split.fold_index, "step": "prepare",
                    "seconds": time.perf_counter() - t0})
    variants = [(None, None)] + [(s, None) for s in config.s_values]
    if fs is not None:
        variants = [(None, (fs.x_train, fs.x_test))] + [
            (s, (augment_features(fs.augmenters[s], fs.x_train),
                 augment_features(fs.augmenters[s], fs.x_test)))
            for s in config.s_values
        ]
    for ri, spec in enumerate(config.regressors):
        reg_seed = derive_seed(config.seed, split.fold_index, 11, ri)
        for s, mats in variants:
            rec = {
                "dataset": ds.name,
                "fold": split.fold_index,
                "regressor": spec.kind,
                "variant": "native" if s is None else "augmented",
                "s": s,
                "effective_s": None if s is None or fs is None else fs.augmenters[s].effective_s,
                "train_rmse": None,
                "test_rmse": None,
                "params": None,
                "error": err,
            }
            t1 = time.perf_counter()
            if fs is not None:
                try:
                    params, train, test = evaluate_variant(spec, fs, mats[0], mats[1], reg_seed)
                    rec.update(train_rmse=train, test_rmse=test, params=_jsonable(params))
                except Exception as exc:  # noqa: BLE001
                    rec["error"] = f"{type(exc).__name__}: {exc}"
                    log.error("fold %d %s s=%s failed: %s", split.fold_index, spec.kind, s, exc)
            records.append(rec)
            timings.append({"dataset": ds.name, "fold": split.fold_index, "step": f"{spec.kind}/{s or 'native'}",
                            "seconds": time.perf_counter() - t1})
    return records, timings


def run_experiment(config: ExperimentConfig, jobs: int = 1, datasets: list[Dataset] | None = None) -> ExperimentResult:
    """Run every dataset x fold x regressor x variant cell.

    ``jobs`` only controls how many folds run concurrently; the records are
    identical for any value.
    """
    if datasets is None:
        datasets = [spec.load() for spec in config.datasets]
    records, timings = [], []
    for ds in datasets:
        folds = kfold_split(ds.n, config.k, config.seed)
        log.info("%s: n=%d d=%d, %d folds", ds.name, ds.n, ds.d, len(folds))
        if jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                outs = list(pool.map(lambda f: run_fold(ds, f, config), folds))
        else:
            outs = [run_fold(ds, f, config) for f in folds]
        for recs, times in outs:
            records.extend(recs)
            timings.extend(times)
    return ExperimentResult(records, timings)
