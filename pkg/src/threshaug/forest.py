"""Random-forest binary classifier grown from scratch.

Each tree is fitted on a bootstrap sample with Gini splits and per-split
feature subsampling. The class-1 probability is the fraction of trees whose
reached leaf votes for class 1 (hard vote per tree), so with 100 trees every
probability is a multiple of 0.01.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _tree

FORMAT_VERSION = 1


@dataclass(frozen=True)
class ForestParams:
    n_trees: int = 100
    max_depth: int | None = None
    min_leaf_size: int = 1
    max_features: int | str | None = "sqrt"
    bootstrap: bool = True

    def __post_init__(self):
        if self.n_trees < 1:
            raise ValueError(f"n_trees must be >= 1, got {self.n_trees}")
        if self.min_leaf_size < 1:
            raise ValueError(f"min_leaf_size must be >= 1, got {self.min_leaf_size}")
        if self.max_depth is not None and self.max_depth < 0:
            raise ValueError(f"max_depth must be >= 0 or None, got {self.max_depth}")


def resolve_max_features(spec, d: int) -> int:
    """Number of features tried per split for a ``d``-column problem."""
    if spec is None or spec == "all":
        k = d
    elif spec == "sqrt":
        k = math.isqrt(d)
    elif spec == "third":
        k = d // 3
    elif isinstance(spec, float):
        k = int(spec * d)
    else:
        k = int(spec)
    return max(1, min(d, k))


@dataclass(frozen=True)
class Tree:
    """Flat preorder arrays of one fitted tree (see ``_tree``)."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    weight: np.ndarray

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def apply(self, x: np.ndarray) -> np.ndarray:
        return _tree.apply_tree(self.feature, self.threshold, self.left, self.right, x)

    def leaf_votes(self) -> np.ndarray:
        # majority class per node; a tie goes to class 0
        return (self.value[:, 1] > self.value[:, 0]).astype(np.int64)


def grow_tree(x, y, weights, *, criterion, max_depth, min_leaf, max_features, seed) -> Tree:
    depth = -1 if max_depth is None else int(max_depth)
    arrays = _tree.build_tree(
        x, y, weights, criterion, depth, int(min_leaf), int(max_features), np.uint64(seed)
    )
    return Tree(*arrays)


def _as_matrix(x) -> np.ndarray:
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError(f"expected a 2-d feature matrix, got shape {x.shape}")
    return x


def fit_trees(x, y, params: ForestParams, seed: int, criterion: int, jobs: int = 1) -> list[Tree]:
    """Fit ``params.n_trees`` trees; results do not depend on ``jobs``."""
    n, d = x.shape
    mtry = resolve_max_features(params.max_features, d)

    def one(t: int) -> Tree:
        s = _tree.tree_seed(seed, t)
        if params.bootstrap:
            w = _tree.bootstrap_counts(n, np.uint64(s)).astype(np.float64)
        else:
            w = np.ones(n)
        # the split search draws from a stream decorrelated from the bootstrap
        return grow_tree(
            x, y, w,
            criterion=criterion,
            max_depth=params.max_depth,
            min_leaf=params.min_leaf_size,
            max_features=mtry,
            seed=_tree.splitmix64(s),
        )

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(one, range(params.n_trees)))
    return [one(t) for t in range(params.n_trees)]


@dataclass(frozen=True)
class ForestModel:
    trees: tuple[Tree, ...]
    n_features: int
    feature_subsample: int
    seed: int
    params: ForestParams = field(default_factory=ForestParams)

    @property
    def n_trees(self) -> int:
        return len(self.trees)


def fit_forest_classifier(x, labels, params: ForestParams | None = None, seed: int = 0,
                          jobs: int = 1) -> ForestModel:
    """Fit a bagged Gini forest on 0/1 ``labels``.

    Single-class label vectors are accepted; every tree is then a lone leaf.
    """
    params = params or ForestParams()
    x = _as_matrix(x)
    labels = np.asarray(labels)
    if x.shape[0] == 0:
        raise ValueError("cannot fit a forest on empty data")
    if labels.shape != (x.shape[0],):
        raise ValueError(f"labels shape {labels.shape} does not match {x.shape[0]} rows")
    if not np.all((labels == 0) | (labels == 1)):
        raise ValueError("labels must be 0/1")
    y = labels.astype(np.float64)
    trees = fit_trees(x, y, params, seed, _tree.GINI, jobs=jobs)
    return ForestModel(
        trees=tuple(trees),
        n_features=x.shape[1],
        feature_subsample=resolve_max_features(params.max_features, x.shape[1]),
        seed=seed,
        params=params,
    )


def vote_counts(model: ForestModel, x) -> np.ndarray:
    """Number of trees voting for class 1, per row."""
    x = _as_matrix(x)
    if x.shape[1] != model.n_features:
        raise ValueError(f"expected {model.n_features} columns, got {x.shape[1]}")
    votes = np.zeros(x.shape[0], dtype=np.int64)
    for tree in model.trees:
        votes += tree.leaf_votes()[tree.apply(x)]
    return votes


def predict_class_probability(model: ForestModel, x) -> np.ndarray:
    """Fraction of trees voting for class 1, as an ``(n, 1)`` column."""
    return (vote_counts(model, x) / model.n_trees).reshape(-1, 1)


def gini(a: float, b: float) -> float:
    total = a + b
    if total == 0:
        return 0.0
    return 1.0 - (a * a + b * b) / (total * total)


# -- serialisation ---------------------------------------------------------
#
# Text format, one token per whitespace-separated field:
#   threshaug-forest <version>
#   n_features <d> feature_subsample <k> seed <s> n_trees <T>
#   tree <n_nodes>
#   <feature> <threshold> <left> <right> <count0> <count1>    (preorder, one line per node)
# Thresholds are written with repr() so that a round trip is exact.

def dump_forest(model: ForestModel, fh) -> None:
    fh.write(f"threshaug-forest {FORMAT_VERSION}\n")
    fh.write(
        f"n_features {model.n_features} feature_subsample {model.feature_subsample} "
        f"seed {model.seed} n_trees {model.n_trees}\n"
    )
    for tree in model.trees:
        fh.write(f"tree {tree.n_nodes}\n")
        for i in range(tree.n_nodes):
            fh.write(
                f"{tree.feature[i]} {float(tree.threshold[i])!r} {tree.left[i]} {tree.right[i]} "
                f"{int(tree.value[i, 0])} {int(tree.value[i, 1])}\n"
            )


def load_forest(fh) -> ForestModel:
    magic, version = fh.readline().split()
    if magic != "threshaug-forest" or int(version) != FORMAT_VERSION:
        raise ValueError(f"unsupported forest file header: {magic} {version}")
    head = fh.readline().split()
    meta = dict(zip(head[::2], head[1::2]))
    trees = []
    for _ in range(int(meta["n_trees"])):
        tag, count = fh.readline().split()
        if tag != "tree":
            raise ValueError(f"expected 'tree', got {tag!r}")
        rows = [fh.readline().split() for _ in range(int(count))]
        feature = np.array([int(r[0]) for r in rows], dtype=np.int64)
        threshold = np.array([float(r[1]) for r in rows])
        left = np.array([int(r[2]) for r in rows], dtype=np.int64)
        right = np.array([int(r[3]) for r in rows], dtype=np.int64)
        value = np.array([[float(r[4]), float(r[5])] for r in rows]).reshape(-1, 2)
        trees.append(Tree(feature, threshold, left, right, value, value.sum(axis=1)))
    return ForestModel(
        trees=tuple(trees),
        n_features=int(meta["n_features"]),
        feature_subsample=int(meta["feature_subsample"]),
        seed=int(meta["seed"]),
    )
