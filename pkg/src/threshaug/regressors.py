"""Downstream regressors: least squares, CART, random forest and gradient boosting."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import _tree
from .forest import ForestParams, Tree, fit_trees, grow_tree

KINDS = ("linear", "tree", "random_forest", "gbt")

DEFAULT_GRIDS: dict[str, dict[str, list]] = {
    "linear": {},
    "tree": {"max_depth": [4, 8, 16, None], "min_leaf": [1, 5, 20]},
    "random_forest": {"n_trees": [100], "max_depth": [8, 16, None],
                      "max_features": ["sqrt", "third", "all"]},
    "gbt": {"learning_rate": [0.05, 0.1, 0.3], "n_stages": [100, 300], "max_depth": [3, 6]},
}

DEFAULT_PARAMS: dict[str, dict[str, Any]] = {
    "linear": {},
    "tree": {"max_depth": None, "min_leaf": 1},
    "random_forest": {"n_trees": 100, "max_depth": None, "max_features": "sqrt", "min_leaf": 1},
    "gbt": {"learning_rate": 0.1, "n_stages": 100, "max_depth": 3, "min_leaf": 1},
}


def expand_grid(axes: dict[str, list]) -> list[dict[str, Any]]:
    """Cartesian product of named axes, in row-major order of the axes."""
    if not axes:
        return []
    names = list(axes)
    return [dict(zip(names, combo)) for combo in itertools.product(*(axes[k] for k in names))]


@dataclass(frozen=True)
class RegressorSpec:
    kind: str
    params: dict[str, Any] = field(default_factory=dict)
    grid: list[dict[str, Any]] | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown regressor kind {self.kind!r}; expected one of {KINDS}")
        unknown = set(self.params) - set(DEFAULT_PARAMS[self.kind])
        if unknown:
            raise ValueError(f"unknown parameters for {self.kind}: {sorted(unknown)}")

    @property
    def tunable(self) -> bool:
        return self.kind != "linear"

    @classmethod
    def default(cls, kind: str) -> "RegressorSpec":
        return cls(kind, grid=expand_grid(DEFAULT_GRIDS[kind]) or None)

    def with_params(self, params: dict[str, Any]) -> "RegressorSpec":
        return RegressorSpec(self.kind, {**self.params, **params}, self.grid)


@dataclass(frozen=True)
class LinearModel:
    coef: np.ndarray
    intercept: float


@dataclass(frozen=True)
class TreeModel:
    tree: Tree


@dataclass(frozen=True)
class ForestRegressorModel:
    trees: tuple[Tree, ...]


@dataclass(frozen=True)
class BoostedModel:
    base: float
    learning_rate: float
    stages: tuple[Tree, ...]


@dataclass(frozen=True)
class RegressorModel:
    kind: str
    n_features: int
    state: Any
    params: dict[str, Any] = field(default_factory=dict)


def _check_xy(x, y):
    x = np.ascontiguousarray(x, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64).ravel()
    if x.ndim != 2:
        raise ValueError(f"expected a 2-d design matrix, got shape {x.shape}")
    if x.shape[0] != y.shape[0]:
        raise ValueError(f"row mismatch: x has {x.shape[0]} rows, y has {y.shape[0]}")
    if x.shape[0] < 2:
        raise ValueError("need at least 2 rows to fit a regressor")
    return x, y


def fit_least_squares(x, y) -> LinearModel:
    """Minimum-norm least squares with an intercept column (SVD based)."""
    design = np.hstack([x, np.ones((x.shape[0], 1))])
    beta, *_ = np.linalg.lstsq(design, y, rcond=None)
    return LinearModel(coef=beta[:-1], intercept=float(beta[-1]))


def _regression_tree(x, y, w, max_depth, min_leaf, max_features, seed) -> Tree:
    return grow_tree(x, y, w, criterion=_tree.SQUARED_ERROR, max_depth=max_depth,
                     min_leaf=min_leaf, max_features=max_features, seed=seed)


def _tree_predict(tree: Tree, x) -> np.ndarray:
    return tree.value[tree.apply(x), 0]


def fit_regressor(spec: RegressorSpec, x, y, seed: int = 0) -> RegressorModel:
    x, y = _check_xy(x, y)
    d = x.shape[1]
    p = {**DEFAULT_PARAMS[spec.kind], **spec.params}
    if spec.kind == "linear":
        state = fit_least_squares(x, y)
    elif spec.kind == "tree":
        if p["max_depth"] is not None and p["max_depth"] < 0:
            raise ValueError("max_depth must be >= 0")
        state = TreeModel(_regression_tree(x, y, np.ones(len(y)), p["max_depth"],
                                           int(p["min_leaf"]), d, seed))
    elif spec.kind == "random_forest":
        fp = ForestParams(n_trees=int(p["n_trees"]), max_depth=p["max_depth"],
                          min_leaf_size=int(p["min_leaf"]), max_features=p["max_features"])
        state = ForestRegressorModel(tuple(fit_trees(x, y, fp, seed, _tree.SQUARED_ERROR)))
    else:
        eta = float(p["learning_rate"])
        if not 0 < eta <= 1:
            raise ValueError(f"learning_rate must be in (0, 1], got {eta}")
        if int(p["n_stages"]) < 0:
            raise ValueError("n_stages must be >= 0")
        base = float(y.mean())
        f = np.full(len(y), base)
        w = np.ones(len(y))
        stages = []
        for m in range(int(p["n_stages"])):
            tree = _regression_tree(x, y - f, w, p["max_depth"], int(p["min_leaf"]), d,
                                    _tree.tree_seed(seed, m))
            f = f + eta * _tree_predict(tree, x)
            stages.append(tree)
        state = BoostedModel(base, eta, tuple(stages))
    return RegressorModel(spec.kind, d, state, p)


def predict_regressor(m: RegressorModel, x) -> np.ndarray:
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != m.n_features:
        raise ValueError(f"expected {m.n_features} columns, got shape {x.shape}")
    s = m.state
    if isinstance(s, LinearModel):
        return x @ s.coef + s.intercept
    if isinstance(s, TreeModel):
        return _tree_predict(s.tree, x)
    if isinstance(s, ForestRegressorModel):
        out = np.zeros(x.shape[0])
        for tree in s.trees:
            out += _tree_predict(tree, x)
        return out / len(s.trees)
    out = np.full(x.shape[0], s.base)
    for tree in s.stages:
        out += s.learning_rate * _tree_predict(tree, x)
    return out


def staged_training_sse(m: RegressorModel, x, y) -> np.ndarray:
    """Training SSE after each boosting stage (index 0 is the constant model)."""
    s = m.state
    f = np.full(len(y), s.base)
    out = [np.sum((y - f) ** 2)]
    for tree in s.stages:
        f = f + s.learning_rate * _tree_predict(tree, x)
        out.append(np.sum((y - f) ** 2))
    return np.array(out)
