"""Experiment configuration files (YAML).

Recognised keys; everything except the dataset is optional::

    dataset:                      # or ``datasets:`` with a list of such mappings
      path: data/airfoil.csv      # relative paths resolve against the config file
      target: scaled_sound_pressure
      name: airfoil               # defaults to the file stem
      delimiter: ","
      hints: {station: categorical, id: identifier}
    experiment:
      s_values: [2, 4, 8, 16, 32]
      k: 10
      seed: 0
      validation_fraction: 0.3
    forest:                       # threshold classifiers
      n_trees: 100
      max_depth: null
      min_leaf_size: 1
      max_features: sqrt
    regressors:                   # default: all four kinds with their default grids
      - kind: linear
      - kind: tree
        grid: {max_depth: [4, 8, 16, null], min_leaf: [1, 5, 20]}
      - kind: gbt
        params: {min_leaf: 1}
    output:
      dir: results                # relative to the config file, like dataset paths
"""

from __future__ import annotations

from pathlib import Path

import yaml

from .forest import ForestParams
from .harness import DatasetSpec, ExperimentConfig
from .regressors import DEFAULT_GRIDS, RegressorSpec, expand_grid

TOP_KEYS = {"dataset", "datasets", "experiment", "forest", "regressors", "output"}


class ConfigError(ValueError):
    pass


def _dataset(entry, base: Path) -> DatasetSpec:
    if not isinstance(entry, dict) or "path" not in entry or "target" not in entry:
        raise ConfigError("each dataset needs 'path' and 'target'")
    extra = set(entry) - {"path", "target", "name", "delimiter", "hints"}
    if extra:
        raise ConfigError(f"unknown dataset keys: {sorted(extra)}")
    path = Path(entry["path"])
    if not path.is_absolute():
        path = base / path
    return DatasetSpec(
        path=str(path),
        target=str(entry["target"]),
        name=entry.get("name"),
        hints=dict(entry.get("hints") or {}),
        delimiter=str(entry.get("delimiter", ",")),
    )


def _regressor(entry) -> RegressorSpec:
    if isinstance(entry, str):
        entry = {"kind": entry}
    if not isinstance(entry, dict) or "kind" not in entry:
        raise ConfigError("each regressor needs a 'kind'")
    extra = set(entry) - {"kind", "params", "grid"}
    if extra:
        raise ConfigError(f"unknown regressor keys: {sorted(extra)}")
    kind = entry["kind"]
    if kind not in DEFAULT_GRIDS:
        raise ConfigError(f"unknown regressor kind {kind!r}")
    grid = entry.get("grid")
    if grid is None:
        points = expand_grid(DEFAULT_GRIDS[kind]) or None
    elif isinstance(grid, dict):
        points = expand_grid(grid) or None
    elif isinstance(grid, list):
        points = [dict(p) for p in grid] or None
    else:
        raise ConfigError(f"grid for {kind} must be a mapping of lists or a list of mappings")
    try:
        return RegressorSpec(kind, dict(entry.get("params") or {}), points)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def parse_config(data: dict, base: Path = Path(".")) -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping")
    extra = set(data) - TOP_KEYS
    if extra:
        raise ConfigError(f"unknown top-level keys: {sorted(extra)}")
    if "dataset" in data and "datasets" in data:
        raise ConfigError("use either 'dataset' or 'datasets', not both")
    entries = data.get("datasets") or ([data["dataset"]] if "dataset" in data else [])
    if not entries:
        raise ConfigError("no dataset configured")
    datasets = tuple(_dataset(e, base) for e in entries)
    exp = data.get("experiment") or {}
    extra = set(exp) - {"s_values", "k", "seed", "validation_fraction"}
    if extra:
        raise ConfigError(f"unknown experiment keys: {sorted(extra)}")
    kwargs = {}
    if "s_values" in exp:
        kwargs["s_values"] = tuple(int(s) for s in exp["s_values"])
    for key, cast in (("k", int), ("seed", int), ("validation_fraction", float)):
        if key in exp:
            kwargs[key] = cast(exp[key])
    if "regressors" in data:
        kwargs["regressors"] = tuple(_regressor(e) for e in data["regressors"])
    try:
        if "forest" in data:
            kwargs["forest"] = ForestParams(**(data["forest"] or {}))
        out = (data.get("output") or {}).get("dir")
        if out is not None:
            out = Path(out)
            kwargs["out_dir"] = str(out if out.is_absolute() else base / out)
        return ExperimentConfig(datasets=datasets, **kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return parse_config(data, base=path.parent)
