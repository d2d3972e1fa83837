"""Delimited-text loading and the global feature-side preprocessing.

Column kinds are inferred from cell contents unless overridden by hints:

* constant    -- a single distinct value
* numeric     -- every cell parses as a real number
* date        -- every cell matches one of ``DATE_PATTERNS``
* identifier  -- text with all-distinct values
* categorical -- anything else

Rows with a missing cell (empty, ``NA`` or ``?``) are removed at load.
Preprocessing one-hot encodes categoricals keeping every category, drops
date/identifier/constant columns and removes collinear numeric columns.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

KINDS = ("numeric", "categorical", "date", "identifier", "constant")
MISSING = frozenset({"", "NA", "?"})
DATE_PATTERNS = (
    r"\d{4}-\d{2}-\d{2}",
    r"\d{4}-\d{2}-\d{2}[T ]\d{2}:\d{2}(:\d{2}(\.\d+)?)?(Z|[+-]\d{2}:?\d{2})?",
    r"\d{4}-\d{2}",
    r"\d{4}-W\d{2}(-\d)?",
)
COLLINEAR_R = 0.999


class DatasetError(ValueError):
    pass


@dataclass(frozen=True)
class ColumnMeta:
    name: str
    kind: str
    original_index: int
    is_target: bool = False


@dataclass(frozen=True)
class RawTable:
    header: tuple[str, ...]
    columns: tuple[tuple[str, ...], ...]
    meta: tuple[ColumnMeta, ...]
    n_rows: int
    dropped_rows: int = 0

    def column(self, name: str) -> tuple[str, ...]:
        return self.columns[self.header.index(name)]


@dataclass(frozen=True)
class Dataset:
    features: np.ndarray
    target: np.ndarray
    feature_names: tuple[str, ...]
    target_name: str = "target"
    name: str = "dataset"
    dropped: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    def to_raw(self) -> RawTable:
        """Re-express the dataset as an all-numeric table (used to re-run preprocessing)."""
        header = (*self.feature_names, self.target_name)
        cols = [tuple(repr(float(v)) for v in self.features[:, j]) for j in range(self.d)]
        cols.append(tuple(repr(float(v)) for v in self.target))
        meta = tuple(
            ColumnMeta(h, "numeric", i, is_target=(i == self.d)) for i, h in enumerate(header)
        )
        return RawTable(header, tuple(cols), meta, self.n)


def _is_float(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def infer_kind(values, date_patterns=DATE_PATTERNS) -> str:
    distinct = set(values)
    if len(distinct) <= 1:
        return "constant"
    if all(_is_float(v) for v in distinct):
        return "numeric"
    regexes = [re.compile(p) for p in date_patterns]
    if all(any(r.fullmatch(v) for r in regexes) for v in distinct):
        return "date"
    if len(distinct) == len(values):
        return "identifier"
    return "categorical"


def load_dataset(path, target_name: str, hints: dict[str, str] | None = None,
                 delimiter: str = ",", date_patterns=DATE_PATTERNS) -> RawTable:
    path = Path(path)
    if not path.is_file():
        raise DatasetError(f"dataset file not found: {path}")
    hints = dict(hints or {})
    for col, kind in hints.items():
        if kind not in KINDS:
            raise DatasetError(f"hint for column {col!r} has unknown kind {kind!r}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetError(f"{path}: empty file, header row required") from None
        header = [h.strip() for h in header]
        if target_name not in header:
            raise DatasetError(f"{path}: target column {target_name!r} not in header")
        if len(set(header)) != len(header):
            raise DatasetError(f"{path}: duplicate column names in header")
        rows = []
        dropped = 0
        for row in reader:
            if not row or (len(row) == 1 and not row[0].strip() and len(header) > 1):
                continue
            if len(row) != len(header):
                raise DatasetError(
                    f"{path}: line {reader.line_num}: expected {len(header)} fields, got {len(row)}"
                )
            row = [c.strip() for c in row]
            if any(c in MISSING for c in row):
                dropped += 1
                continue
            rows.append(row)
    if not rows:
        raise DatasetError(f"{path}: zero rows remaining after missing-value removal")
    columns = tuple(tuple(col) for col in zip(*rows))
    meta = []
    for i, (name, values) in enumerate(zip(header, columns)):
        kind = hints.get(name) or infer_kind(values, date_patterns)
        meta.append(ColumnMeta(name, kind, i, is_target=(name == target_name)))
    unknown = set(hints) - set(header)
    if unknown:
        raise DatasetError(f"hints name unknown columns: {sorted(unknown)}")
    return RawTable(tuple(header), columns, tuple(meta), len(rows), dropped)


def _binary(col: np.ndarray) -> bool:
    return bool(np.all((col == 0) | (col == 1)))


def collinear_columns(x: np.ndarray, candidates, threshold: float = COLLINEAR_R) -> list[int]:
    """Indices among ``candidates`` to drop: the later column of each collinear pair.

    A pair is collinear when Pearson r >= threshold, or r <= -threshold unless both
    columns are 0/1 indicators (complementary indicators are kept on purpose).
    """
    drop: list[int] = []
    kept: list[int] = []
    std = x.std(axis=0)
    for j in candidates:
        hit = False
        for i in kept:
            if std[i] == 0 or std[j] == 0:
                continue
            r = np.corrcoef(x[:, i], x[:, j])[0, 1]
            if r >= threshold or (r <= -threshold and not (_binary(x[:, i]) and _binary(x[:, j]))):
                hit = True
                break
        if hit:
            drop.append(j)
        else:
            kept.append(j)
    return drop


def preprocess_features(raw: RawTable, target_name: str, name: str | None = None) -> Dataset:
    if raw.n_rows < 2:
        raise DatasetError("need at least 2 rows")
    if target_name not in raw.header:
        raise DatasetError(f"target column {target_name!r} not in table")
    tmeta = raw.meta[raw.header.index(target_name)]
    target_cells = raw.column(target_name)
    if not all(_is_float(v) for v in target_cells) or tmeta.kind in ("categorical", "date", "identifier"):
        raise DatasetError(f"target column {target_name!r} is not numeric")
    target = np.array([float(v) for v in target_cells])

    blocks: list[np.ndarray] = []
    names: list[str] = []
    dropped: dict[str, str] = {}
    for m, values in zip(raw.meta, raw.columns):
        if m.is_target or m.name == target_name:
            continue
        if m.kind in ("date", "identifier", "constant"):
            dropped[m.name] = m.kind
        elif m.kind == "numeric":
            blocks.append(np.array([float(v) for v in values]).reshape(-1, 1))
            names.append(m.name)
        else:
            cats = sorted(set(values))
            arr = np.array(values)
            blocks.append(np.column_stack([(arr == c).astype(np.float64) for c in cats]))
            names.extend(f"{m.name}={c}" for c in cats)
    if not blocks:
        raise DatasetError("all feature columns were dropped")
    x = np.hstack(blocks)
    drop = collinear_columns(x, range(x.shape[1]))
    for j in drop:
        dropped[names[j]] = "collinear"
    keep = [j for j in range(x.shape[1]) if j not in set(drop)]
    if not keep:
        raise DatasetError("all feature columns were dropped")
    if len(set(names)) != len(names):
        raise DatasetError("feature names collide after one-hot coding")
    return Dataset(
        features=np.ascontiguousarray(x[:, keep]),
        target=target,
        feature_names=tuple(names[j] for j in keep),
        target_name=target_name,
        name=name or "dataset",
        dropped=dropped,
    )


def bundled_path(name: str = "airfoil") -> Path:
    """Path of a dataset shipped with the package (currently only ``airfoil``)."""
    files = {"airfoil": "airfoil_self_noise.csv"}
    if name not in files:
        raise KeyError(f"no bundled dataset {name!r}; available: {sorted(files)}")
    return Path(str(resources.files("threshaug") / "data" / files[name]))


AIRFOIL_TARGET = "scaled_sound_pressure"
