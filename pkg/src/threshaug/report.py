"""Summary tables, S-curves and critical-diagram data built from run records.

Every number here is recomputed from the raw records; nothing else is read.

Files written by ``write_default_reports``::

    <outdir>/records.jsonl                    one JSON object per record
    <outdir>/timings.tsv                      wall-clock seconds per step
    <outdir>/summary_s<S>.csv                 per-dataset native vs augmented test RMSE
    <outdir>/scurve_<regressor>_<dataset>.tsv RMSE against S
    <outdir>/critical_diagram.tsv             mean ranks and Nemenyi groups
"""

from __future__ import annotations

import csv
import json
import math
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .harness import ExperimentResult
from .stats import ComparisonCell, RankSummary, WinTieLoss, compare, friedman_mean_ranks, win_tie_loss

RECORD_FIELDS = ("dataset", "fold", "regressor", "variant", "s", "effective_s",
                 "train_rmse", "test_rmse", "params", "error")


class ReportError(ValueError):
    pass


# -- records ----------------------------------------------------------------

def write_records(result: ExperimentResult, path) -> Path:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for rec in result.records:
            fh.write(json.dumps({k: rec[k] for k in RECORD_FIELDS}, sort_keys=False) + "\n")
    return path


def write_timings(result: ExperimentResult, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, delimiter="\t")
        w.writerow(["dataset", "fold", "step", "seconds"])
        for t in result.timings:
            w.writerow([t["dataset"], t["fold"], t["step"], f"{t['seconds']:.4f}"])
    return path


def read_records(*paths) -> ExperimentResult:
    records = []
    for path in paths:
        path = Path(path)
        if not path.is_file():
            raise ReportError(f"records file not found: {path}")
        with path.open(encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                try:
                    rec = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ReportError(f"{path}:{lineno}: {exc}") from None
                missing = set(RECORD_FIELDS) - set(rec)
                if missing:
                    raise ReportError(f"{path}:{lineno}: missing fields {sorted(missing)}")
                records.append(rec)
    return ExperimentResult(records)


def _fold_rmses(result: ExperimentResult, dataset, regressor, s, field="test_rmse"):
    variant = "native" if s is None else "augmented"
    recs = result.select(dataset=dataset, regressor=regressor, variant=variant, s=s)
    recs = sorted(recs, key=lambda r: r["fold"])
    if any(r["error"] is not None or r[field] is None for r in recs):
        return None
    return np.array([r[field] for r in recs], dtype=np.float64)


# -- per-dataset summary ----------------------------------------------------

@dataclass(frozen=True)
class SummaryRow:
    dataset: str
    cells: dict[str, ComparisonCell | None]


@dataclass(frozen=True)
class SummaryTable:
    s: int
    regressors: tuple[str, ...]
    rows: tuple[SummaryRow, ...]

    def column(self, regressor: str) -> list[ComparisonCell]:
        return [r.cells[regressor] for r in self.rows if r.cells[regressor] is not None]

    def mean_row(self) -> dict[str, tuple[float, float]]:
        out = {}
        for reg in self.regressors:
            cells = self.column(reg)
            out[reg] = (
                float(np.mean([c.native_rmse_mean for c in cells])) if cells else math.nan,
                float(np.mean([c.aug_rmse_mean for c in cells])) if cells else math.nan,
            )
        return out

    def win_tie_loss(self) -> dict[str, WinTieLoss]:
        return {reg: win_tie_loss(self.column(reg)) for reg in self.regressors}


def build_summary_table(result: ExperimentResult, s: int, alpha: float = 0.05) -> SummaryTable:
    if s not in result.s_values:
        raise ReportError(f"no records for S={s}; available: {result.s_values}")
    rows = []
    for ds in result.datasets:
        cells = {}
        for reg in result.regressors:
            native = _fold_rmses(result, ds, reg, None)
            aug = _fold_rmses(result, ds, reg, s)
            if native is None or aug is None or len(native) != len(aug) or len(native) < 2:
                cells[reg] = None
            else:
                cells[reg] = compare(native, aug, alpha)
        rows.append(SummaryRow(ds, cells))
    return SummaryTable(s, tuple(result.regressors), tuple(rows))


def _fmt(v: float) -> str:
    return "" if v is None or (isinstance(v, float) and math.isnan(v)) else f"{v:.4f}"


def write_summary_csv(table: SummaryTable, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        head = ["dataset"]
        for reg in table.regressors:
            head += [f"{reg}_native", f"{reg}_aug", f"{reg}_p", f"{reg}_outcome"]
        w.writerow(head)
        for row in table.rows:
            line = [row.dataset]
            for reg in table.regressors:
                c = row.cells[reg]
                if c is None:
                    line += ["", "", "", "error"]
                else:
                    line += [_fmt(c.native_rmse_mean), _fmt(c.aug_rmse_mean), f"{c.p_value:.4g}", c.outcome]
            w.writerow(line)
        means = table.mean_row()
        line = ["mean"]
        for reg in table.regressors:
            line += [_fmt(means[reg][0]), _fmt(means[reg][1]), "", ""]
        w.writerow(line)
        wtl = table.win_tie_loss()
        line = ["loss/tie/win"]
        for reg in table.regressors:
            line += ["", "", "", str(wtl[reg])]
        w.writerow(line)
    return path


# -- S-curves ---------------------------------------------------------------

@dataclass(frozen=True)
class CurvePoint:
    s: int
    train_rmse: float
    test_rmse: float
    native_train_rmse: float
    native_test_rmse: float


def build_s_curve(result: ExperimentResult, regressor: str, dataset: str) -> list[CurvePoint]:
    if dataset not in result.datasets:
        raise ReportError(f"unknown dataset {dataset!r}; available: {result.datasets}")
    if regressor not in result.regressors:
        raise ReportError(f"unknown regressor {regressor!r}; available: {result.regressors}")

    def mean(s, field):
        v = _fold_rmses(result, dataset, regressor, s, field)
        return math.nan if v is None or len(v) == 0 else float(v.mean())

    native_train, native_test = mean(None, "train_rmse"), mean(None, "test_rmse")
    s_values = sorted({r["s"] for r in result.select(dataset=dataset, regressor=regressor)
                       if r["s"] is not None})
    if not s_values:
        raise ReportError(f"no augmented records for {regressor} on {dataset}")
    return [CurvePoint(s, mean(s, "train_rmse"), mean(s, "test_rmse"), native_train, native_test)
            for s in s_values]


def _safe(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "_", name)


def write_s_curve_tsv(points: list[CurvePoint], path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, delimiter="\t")
        w.writerow(["s", "train_rmse", "test_rmse", "native_train_rmse", "native_test_rmse"])
        for p in points:
            w.writerow([p.s, _fmt(p.train_rmse), _fmt(p.test_rmse),
                        _fmt(p.native_train_rmse), _fmt(p.native_test_rmse)])
    return path


# -- critical diagram ---------------------------------------------------------

def rank_table(result: ExperimentResult, s: int, which: str = "all"):
    """Datasets x variants table of mean test RMSE, and the variant names.

    ``which`` selects native variants, augmented ones ("+" suffix), or both.
    """
    if which not in ("all", "native", "augmented"):
        raise ReportError(f"unknown variant selection {which!r}")
    cols = []
    if which in ("all", "native"):
        cols += [(reg, None, reg) for reg in result.regressors]
    if which in ("all", "augmented"):
        cols += [(reg, s, f"{reg}+") for reg in result.regressors]
    rows = []
    for ds in result.datasets:
        vals = []
        for reg, ss, _ in cols:
            v = _fold_rmses(result, ds, reg, ss)
            vals.append(math.nan if v is None or len(v) == 0 else float(v.mean()))
        if not any(math.isnan(v) for v in vals):
            rows.append(vals)
    return np.array(rows, dtype=np.float64).reshape(len(rows), len(cols)), tuple(c[2] for c in cols)


@dataclass(frozen=True)
class CriticalDiagram:
    variants: tuple[str, ...]
    mean_ranks: tuple[float, ...]
    cd: float
    groups: tuple[tuple[int, int], ...]   # inclusive index ranges into ``variants``

    def groups_of(self, i: int) -> list[int]:
        return [g for g, (a, b) in enumerate(self.groups) if a <= i <= b]


def build_critical_diagram(rank: RankSummary) -> CriticalDiagram:
    if not math.isfinite(rank.cd):
        raise ReportError(f"no Nemenyi critical difference for {len(rank.variants)} variants")
    order = np.argsort(rank.mean_ranks, kind="mergesort")
    ranks = rank.mean_ranks[order]
    names = tuple(rank.variants[i] for i in order)
    k = len(ranks)
    reach = [max(j for j in range(i, k) if ranks[j] - ranks[i] < rank.cd) for i in range(k)]
    groups = []
    for i in range(k):
        if i == 0 or reach[i] > reach[i - 1]:
            groups.append((i, reach[i]))
    return CriticalDiagram(names, tuple(float(r) for r in ranks), rank.cd, tuple(groups))


def write_critical_diagram_tsv(diagram: CriticalDiagram, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, delimiter="\t")
        w.writerow(["variant", "mean_rank", "cd", "groups"])
        for i, (name, r) in enumerate(zip(diagram.variants, diagram.mean_ranks)):
            w.writerow([name, f"{r:.4f}", f"{diagram.cd:.4f}",
                        ",".join(str(g + 1) for g in diagram.groups_of(i))])
    return path


def critical_diagram_for(result: ExperimentResult, s: int, which: str = "all",
                         alpha: float = 0.05) -> CriticalDiagram:
    table, names = rank_table(result, s, which)
    if table.shape[0] < 2:
        raise ReportError(f"critical diagram needs >= 2 complete datasets, got {table.shape[0]}")
    return build_critical_diagram(friedman_mean_ranks(table, names, alpha))


def write_default_reports(result: ExperimentResult, outdir) -> list[Path]:
    """Records, timings, one summary per S, all S-curves and (>= 2 datasets) the CD data."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = [write_records(result, outdir / "records.jsonl"),
               write_timings(result, outdir / "timings.tsv")]
    for s in result.s_values:
        written.append(write_summary_csv(build_summary_table(result, s), outdir / f"summary_s{s}.csv"))
    for reg in result.regressors:
        for ds in result.datasets:
            pts = build_s_curve(result, reg, ds)
            written.append(write_s_curve_tsv(pts, outdir / f"scurve_{_safe(reg)}_{_safe(ds)}.tsv"))
    if len(result.datasets) >= 2 and result.s_values:
        try:
            diagram = critical_diagram_for(result, max(result.s_values))
        except (ReportError, ValueError):
            diagram = None
        if diagram is not None:
            written.append(write_critical_diagram_tsv(diagram, outdir / "critical_diagram.tsv"))
    return written
