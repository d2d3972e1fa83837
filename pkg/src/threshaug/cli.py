"""``threshaug`` command line.

Exit codes: 0 success, 1 runtime failure, 2 config/usage error, 3 dataset error.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import os
import sys
from pathlib import Path

from . import report
from .config import ConfigError, load_config
from .dataset import DatasetError, load_dataset, preprocess_features
from .harness import run_experiment

log = logging.getLogger("threshaug")

EXIT_RUNTIME = 1
EXIT_CONFIG = 2
EXIT_DATASET = 3


def _out_dir(args, config) -> Path:
    return Path(args.out or os.environ.get("THRESHAUG_OUT") or config.out_dir)


def _run(args, s_override=None) -> int:
    try:
        config = load_config(args.config)
        if args.seed is not None:
            config = dataclasses.replace(config, seed=args.seed)
        if s_override:
            config = dataclasses.replace(config, s_values=tuple(sorted(set(s_override))))
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        datasets = [spec.load() for spec in config.datasets]
    except DatasetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATASET
    try:
        result = run_experiment(config, jobs=args.jobs, datasets=datasets)
        written = report.write_default_reports(result, _out_dir(args, config))
    except Exception as exc:  # noqa: BLE001
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    for path in written:
        print(path)
    failed = sum(r["error"] is not None for r in result.records)
    if failed:
        log.warning("%d cells failed; see the 'error' field in records.jsonl", failed)
    return 0


def cmd_run(args) -> int:
    return _run(args)


def cmd_sweep(args) -> int:
    return _run(args, s_override=args.s)


def cmd_report(args) -> int:
    try:
        result = report.read_records(*args.records)
        out = Path(args.out or os.environ.get("THRESHAUG_OUT") or Path(args.records[0]).parent)
        out.mkdir(parents=True, exist_ok=True)
        if args.kind == "summary":
            s = args.s if args.s is not None else max(result.s_values, default=None)
            if s is None:
                raise report.ReportError("records contain no augmented runs")
            if args.dataset:
                result = _only_dataset(result, args.dataset)
            path = report.write_summary_csv(report.build_summary_table(result, s), out / f"summary_s{s}.csv")
        elif args.kind == "scurve":
            datasets = [args.dataset] if args.dataset else result.datasets
            regressors = [args.regressor] if args.regressor else result.regressors
            paths = []
            for ds in datasets:
                for reg in regressors:
                    pts = report.build_s_curve(result, reg, ds)
                    paths.append(report.write_s_curve_tsv(
                        pts, out / f"scurve_{report._safe(reg)}_{report._safe(ds)}.tsv"))
            for p in paths:
                print(p)
            return 0
        else:
            s = args.s if args.s is not None else max(result.s_values, default=None)
            if s is None:
                raise report.ReportError("records contain no augmented runs")
            diagram = report.critical_diagram_for(result, s, args.variants)
            path = report.write_critical_diagram_tsv(diagram, out / "critical_diagram.tsv")
    except (report.ReportError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(path)
    return 0


def _only_dataset(result, name):
    if name not in result.datasets:
        raise report.ReportError(f"unknown dataset {name!r}; available: {result.datasets}")
    return report.ExperimentResult(result.select(dataset=name))


def cmd_validate(args) -> int:
    try:
        raw = load_dataset(args.dataset, args.target, delimiter=args.delimiter)
        ds = preprocess_features(raw, args.target)
    except DatasetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATASET
    print(f"rows: {ds.n} (dropped {raw.dropped_rows} with missing values)")
    print(f"features: {ds.d}")
    for m in raw.meta:
        note = "target" if m.is_target else ds.dropped.get(m.name, "kept")
        print(f"  {m.name}\t{m.kind}\t{note}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="threshaug", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("config", help="YAML experiment config")
        sp.add_argument("--seed", type=int, help="override experiment.seed")
        sp.add_argument("--jobs", type=int, default=1, help="folds run concurrently (results unchanged)")
        sp.add_argument("--out", help="output directory (else $THRESHAUG_OUT, else output.dir)")

    sp = sub.add_parser("run", help="run the experiment in a config file")
    common(sp)
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("sweep", help="run with an overridden list of S values")
    common(sp)
    sp.add_argument("--s", type=int, nargs="+", required=True, help="S values to sweep")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("report", help="rebuild a report from records files")
    sp.add_argument("records", nargs="+", help="records.jsonl file(s)")
    sp.add_argument("--kind", choices=("summary", "scurve", "cd"), required=True)
    sp.add_argument("--s", type=int, help="S value (default: largest in the records)")
    sp.add_argument("--dataset", help="restrict to one dataset")
    sp.add_argument("--regressor", help="restrict S-curves to one regressor")
    sp.add_argument("--variants", choices=("all", "native", "augmented"), default="all",
                    help="variants ranked in the critical diagram")
    sp.add_argument("--out", help="output directory (default: next to the first records file)")
    sp.set_defaults(func=cmd_report)

    sp = sub.add_parser("validate", help="load and preprocess a dataset, print a summary")
    sp.add_argument("dataset")
    sp.add_argument("target")
    sp.add_argument("--delimiter", default=",")
    sp.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
