import csv

import pytest
import yaml
from conftest import make_sine_dataset, write_csv

from threshaug.cli import main


@pytest.fixture
def cfg(tmp_path):
    write_csv(tmp_path / "a.csv", make_sine_dataset(60, seed=1))
    write_csv(tmp_path / "b.csv", make_sine_dataset(60, seed=2))
    data = {
        "datasets": [{"path": "a.csv", "target": "y", "name": "a"},
                     {"path": "b.csv", "target": "y", "name": "b"}],
        "experiment": {"s_values": [2, 4], "k": 3, "seed": 5},
        "forest": {"n_trees": 10},
        "regressors": [{"kind": "linear"}, {"kind": "tree", "grid": {"max_depth": [2, None]}}],
        "output": {"dir": "out"},
    }
    path = tmp_path / "cfg.yaml"
    path.write_text(yaml.safe_dump(data))
    return path


def test_run_writes_records(cfg, tmp_path):
    assert main(["run", str(cfg)]) == 0
    out = tmp_path / "out"
    lines = (out / "records.jsonl").read_text().splitlines()
    assert len(lines) == 2 * 3 * 2 * 3
    for name in ("summary_s2.csv", "summary_s4.csv", "scurve_linear_a.tsv", "critical_diagram.tsv",
                 "timings.tsv"):
        assert (out / name).is_file()


def test_missing_config(tmp_path, capsys):
    path = tmp_path / "nope.yaml"
    assert main(["run", str(path)]) == 2
    assert str(path) in capsys.readouterr().err


def test_bad_config_key(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text("dataset: {path: x.csv, target: y}\nbogus: 1\n")
    assert main(["run", str(p)]) == 2


def test_missing_dataset_file(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text("dataset: {path: x.csv, target: y}\n")
    assert main(["run", str(p)]) == 3


def test_determinism_across_jobs(cfg, tmp_path):
    assert main(["run", str(cfg), "--jobs", "1", "--out", str(tmp_path / "r1")]) == 0
    assert main(["run", str(cfg), "--jobs", "3", "--out", str(tmp_path / "r2")]) == 0
    assert (tmp_path / "r1" / "records.jsonl").read_bytes() == (tmp_path / "r2" / "records.jsonl").read_bytes()


def test_sweep_overrides_s(cfg, tmp_path):
    assert main(["sweep", str(cfg), "--s", "3", "--out", str(tmp_path / "sw")]) == 0
    assert (tmp_path / "sw" / "summary_s3.csv").is_file()


def test_env_out(cfg, tmp_path, monkeypatch):
    monkeypatch.setenv("THRESHAUG_OUT", str(tmp_path / "env"))
    assert main(["run", str(cfg)]) == 0
    assert (tmp_path / "env" / "records.jsonl").is_file()


@pytest.fixture
def records(cfg, tmp_path):
    assert main(["run", str(cfg), "--out", str(tmp_path / "run")]) == 0
    return tmp_path / "run" / "records.jsonl"


def test_report_summary(records, tmp_path):
    assert main(["report", str(records), "--kind", "summary", "--s", "4", "--out", str(tmp_path / "rep")]) == 0
    assert (tmp_path / "rep" / "summary_s4.csv").is_file()


def test_report_cd(records, tmp_path):
    assert main(["report", str(records), "--kind", "cd", "--out", str(tmp_path / "rep")]) == 0
    rows = list(csv.reader((tmp_path / "rep" / "critical_diagram.tsv").open(), delimiter="\t"))
    assert len(rows) == 1 + 4


def test_report_scurve(records, tmp_path):
    assert main(["report", str(records), "--kind", "scurve", "--regressor", "tree", "--dataset", "a",
                 "--out", str(tmp_path / "rep")]) == 0
    rows = list(csv.reader((tmp_path / "rep" / "scurve_tree_a.tsv").open(), delimiter="\t"))
    assert [r[0] for r in rows[1:]] == ["2", "4"]


def test_report_absent_dataset(records, capsys):
    assert main(["report", str(records), "--kind", "summary", "--dataset", "zzz"]) != 0
    assert "zzz" in capsys.readouterr().err


def test_validate(tmp_path, capsys):
    p = tmp_path / "d.csv"
    p.write_text("a,c,y\n1,7,2\n2,7,3\n,7,4\n4,7,1\n")
    assert main(["validate", str(p), "y"]) == 0
    out = capsys.readouterr().out
    assert "rows: 3" in out and "constant" in out
    assert main(["validate", str(tmp_path / "zz.csv"), "y"]) == 3
