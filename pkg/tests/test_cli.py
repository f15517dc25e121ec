import csv
import io
import json

import pytest

from girth_triples.catalog import PASCH
from girth_triples.cli import main


def test_catalog_command(tmp_path, monkeypatch):
    monkeypatch.setenv("GIRTH_TRIPLES_OUTPUT_DIR", str(tmp_path))
    assert main(["catalog", "--ell", "6", "--out", "cat.json"]) == 0
    data = json.loads((tmp_path / "cat.json").read_text())
    assert data["ell"] == 6 and len(data["obstructions"]) == 2
    assert data["obstructions"][1]["aut"] == 24


def test_run_verify_pipeline(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("GIRTH_TRIPLES_OUTPUT_DIR", str(tmp_path))
    assert main(["run", "--n", "40", "--ell", "6", "--seed", "2", "--times", "0.05",
                 "--pair-samples", "10", "--triple-samples", "2",
                 "--out", "rec.json", "--triples-out", "h.txt"]) == 0
    rec = json.loads((tmp_path / "rec.json").read_text())
    assert rec["schema_version"] == 1 and rec["terminal"]["m"] > 0
    lines = (tmp_path / "h.txt").read_text().splitlines()
    assert len(lines) == rec["terminal"]["m"]
    capsys.readouterr()
    assert main(["verify", "--in", str(tmp_path / "h.txt"), "--ell", "6"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["girth_ok"] and rep["partial_sts_ok"]

    assert main(["report", "--in", str(tmp_path / "rec.json"), "--tol-q", "1", "--tol-y", "1",
                 "--tol-w", "1"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["all_pass"] and rep["schema_version"] == 1


def test_run_csv(tmp_path):
    out = tmp_path / "rec.csv"
    assert main(["run", "--n", "30", "--ell", "4", "--times", "0", "0.1", "--out", str(out)]) == 0
    text = out.read_text()
    assert text.startswith("# schema_version=1")
    assert len(text.splitlines()) == 4


def test_verify_failure_exit_code(tmp_path, capsys):
    f = tmp_path / "pasch.txt"
    f.write_text("# a Pasch configuration\n" + "".join(f"{a} {b} {c}\n" for a, b, c in PASCH))
    assert main(["verify", "--in", str(f), "--ell", "6"]) == 1
    assert json.loads(capsys.readouterr().out)["girth_ok"] is False
    assert main(["verify", "--in", str(f), "--ell", "5"]) == 0


def test_trajectory_csv(capsys):
    assert main(["trajectory", "--ell", "7", "--n", "100", "--points", "5"]) == 0
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert rows[0][:5] == ["t", "p", "q", "q_hat", "y_hat"]
    assert len(rows[0]) == 5 + 3 + 4
    assert len(rows) == 6
    assert float(rows[1][2]) == 1.0


def test_config_precedence(tmp_path, capsys):
    cfg = tmp_path / "c.conf"
    cfg.write_text("# defaults\npoints = 3\nn = 50\n")
    assert main(["--config", str(cfg), "trajectory", "--ell", "6"]) == 0
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert len(rows) == 4
    assert main(["--config", str(cfg), "trajectory", "--ell", "6", "--points", "7"]) == 0
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert len(rows) == 8
    assert float(rows[1][4]) == 50.0
    bad = tmp_path / "bad.conf"
    bad.write_text("bogus = 1\n")
    with pytest.raises(SystemExit):
        main(["--config", str(bad), "trajectory", "--ell", "6"])


def test_report_counting(capsys):
    assert main(["report", "--counting", "--ell", "6", "--ns", "100"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["counting"][0]["n"] == 100
