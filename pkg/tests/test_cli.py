import json
import subprocess
import sys

import pytest

from orderdag import __version__
from orderdag.cli import build_parser, main
from orderdag.graph import dag_from_json


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert capsys.readouterr().out.strip() == f"orderdag {__version__}"


def test_help_lists_defaults():
    parser = build_parser()
    sub = parser._subparsers._group_actions[0].choices
    assert set(sub) == {"sample", "design", "sweep", "couple", "verify", "bounds", "repro-thm13"}
    text = sub["bounds"].format_help()
    assert "--range-override" in text and "(default: 0.01)" in text


def test_sample_and_design(capsys, tmp_path):
    code, out, _ = run(capsys, "sample", "--n", "6", "--rho", "0.5", "--seed", "2")
    assert code == 0 and dag_from_json(out).n == 6
    path = tmp_path / "g.json"
    path.write_text(out)
    code, out, err = run(capsys, "design", "--input", str(path), "--r", "2", "--format", "json",
                         "--trace")
    assert code == 0 and "chosen" in json.loads(out)
    assert all(json.loads(line)["rule"] for line in err.splitlines())
    code, out, _ = run(capsys, "sample", "--n", "3", "--format", "edges")
    assert out.startswith("# n = 3")


def test_sweep_and_config_overlay(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n_values": [3], "rho_values": [0.5], "samples": 40}))
    records = tmp_path / "rec.csv"
    code, out, _ = run(capsys, "sweep", "--config", str(cfg), "--samples", "20",
                       "--records-out", str(records))
    assert code == 0
    rows = out.splitlines()
    assert rows[0].startswith("n,rho,r,metric")
    assert all(row.split(",")[4] == "20" for row in rows[1:])
    assert len(records.read_text().splitlines()) == 21


def test_usage_errors(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"nope": 1}))
    assert run(capsys, "sweep", "--config", str(cfg))[0] == 2
    assert run(capsys, "bounds", "--mean", "1.0")[0] == 2
    assert run(capsys, "bounds", "--metric", "I", "--samples", "10")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["bounds", "--rho", "2"])
    assert exc.value.code == 2


def test_workers_env(capsys, monkeypatch):
    monkeypatch.setenv("ORDERDAG_WORKERS", "x")
    assert run(capsys, "couple", "--n", "4", "--samples", "5")[0] == 2


def test_bounds_output(capsys):
    code, out, _ = run(capsys, "bounds", "--mean", "3.394", "--var", "7.054",
                       "--range-override", "450")
    assert code == 0
    fields = dict(line.rsplit("  ", 1) for line in out.splitlines())
    assert float(fields["Bernstein upper bound".ljust(27)].strip()) == pytest.approx(3.47697309, rel=1e-8)
    code, out, _ = run(capsys, "bounds", "--samples", "500", "--n", "8", "--format", "json")
    rep = json.loads(out)
    assert rep["s"] == 500 and rep["lower"] == rep["M"]


def test_repro_and_couple_and_verify(capsys):
    code, out, _ = run(capsys, "repro-thm13", "--samples", "3000", "--range-override", "450")
    assert code == 0 and "E[log2 L_inf] <= E[X_inf] <=" in out
    code, out, _ = run(capsys, "couple", "--n", "4", "--samples", "30")
    assert code == 0 and "violations: 0" in out
    code, out, _ = run(capsys, "verify", "--max-n", "3", "--samples", "5")
    assert code == 0 and "0 mismatches" in out


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "orderdag.cli", "sample", "--n", "2", "--rho", "1"],
                          capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)["directed"] == [[0, 1]]
