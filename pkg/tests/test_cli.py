import csv
import json
import subprocess
import sys
from pathlib import Path

import pytest

from qhdlab.cli import main
from qhdlab.config import read_config, write_config

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

NLS = {
    "run": {"kind": "nls", "eps": "0.5", "seed": "7"},
    "grid": {"dim": "1", "n": "128", "length": "30"},
    "law": {"name": "cubic"},
    "data": {"family": "gaussian", "width": "1.0", "momentum": "0.5"},
    "time": {"T": "0.2", "dt": "1e-3", "observe_every": "0.05", "snapshot_every": "0.1"},
}


def _write(tmp_path, raw, name="c.ini"):
    p = tmp_path / name
    write_config(raw, p)
    return str(p)


def test_run_writes_artifacts(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["run", "--config", _write(tmp_path, NLS), "--out", str(out)]) == 0
    assert json.loads(capsys.readouterr().out)["status"] == "ok"
    man = json.loads((out / "manifest.json").read_text())
    assert man["status"] == "ok" and man["seed"] == 7 and man["config"] == NLS
    assert man["wall_time_s"] >= 0 and "numpy" in man["versions"]
    assert read_config(out / "config.ini") == NLS
    rows = list(csv.DictReader(open(out / "diagnostics.csv")))
    assert len(rows) == 5 and float(rows[-1]["t"]) == pytest.approx(0.2)
    assert sorted(p.name for p in (out / "snapshots").iterdir())[:2] == ["psi_0000.bin",
                                                                         "psi_0000.json"]


def test_runs_are_bitwise_reproducible(tmp_path):
    cfg = _write(tmp_path, NLS)
    for d in ("a", "b"):
        assert main(["run", "--config", cfg, "--out", str(tmp_path / d)]) == 0
    for f in ("diagnostics.csv", "snapshots/psi_0002.bin"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_seed_flag_overrides_config(tmp_path):
    out = tmp_path / "o"
    main(["run", "--config", _write(tmp_path, NLS), "--out", str(out), "--seed", "99"])
    assert json.loads((out / "manifest.json").read_text())["seed"] == 99


def test_default_output_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("QHDLAB_OUT", str(tmp_path / "root"))
    assert main(["run", "--config", _write(tmp_path, NLS, "named.ini")]) == 0
    assert (tmp_path / "root" / "named" / "manifest.json").exists()


def test_validation_error_exit_2(tmp_path, capsys):
    bad = {**NLS, "run": {"kind": "nls", "eps": "-0.5"}}
    assert main(["run", "--config", _write(tmp_path, bad), "--out", str(tmp_path / "o")]) == 2
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["error"] == "validation" and "eps" in err["message"]
    assert (tmp_path / "o" / "error.json").exists()


def test_embedding_gate_exit_2(tmp_path, capsys):
    code = main(["run", "--config", str(CONFIGS / "weakqhd_bad_sigma.ini"),
                 "--out", str(tmp_path / "o")])
    assert code == 2
    assert "W^{1,1}" in capsys.readouterr().err


def test_cfl_violation_and_override(tmp_path):
    fast = {**NLS, "time": {**NLS["time"], "dt": "0.05", "snapshot_every": ""}}
    cfg = _write(tmp_path, fast)
    assert main(["run", "--config", cfg, "--out", str(tmp_path / "a")]) == 2
    assert json.loads((tmp_path / "a" / "manifest.json").read_text())["status"] == "validation"
    assert main(["run", "--config", cfg, "--out", str(tmp_path / "b"), "--override-cfl"]) in (0, 3)


def test_breakdown_exit_3(tmp_path):
    raw = read_config(CONFIGS / "euler_compact.ini")
    raw["grid"]["n"] = "512"
    raw["time"]["dt"] = "1e-3"
    out = tmp_path / "o"
    assert main(["run", "--config", _write(tmp_path, raw), "--out", str(out)]) == 3
    rep = json.loads((out / "breakdown.json").read_text())
    assert rep["triggered"] and rep["cause"] == "gradient_blowup" and 0.9 < rep["time"] < 1.3
    assert json.loads((out / "manifest.json").read_text())["status"] == "breakdown"


def test_run_rejects_list_config(tmp_path):
    raw = {**NLS, "run": {"kind": "nls", "eps": "0.5, 1.0"}}
    assert main(["run", "--config", _write(tmp_path, raw)]) == 2


def test_sweep_all_ok_and_partial(tmp_path, capsys):
    raw = {**NLS, "time": {"T": "0.05", "dt": "1e-3"}, "run": {"kind": "nls", "eps": "0.5, 1.0"}}
    out = tmp_path / "s"
    assert main(["sweep", "--config", _write(tmp_path, raw), "--out", str(out)]) == 0
    rows = list(csv.DictReader(open(out / "summary.csv")))
    assert [r["run.eps"] for r in rows] == ["0.5", "1.0"]
    assert all(r["status"] == "ok" for r in rows)
    raw["run"]["eps"] = "0.5, -1.0"
    out = tmp_path / "p"
    assert main(["sweep", "--config", _write(tmp_path, raw), "--out", str(out)]) == 5
    report = json.loads((out / "sweep.json").read_text())
    assert report["statuses"] == ["ok", "validation"] and report["failed"] == 1
    assert (out / "cell_001" / "error.json").exists()
    raw["run"]["eps"] = "-0.5, -1.0"
    assert main(["sweep", "--config", _write(tmp_path, raw), "--out", str(tmp_path / "f")]) == 2


def test_sweep_needs_lists(tmp_path):
    assert main(["sweep", "--config", _write(tmp_path, NLS)]) == 2


def test_euler_limit_sweep_writes_fit(tmp_path):
    out = tmp_path / "e"
    assert main(["sweep", "--config", str(CONFIGS / "euler_limit_sweep.ini"),
                 "--out", str(out), "--jobs", "1"]) == 0
    fit = json.loads((out / "fit.json").read_text())
    assert abs(fit["slope"] - 2.0) < 0.25
    assert (out / "fit.csv").read_text().startswith("eps,error")


def test_verify_unknown_suite(capsys):
    assert main(["verify", "nonsense"]) == 2
    assert "unknown suite" in capsys.readouterr().err


def test_verify_suite_writes_report(tmp_path, capsys):
    assert main(["verify", "identities", "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "identities.json").read_text())
    assert doc["passed"] and all(c["passed"] for c in doc["checks"])
    assert "[PASS]" in capsys.readouterr().out


def test_list_experiments(capsys):
    assert main(["list-experiments"]) == 0
    text = capsys.readouterr().out
    for word in ("nls", "harness:kdv", "weakqhd", "vortex"):
        assert word in text


def test_module_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "qhdlab", "list-experiments"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "experiments:" in r.stdout
    r = subprocess.run([sys.executable, "-m", "qhdlab", "run"], capture_output=True, text=True)
    assert r.returncode == 2  # argparse usage error
