import pytest

from qhdlab.config import ConfigError, RunConfig, expand, read_config, sweep_axes, write_config

BASE = {
    "run": {"kind": "nls", "eps": "0.5"},
    "grid": {"dim": "1", "n": "64", "length": "20"},
    "law": {"name": "cubic"},
    "data": {"family": "gaussian", "width": "1.5"},
    "time": {"T": "0.1", "dt": "1e-3"},
}


def _cfg(**over):
    raw = {s: dict(v) for s, v in BASE.items()}
    for key, val in over.items():
        sec, k = key.split("__")
        raw.setdefault(sec, {})[k] = val
    return raw


def test_parse_roundtrip(tmp_path):
    write_config(BASE, tmp_path / "c.ini")
    raw = read_config(tmp_path / "c.ini")
    assert raw == BASE
    cfg = RunConfig.from_raw(raw)
    assert cfg.eps == 0.5 and cfg.n == 64 and cfg.data_params == {"width": 1.5}
    assert cfg.grid().dx == pytest.approx(20 / 64)


def test_inline_comments(tmp_path):
    p = tmp_path / "c.ini"
    p.write_text("[run]\nkind = nls   # the solver\neps = 0.25 ; small\n")
    assert read_config(p)["run"] == {"kind": "nls", "eps": "0.25"}


def test_unreadable_config(tmp_path):
    with pytest.raises(ConfigError):
        read_config(tmp_path / "missing.ini")
    (tmp_path / "bad.ini").write_text("no section header\n")
    with pytest.raises(ConfigError):
        read_config(tmp_path / "bad.ini")


@pytest.mark.parametrize("over", [
    {"run__kind": "teleport"}, {"run__kind": "harness:nothing"}, {"run__eps": "-1"},
    {"run__eps": "abc"}, {"time__T": "0"}, {"time__dt": "-1"}, {"grid__n": "96"},
    {"law__name": "quartic"}, {"data__family": ""}, {"tolerances__gradient_ratio": "big"},
])
def test_invalid_values(over):
    with pytest.raises(ConfigError):
        RunConfig.from_raw(_cfg(**over))


def test_missing_required():
    raw = _cfg()
    del raw["grid"]["n"]
    with pytest.raises(ConfigError, match="n"):
        RunConfig.from_raw(raw)


def test_embedding_gate_names_the_hypothesis():
    raw = _cfg(run__kind="harness:weakqhd", run__eps="1.0", grid__dim="2", law__name="power",
               law__sigma="2")
    with pytest.raises(ConfigError, match=r"W\^\{1,1\}"):
        RunConfig.from_raw(raw)
    raw["law"]["sigma"] = "0.5"
    assert RunConfig.from_raw(raw).sigma == 0.5
    del raw["law"]["sigma"]
    with pytest.raises(ConfigError, match="sigma"):
        RunConfig.from_raw(raw)


def test_korteweg_needs_kappa():
    with pytest.raises(ConfigError, match="kappa"):
        RunConfig.from_raw(_cfg(run__kind="korteweg", law__capillarity="constant"))
    assert RunConfig.from_raw(_cfg(run__kind="korteweg", law__capillarity="qhd"))


def test_cfl_guard():
    cfg = RunConfig.from_raw(_cfg())
    with pytest.raises(ConfigError, match="override-cfl"):
        cfg.check_cfl(1e-4, "test", override=False)
    cfg.check_cfl(1e-4, "test", override=True)
    cfg.check_cfl(1e-3, "test", override=False)


def test_sweep_expansion():
    raw = _cfg(run__eps="0.1, 0.2,0.4", data__width="1,2")
    axes = sweep_axes(raw)
    assert axes[("run", "eps")] == ["0.1", "0.2", "0.4"]
    cells = expand(raw)
    assert len(cells) == 6
    assert {(p["run.eps"], p["data.width"]) for p, _ in cells} == {
        (e, w) for e in ("0.1", "0.2", "0.4") for w in ("1", "2")}
    for p, cell in cells:
        assert RunConfig.from_raw(cell).eps == float(p["run.eps"])
    assert raw["run"]["eps"] == "0.1, 0.2,0.4"  # input untouched
    with pytest.raises(ConfigError, match="lists"):
        RunConfig.from_raw(raw)
    with pytest.raises(ConfigError, match="empty"):
        sweep_axes(_cfg(run__eps=" , "))
