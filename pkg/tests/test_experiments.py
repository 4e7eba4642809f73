"""Sweep drivers and the command-line surface."""

from __future__ import annotations

import json
import os

import pytest

from mlosim import cli, experiments
from mlosim.engine import ScenarioConfig, scenario_to_dict
from mlosim.errors import ConfigError, SimulationError
from mlosim.metrics import CSV_COLUMNS, read_summary_csv
from mlosim.traffic import DL, UL

FAST = dict(seeds=2, duration_s=0.2)


def test_parse_links_spec() -> None:
    assert experiments.parse_links_spec("2x80") == (2, 80)
    assert experiments.parse_links_spec("1x320") == (1, 320)
    for bad in ("", "2x", "x80", "2y80", "0x80"):
        with pytest.raises(ConfigError):
            experiments.parse_links_spec(bad)
    # syntax parses; the unsupported width is rejected by the link layer
    with pytest.raises(ConfigError):
        experiments.capacity_sweep("MLO_STR", "2x30", 11, 1, **FAST)


def test_scenario_id_format() -> None:
    config = experiments.make_scenario("MLO_STR", 2, 80, 11, 6)
    assert experiments.scenario_id(config) == "mlo_str-2x80-mcs11-k6"


def test_make_scenario_link_layout() -> None:
    config = experiments.make_scenario("MLO_STR", 4, 40, 8, 2)
    assert [lk.bandwidth_mhz for lk in config.links] == [40] * 4
    assert len({lk.link_id for lk in config.links}) == 4
    with pytest.raises(ConfigError):
        experiments.make_scenario("SLO", 2, 80, 11, 1)


def test_evaluate_point_rows_and_reports() -> None:
    point = experiments.evaluate_point(
        experiments.make_scenario("SLO", 1, 80, 11, 1, 0.2, 2)
    )
    assert point.report(DL, "video").n_samples > 0
    assert point.report(UL, "all").n_samples > 0
    assert {r["direction"] for r in point.rows} == {DL, UL}
    assert experiments.direction_passes(point, DL) == point.verdict.dl_p75_le_5ms
    with pytest.raises(ConfigError):
        experiments.direction_passes(point, "diagonal")


def test_min_mcs_map_shares_cache(tmp_path, monkeypatch) -> None:
    calls = {"n": 0}
    real = experiments.evaluate_point

    def counting(config, **kwargs):
        calls["n"] += 1
        return real(config, **kwargs)

    monkeypatch.setattr(experiments, "evaluate_point", counting)
    cache: dict = {}
    dl = experiments.min_mcs_map("SLO", [80], DL, cache=cache,
                                 out_dir=str(tmp_path), **FAST)
    after_dl = calls["n"]
    ul = experiments.min_mcs_map("SLO", [80], UL, cache=cache,
                                 out_dir=str(tmp_path), **FAST)
    assert calls["n"] - after_dl <= max(after_dl, 1)  # DL points were reused
    assert set(dl) == set(ul) == {80}
    assert os.path.exists(tmp_path / "min-mcs-slo-dl.csv")
    assert os.path.exists(tmp_path / "min-mcs-points-slo-ul.csv")
    assert os.path.exists(tmp_path / "min-mcs-slo-dl.manifest.json")


def test_capacity_sweep_outputs(tmp_path) -> None:
    result = experiments.capacity_sweep(
        "SLO", "1x80", 11, 2, out_dir=str(tmp_path), **FAST)
    assert set(result.points) == {1, 2}
    assert 0 <= result.capacity <= 2
    rows = read_summary_csv(str(tmp_path / "capacity-slo-1x80-mcs11.csv"))
    assert {r["n_users"] for r in rows} == {"1", "2"}
    assert all(tuple(r) == CSV_COLUMNS for r in rows)
    manifest = json.loads(
        (tmp_path / "capacity-slo-1x80-mcs11.manifest.json").read_text()
    )
    assert manifest["seeds"] == [0, 1]


def test_capacity_sweep_argument_errors() -> None:
    with pytest.raises(ConfigError):
        experiments.capacity_sweep("SLO", "2x80", 11, 2, **FAST)
    with pytest.raises(ConfigError):
        experiments.capacity_sweep("MLO_STR", "2x80", 11, 0, **FAST)


def test_link_split_validates_total() -> None:
    with pytest.raises(ConfigError):
        experiments.link_split_compare(160, ["2x80", "3x40"], 11, 2, **FAST)


def test_two_slo_pair_capacity() -> None:
    sweep = experiments.capacity_sweep("SLO", "1x80", 11, 1, **FAST)
    assert experiments.two_slo_pair_capacity(sweep) == 2 * sweep.capacity


# -- command line ---------------------------------------------------------


def write_config(tmp_path, **overrides) -> str:
    data = scenario_to_dict(ScenarioConfig(duration_s=0.2, seeds=2))
    data.update(overrides)
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


def test_cli_run_writes_metrics(tmp_path, capsys) -> None:
    config = write_config(tmp_path)
    out = tmp_path / "out"
    assert cli.main(["run", "--config", config, "--out", str(out)]) == 0
    rows = read_summary_csv(str(out / "metrics.csv"))
    assert rows and all(tuple(r) == CSV_COLUMNS for r in rows)
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config"]["duration_s"] == 0.2
    assert "metrics.csv" in capsys.readouterr().out


def test_cli_run_overrides_budget(tmp_path) -> None:
    config = write_config(tmp_path)
    out = tmp_path / "out2"
    assert cli.main(["run", "--config", config, "--seeds", "1",
                     "--duration", "0.1", "--out", str(out)]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config"]["seeds"] == 1
    assert manifest["config"]["duration_s"] == 0.1


def test_cli_trace_csv(tmp_path) -> None:
    config = write_config(tmp_path)
    out = tmp_path / "trace.csv"
    assert cli.main(["trace", "--config", config, "--bin-ms", "1",
                     "--out", str(out)]) == 0
    lines = out.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "bin_start_s,kind,bytes"
    first = lines[1].split(",")
    assert float(first[0]) == 0.0
    kinds = {line.split(",")[1] for line in lines[1:]}
    assert kinds == {"video", "audio", "tracking", "stats"}


def test_cli_sweep_capacity(tmp_path, capsys) -> None:
    out = tmp_path / "sweep"
    code = cli.main(["sweep", "capacity", "--mode", "slo", "--links", "1x80",
                     "--mcs", "11", "--max-users", "1", "--seeds", "2",
                     "--duration", "0.2", "--out", str(out)])
    assert code == 0
    assert "capacity 1x80" in capsys.readouterr().out
    assert (out / "capacity-slo-1x80-mcs11.csv").exists()


def test_cli_config_errors_exit_2(tmp_path, capsys) -> None:
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"mode": "SLO", "warp_factor": 9}), encoding="utf-8")
    assert cli.main(["run", "--config", str(bad), "--out", str(tmp_path)]) == 2
    assert "configuration error" in capsys.readouterr().err
    config = write_config(tmp_path)
    assert cli.main(["trace", "--config", config, "--bin-ms", "-1",
                     "--out", str(tmp_path / "t.csv")]) == 2


def test_cli_simulation_errors_exit_3(tmp_path, monkeypatch, capsys) -> None:
    config = write_config(tmp_path)

    def explode(*args, **kwargs):
        raise SimulationError("synthetic fault")

    monkeypatch.setattr(cli, "run_ensemble", explode)
    assert cli.main(["run", "--config", config, "--out", str(tmp_path)]) == 3
    assert "simulation error" in capsys.readouterr().err
