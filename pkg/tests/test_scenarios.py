#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
场景配置、运行、结果文件与命令行测试
"""

import copy
import json
import os

import pytest

import main as cli
from core import verification
from core.errors import ConfigError, SchemaMismatch, VerificationFailed
from core.scenarios import (KINDS, ScenarioRunner, load_scenario, validate_config, default_config,
                            output_directory, run, compare, probe_comparison, write_manifest)
from core.utils import read_csv, write_csv
from core.verification import CheckResult

SCENARIO_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "config", "scenarios")

SMALL_SHELL = {
    "kind": "shell-growth",
    "name": "small_shell",
    "units": {"system": "natural"},
    "shell": {"q0": 1.0, "r0": 1.0, "tau": 1.0, "law": "exponential"},
    "grid": {"r_max": 9.0, "n": 128, "cfl": 1.0},
    "run": {"t_end": 4.0},
    "probes": {"radii": [3.0], "flux_radius": 5.0, "record_every": 1},
    "output": {},
}


def _write(tmp_path, config, name="scenario.json"):
    path = tmp_path / name
    path.write_text(json.dumps(config), encoding="utf-8")
    return str(path)


def test_shipped_scenarios_are_valid():
    kinds = set()
    for name in sorted(os.listdir(SCENARIO_DIR)):
        config = load_scenario(os.path.join(SCENARIO_DIR, name))
        kinds.add(config["kind"])
    assert kinds == set(KINDS)


@pytest.mark.parametrize("path, value, key", [
    (("grid", "n"), 8, "grid.n"),
    (("grid", "n"), 32, "grid.n"),
    (("grid", "cfl"), 0.5, "grid.cfl"),
    (("grid", "r_max"), 0.5, "grid.r_max"),
    (("probes", "radii"), [3.0, 12.0], "probes.radii[1]"),
    (("probes", "flux_radius"), 20.0, "probes.flux_radius"),
    (("shell", "tau"), -1.0, "shell.tau"),
    (("shell", "law"), "pulse", "shell.law"),
    (("units", "system"), "gaussian", "units.system"),
    (("run", "t_end"), "long", "run.t_end"),
    (("probes", "tolerance"), -1.0, "probes.tolerance"),
])
def test_shell_config_errors_name_the_key(path, value, key):
    config = copy.deepcopy(SMALL_SHELL)
    config[path[0]][path[1]] = value
    with pytest.raises(ConfigError) as info:
        validate_config(config)
    assert info.value.key == key


def test_other_config_errors_name_the_key():
    orbit = default_config("two-charge-orbit")
    orbit["particle"]["x"] = [1.0, 0.0]
    with pytest.raises(ConfigError) as info:
        validate_config(orbit)
    assert info.value.key == "particle.x"

    cycle = default_config("wigner-cycle")
    cycle["cycle"]["m0"] = -1.0
    with pytest.raises(ConfigError) as info:
        validate_config(cycle)
    assert info.value.key == "cycle.m0"

    dispersion = default_config("massive-dispersion")
    dispersion["dispersion"]["modes"] = [0, 1]
    with pytest.raises(ConfigError) as info:
        validate_config(dispersion)
    assert info.value.key == "dispersion.modes"

    with pytest.raises(ConfigError) as info:
        validate_config({"kind": "tokamak"})
    assert info.value.key == "kind"


def test_load_scenario_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_scenario(str(tmp_path / "missing.json"))
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_scenario(str(bad))


def test_load_scenario_merges_defaults_and_names(tmp_path):
    path = _write(tmp_path, {"kind": "wigner-cycle", "cycle": {"phi1": 2.0}}, "my_cycle.json")
    config = load_scenario(path)
    assert config["name"] == "my_cycle"
    assert config["cycle"] == {"phi1": 2.0, "phi2": 0.1, "m0": 10.0, "M0": 100.0}


def test_output_directory_precedence(monkeypatch):
    config = default_config("wigner-cycle")
    monkeypatch.setenv("NCCE_OUTPUT_ROOT", "/tmp/ncce-root")
    assert output_directory(config) == os.path.join("/tmp/ncce-root", "wigner-cycle")
    config["output"]["directory"] = "from-config"
    assert output_directory(config) == "from-config"
    assert output_directory(config, "from-cli") == "from-cli"


def test_shell_run_writes_results_and_manifest(tmp_path):
    outcome = ScenarioRunner(copy.deepcopy(SMALL_SHELL), str(tmp_path / "run")).run()
    names = sorted(os.path.basename(f) for f in outcome.files)
    assert names == ["balance.csv", "ledger.json", "manifest.json", "oracle.csv", "probes.csv", "summary.json"]
    probes = read_csv(str(tmp_path / "run" / "probes.csv"))
    assert list(probes) == ["t", "r", "field", "value"]
    assert set(probes["field"]) == {"eps", "E_r"}
    manifest = json.loads((tmp_path / "run" / "manifest.json").read_text(encoding="utf-8"))
    paths = [e["path"] for e in manifest["files"]]
    assert paths == sorted(paths)
    assert all(len(e["sha256"]) == 64 for e in manifest["files"])
    summary = json.loads((tmp_path / "run" / "summary.json").read_text(encoding="utf-8"))
    comparison = summary["probe_comparison"]
    assert comparison["passed"] and comparison["tolerance"] == pytest.approx(1e-2)
    assert comparison["columns"]["field"]["mismatches"] == 0
    assert 0.0 < comparison["columns"]["value"]["max"] < 1e-2
    assert not probe_comparison(str(tmp_path / "run"), 1e-12).passed


def test_results_are_deterministic(tmp_path):
    ScenarioRunner(copy.deepcopy(SMALL_SHELL), str(tmp_path / "a")).run()
    ScenarioRunner(copy.deepcopy(SMALL_SHELL), str(tmp_path / "b")).run()
    for name in ("manifest.json", "probes.csv", "ledger.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_orbit_and_cycle_runs(tmp_path):
    orbit = default_config("two-charge-orbit")
    orbit["pusher"].update({"dt": 0.01, "steps": 200, "record_every": 20})
    outcome = ScenarioRunner(orbit, str(tmp_path / "orbit")).run()
    rows = read_csv(str(tmp_path / "orbit" / "trajectory.csv"))
    assert len(rows["t"]) == 11
    assert outcome.summary["mass_change"] == pytest.approx(0.0, abs=1e-15)
    assert outcome.summary["invariant_drift"] < 1e-6

    outcome = ScenarioRunner(default_config("wigner-cycle"), str(tmp_path / "cycle")).run()
    assert outcome.summary["relative_residual"] <= 1e-12
    assert "birth" in outcome.text


def test_plane_wave_run(tmp_path):
    config = default_config("plane-wave")
    config["grid"]["n"] = 64
    config["run"]["crossings"] = 1
    outcome = ScenarioRunner(config, str(tmp_path / "pw")).run()
    assert outcome.summary["phase_speed_ratio"] == pytest.approx(1.0, abs=1e-2)
    assert os.path.exists(tmp_path / "pw" / "probes.csv")


def test_write_manifest_has_no_timestamps(tmp_path):
    path = write_csv(str(tmp_path / "x.csv"), ("a",), [(1.0,)])
    manifest = json.loads(open(write_manifest(str(tmp_path), [path], "plane-wave"), encoding="utf-8").read())
    assert set(manifest) == {"app", "version", "kind", "files"}
    assert manifest["files"][0]["bytes"] == os.path.getsize(path)


def test_compare(tmp_path):
    a = write_csv(str(tmp_path / "a.csv"), ("t", "field", "value"), [(0.0, "eps", 1.0), (1.0, "eps", 2.0)])
    b = write_csv(str(tmp_path / "b.csv"), ("t", "field", "value"), [(0.0, "eps", 1.0), (1.0, "eps", 2.5)])
    report = compare(a, b, 1.0)
    assert report.passed
    assert report.columns["value"]["max"] == pytest.approx(0.5)
    assert not compare(a, b, 0.1).passed
    assert "value" in report.format()

    c = write_csv(str(tmp_path / "c.csv"), ("t", "value"), [(0.0, 1.0), (1.0, 2.0)])
    with pytest.raises(SchemaMismatch):
        compare(a, c, 1.0)
    d = write_csv(str(tmp_path / "d.csv"), ("t", "field", "value"), [(0.0, "eps", 1.0)])
    with pytest.raises(SchemaMismatch):
        compare(a, d, 1.0)
    e = write_csv(str(tmp_path / "e.csv"), ("t", "field", "value"), [(0.0, "E_r", 1.0), (1.0, "eps", 2.0)])
    assert compare(a, e, 1.0).columns["field"]["mismatches"] == 1


def test_verify_all_failure_raises(tmp_path, monkeypatch):
    monkeypatch.setitem(verification.CHECKS, "always_fails",
                        lambda: CheckResult("always_fails", False, 1.0, 0.0, "forced"))
    path = _write(tmp_path, {"kind": "verify-all", "verification": {"workers": 2, "checks": ["always_fails"]},
                             "output": {"directory": str(tmp_path / "verify")}})
    with pytest.raises(VerificationFailed):
        run(path)
    rows = read_csv(str(tmp_path / "verify" / "verification.csv"))
    assert rows["status"] == ["FAIL"]


def test_cli_exit_codes(tmp_path, output_root):
    good = _write(tmp_path, default_config("wigner-cycle"), "cycle.json")
    assert cli.main(["run", good]) == 0
    assert (output_root / "wigner-cycle" / "manifest.json").exists()

    assert cli.main(["run", str(tmp_path / "missing.json")]) == ConfigError.exit_code
    broken = copy.deepcopy(SMALL_SHELL)
    broken["grid"]["n"] = 4
    assert cli.main(["run", _write(tmp_path, broken, "broken.json")]) == 2

    a = write_csv(str(tmp_path / "a.csv"), ("t",), [(0.0,)])
    b = write_csv(str(tmp_path / "b.csv"), ("x",), [(0.0,)])
    assert cli.main(["compare", a, b]) == SchemaMismatch.exit_code
    assert cli.main(["compare", a, a]) == 0


def test_cli_verify_subset(tmp_path, output_root):
    code = cli.main(["verify-all", "--checks", "wigner_cycle", "--output", str(tmp_path / "v"), "--workers", "1"])
    assert code == 0
    assert read_csv(str(tmp_path / "v" / "verification.csv"))["check"] == ["wigner_cycle"]
