#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
场景管理模块
负责场景配置的加载与校验、按类型分发到求解器/解析解/粒子推进/循环账目，
写出确定性的 CSV/JSON 结果与清单，以及结果文件比较
"""

import os
import copy
import json
import math
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from config.settings import (APP_NAME, APP_VERSION, OUTPUT_CONFIG, PATHS, PUSHER_CONFIG, PERFORMANCE_CONFIG,
                             VERIFICATION_CONFIG)
from .analytic_shell import (ShellSpec, balance_ledger, flux_quadrature, rest_energy_quadrature,
                             coulomb_energy)
from .conservation import discrete_balance, time_integrated_ledger
from .errors import ConfigError, SchemaMismatch, VerificationFailed
from .field_model import Units
from .grid_solver import INNER_NODES, run_scenario, shell_law_from_config
from .particle_dynamics import ParticleState, TRAJECTORY_HEADER, coulomb_sampler, shell_sampler, trajectory
from .utils import load_config, save_config, write_csv, read_csv, file_digest
from .wigner_ledger import CycleConfig, run_cycle, format_table

logger = logging.getLogger(__name__)

KINDS = ("shell-growth", "shell-decay", "plane-wave", "massive-dispersion",
         "two-charge-orbit", "wigner-cycle", "verify-all")

_SHELL_DEFAULT = {
    "units": {"system": "natural"},
    "shell": {"q0": 1.0, "r0": 1.0, "tau": 1.0, "law": "exponential"},
    "grid": {"r_max": 33.0, "n": 2048, "cfl": 1.0},
    "run": {"t_end": 31.0},
    "probes": {"radii": [3.0, 5.0], "flux_radius": 5.0, "record_every": 1},
    "output": {},
}

DEFAULT_CONFIGS: Dict[str, Dict[str, Any]] = {
    "shell-growth": _SHELL_DEFAULT,
    "shell-decay": _SHELL_DEFAULT,
    "plane-wave": {
        "units": {"system": "natural"},
        "grid": {"x_min": 0.0, "x_max": 1.0, "n": 1024, "cfl": 0.5, "boundary": "periodic"},
        "wave": {"eps0": 1.0, "mode": 1},
        "run": {"crossings": 10},
        "probes": {"x": [0.5], "record_every": 64},
        "output": {},
    },
    "massive-dispersion": {
        "units": {"system": "natural", "kappa": 4.0 * math.pi},
        "grid": {"x_min": 0.0, "x_max": 1.0, "n": 512, "cfl": 0.5, "boundary": "periodic"},
        "dispersion": {"modes": [1, 2, 3, 4, 5], "periods": 15.0},
        "output": {},
    },
    "two-charge-orbit": {
        "units": {"system": "natural"},
        "source": {"type": "coulomb", "q": 1.0, "center": [0.0, 0.0, 0.0]},
        "particle": {"q": -1.0, "m": 1.0, "x": [1.0, 0.0, 0.0], "p": [0.0, 0.25, 0.0]},
        "pusher": {"dt": PUSHER_CONFIG["dt"], "steps": PUSHER_CONFIG["steps"], "record_every": 10},
        "output": {},
    },
    "wigner-cycle": {
        "units": {"system": "natural"},
        "shell": {"q0": 1.0, "r0": 1.0, "tau": 1.0},
        "cycle": {"phi1": 0.5, "phi2": 0.1, "m0": 10.0, "M0": 100.0},
        "output": {},
    },
    "verify-all": {
        "verification": {"workers": PERFORMANCE_CONFIG["thread_pool_size"], "checks": []},
        "output": {},
    },
}


# ---------------------------------------------------------------------------
# 配置加载与校验
# ---------------------------------------------------------------------------

def _lookup(config: Dict[str, Any], key: str) -> Any:
    node: Any = config
    for part in key.split("."):
        if not isinstance(node, dict) or part not in node:
            raise ConfigError(f"缺少配置项 {key}", key=key)
        node = node[part]
    return node


def _number(config: Dict[str, Any], key: str, positive: bool = False, integer: bool = False,
            minimum: Optional[float] = None) -> float:
    value = _lookup(config, key)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key} 必须为数值: {value!r}", key=key)
    if not math.isfinite(value):
        raise ConfigError(f"{key} 必须为有限数: {value}", key=key)
    if integer and int(value) != value:
        raise ConfigError(f"{key} 必须为整数: {value}", key=key)
    if positive and not value > 0:
        raise ConfigError(f"{key} 必须为正数: {value}", key=key)
    if minimum is not None and value < minimum:
        raise ConfigError(f"{key} 不能小于 {minimum}: {value}", key=key)
    return value


def _vector(config: Dict[str, Any], key: str) -> List[float]:
    value = _lookup(config, key)
    if not isinstance(value, list) or len(value) != 3 or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
        raise ConfigError(f"{key} 必须为三个数值组成的列表", key=key)
    return [float(v) for v in value]


def _validate_units(config: Dict[str, Any]) -> None:
    block = config.get("units", {})
    if not isinstance(block, dict):
        raise ConfigError("units 必须为对象", key="units")
    Units.from_config(block)


def _validate_shell(config: Dict[str, Any], mode: str) -> None:
    _number(config, "shell.q0")
    for key in ("shell.r0", "shell.tau"):
        _number(config, key, positive=True)
    shell_law_from_config(config["shell"], mode)


def validate_config(config: Dict[str, Any]) -> Dict[str, Any]:
    """
    校验场景配置，错误信息指明出错的键

    Args:
        config: 场景配置（已合并默认值）

    Returns:
        原配置

    Raises:
        ConfigError: 配置无效
    """
    if not isinstance(config, dict):
        raise ConfigError("场景配置必须为 JSON 对象", key="")
    kind = config.get("kind")
    if kind not in KINDS:
        raise ConfigError(f"未知场景类型: {kind!r}", key="kind")
    _validate_units(config)
    output = config.get("output", {})
    if not isinstance(output, dict):
        raise ConfigError("output 必须为对象", key="output")

    if kind in ("shell-growth", "shell-decay"):
        _validate_shell(config, "growth" if kind == "shell-growth" else "decay")
        r0 = float(config["shell"]["r0"])
        r_max = _number(config, "grid.r_max", positive=True)
        if not r_max > r0:
            raise ConfigError(f"grid.r_max 必须大于 r0 = {r0}", key="grid.r_max")
        n = _number(config, "grid.n", integer=True, minimum=16)
        if _number(config, "grid.cfl", positive=True) != 1.0:
            raise ConfigError("径向求解器要求 grid.cfl = 1", key="grid.cfl")
        if r0 < (INNER_NODES + 1) * (r_max - r0) / n:
            raise ConfigError(f"grid.n 过小：球壳内侧需要 {INNER_NODES} 个节点", key="grid.n")
        _number(config, "run.t_end", positive=True)
        flux_radius = _number(config, "probes.flux_radius", positive=True)
        if not r0 < flux_radius <= r_max:
            raise ConfigError("probes.flux_radius 必须位于 (r0, r_max] 内", key="probes.flux_radius")
        radii = _lookup(config, "probes.radii")
        if not isinstance(radii, list) or not radii:
            raise ConfigError("probes.radii 必须为非空列表", key="probes.radii")
        for i, r in enumerate(radii):
            if isinstance(r, bool) or not isinstance(r, (int, float)) or not r0 <= r <= r_max:
                raise ConfigError(f"探针半径无效: {r!r}", key=f"probes.radii[{i}]")
        _number(config, "probes.record_every", integer=True, minimum=1)
        if "tolerance" in config.get("probes", {}):
            _number(config, "probes.tolerance", positive=True)
    elif kind in ("plane-wave", "massive-dispersion"):
        _number(config, "grid.n", integer=True, minimum=16)
        _number(config, "grid.cfl", positive=True)
        if _number(config, "grid.x_max") <= _number(config, "grid.x_min"):
            raise ConfigError("grid.x_max 必须大于 grid.x_min", key="grid.x_max")
        if _lookup(config, "grid.boundary") not in ("periodic", "outflow"):
            raise ConfigError("grid.boundary 必须为 periodic 或 outflow", key="grid.boundary")
        if kind == "plane-wave":
            _number(config, "wave.eps0")
            _number(config, "wave.mode", integer=True, minimum=1)
            _number(config, "run.crossings", positive=True)
        else:
            _number(config, "dispersion.periods", positive=True)
            modes = _lookup(config, "dispersion.modes")
            if not isinstance(modes, list) or not modes or not all(
                    isinstance(m, int) and not isinstance(m, bool) and m >= 1 for m in modes):
                raise ConfigError("dispersion.modes 必须为正整数列表", key="dispersion.modes")
            _number(config, "units.kappa", positive=True)
    elif kind == "two-charge-orbit":
        source_type = _lookup(config, "source.type")
        if source_type == "coulomb":
            _number(config, "source.q")
            _vector(config, "source.center")
        elif source_type == "shell":
            block = _lookup(config, "source.shell")
            if not isinstance(block, dict):
                raise ConfigError("source.shell 必须为对象", key="source.shell")
            _validate_shell({"shell": block}, block.get("mode", "growth"))
        else:
            raise ConfigError(f"未知场源类型: {source_type!r}", key="source.type")
        _number(config, "particle.q")
        _number(config, "particle.m", positive=True)
        _vector(config, "particle.x")
        _vector(config, "particle.p")
        _number(config, "pusher.dt", positive=True)
        _number(config, "pusher.steps", integer=True, minimum=1)
        _number(config, "pusher.record_every", integer=True, minimum=1)
    elif kind == "wigner-cycle":
        _validate_shell(config, "growth")
        for key in ("cycle.phi1", "cycle.phi2"):
            _number(config, key)
        for key in ("cycle.m0", "cycle.M0"):
            _number(config, key, positive=True)
    else:
        _number(config, "verification.workers", integer=True, minimum=1)
        checks = _lookup(config, "verification.checks")
        if not isinstance(checks, list):
            raise ConfigError("verification.checks 必须为列表", key="verification.checks")
    return config


def load_scenario(file_path: str) -> Dict[str, Any]:
    """
    读取场景 JSON 并合并对应类型的默认配置

    Args:
        file_path: 场景文件路径

    Returns:
        已校验的配置

    Raises:
        ConfigError: 文件不存在、不是合法 JSON 或内容无效
    """
    try:
        raw = load_config(file_path)
    except FileNotFoundError as e:
        raise ConfigError(f"场景文件不存在: {file_path}", key="") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"场景文件不是合法 JSON: {e}", key="") from e
    if not isinstance(raw, dict):
        raise ConfigError("场景配置必须为 JSON 对象", key="")
    kind = raw.get("kind")
    if kind not in KINDS:
        raise ConfigError(f"未知场景类型: {kind!r}", key="kind")
    config = load_config(file_path, copy.deepcopy(DEFAULT_CONFIGS[kind]))
    config.setdefault("name", os.path.splitext(os.path.basename(file_path))[0])
    return validate_config(config)


def default_config(kind: str) -> Dict[str, Any]:
    """某类型的默认场景配置"""
    if kind not in KINDS:
        raise ConfigError(f"未知场景类型: {kind!r}", key="kind")
    config = copy.deepcopy(DEFAULT_CONFIGS[kind])
    config["kind"] = kind
    config["name"] = kind
    return config


def output_directory(config: Dict[str, Any], override: Optional[str] = None) -> str:
    """结果目录：命令行参数 > 配置 output.directory > 环境变量/默认根目录下的场景名"""
    if override:
        return override
    directory = config.get("output", {}).get("directory")
    if directory:
        return directory
    root = os.environ.get(OUTPUT_CONFIG["output_root_env"]) or OUTPUT_CONFIG["default_output_root"] or PATHS["output"]
    return os.path.join(root, config.get("name", config["kind"]))


# ---------------------------------------------------------------------------
# 场景运行
# ---------------------------------------------------------------------------

@dataclass
class ScenarioOutcome:
    """一次场景运行的结果"""

    kind: str
    directory: str
    files: List[str] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)
    passed: bool = True
    text: str = ""


def _relative_errors(simulated: Dict[str, Any], reference: Dict[str, Any]) -> Dict[str, float]:
    out = {}
    for key in ("delta_rest_energy", "w_coul", "w_rad"):
        ref = reference[key]
        out[key] = abs(simulated[key] - ref) / abs(ref) if ref != 0 else abs(simulated[key])
    return out


def _reference_ledger(spec, R: float, u: Units) -> Dict[str, Any]:
    if spec.law == "exponential":
        return balance_ledger(spec, R, u).to_dict()
    rest = rest_energy_quadrature(spec, u)
    w_coul = coulomb_energy(spec.q0, spec.r0, R, u)
    w_rad = flux_quadrature(R, spec, u)
    return {"mode": spec.mode, "delta_rest_energy": rest, "w_coul": w_coul, "w_rad": w_rad,
            "residual": rest - (w_coul + w_rad)}


class ScenarioRunner:
    """按场景类型分发并写出结果文件"""

    def __init__(self, config: Dict[str, Any], output_dir: Optional[str] = None,
                 workers: Optional[int] = None):
        self.config = validate_config(config)
        self.kind = config["kind"]
        self.directory = output_directory(config, output_dir)
        self.workers = workers
        self.files: List[str] = []

    def run(self) -> ScenarioOutcome:
        """运行场景并写出清单"""
        logger.info("运行场景 %s -> %s", self.kind, self.directory)
        os.makedirs(self.directory, exist_ok=True)
        handler = {
            "shell-growth": self._run_shell,
            "shell-decay": self._run_shell,
            "plane-wave": self._run_solver,
            "massive-dispersion": self._run_solver,
            "two-charge-orbit": self._run_orbit,
            "wigner-cycle": self._run_cycle,
            "verify-all": self._run_verification,
        }[self.kind]
        outcome = handler()
        self._write_json("summary.json", outcome.summary)
        manifest = write_manifest(self.directory, self.files, self.kind)
        outcome.files = list(self.files) + [manifest]
        return outcome

    def _path(self, name: str) -> str:
        return os.path.join(self.directory, name)

    def _write_csv(self, name: str, header, rows) -> None:
        write_csv(self._path(name), header, rows)
        self.files.append(self._path(name))

    def _write_json(self, name: str, data: Dict[str, Any]) -> None:
        if not save_config(data, self._path(name)):
            raise OSError(f"无法写出 {self._path(name)}")
        self.files.append(self._path(name))

    def _run_shell(self) -> ScenarioOutcome:
        result = run_scenario(self.config)
        for name, (header, rows) in result.tables.items():
            self._write_csv(f"{name}.csv", header, rows)
        record = result.record
        u = Units.from_config(self.config.get("units"))
        balance = discrete_balance(record)
        self._write_csv("balance.csv", ("t", "field_energy", "inner_flux", "outer_flux", "source_power", "residual"),
                        zip(record.times, record.field_energy, record.inner_flux, record.outer_flux,
                            record.source_power, balance.residual))
        simulated = time_integrated_ledger(record).to_dict()
        reference = _reference_ledger(record.source, record.flux_radius, u)
        ledger = {
            "flux_radius": record.flux_radius,
            "simulated": simulated,
            "analytic": reference,
            "relative_error": _relative_errors(simulated, reference),
            "balance_max_relative_residual": balance.max_relative,
        }
        self._write_json("ledger.json", ledger)
        summary = dict(result.summary)
        summary["ledger_max_relative_error"] = max(ledger["relative_error"].values())
        tolerance = float(self.config.get("probes", {}).get("tolerance", VERIFICATION_CONFIG["probe_abs_tol"]))
        summary["probe_comparison"] = probe_comparison(self.directory, tolerance).to_dict()
        return ScenarioOutcome(self.kind, self.directory, summary=summary)

    def _run_solver(self) -> ScenarioOutcome:
        result = run_scenario(self.config)
        for name, (header, rows) in result.tables.items():
            self._write_csv(f"{name}.csv", header, rows)
        return ScenarioOutcome(self.kind, self.directory, summary=result.summary)

    def _run_orbit(self) -> ScenarioOutcome:
        cfg = self.config
        u = Units.from_config(cfg.get("units"))
        src = cfg["source"]
        if src["type"] == "coulomb":
            sampler = coulomb_sampler(float(src["q"]), u, src.get("center"))
        else:
            block = src["shell"]
            spec = shell_law_from_config(block, block.get("mode", "growth"))
            sampler = shell_sampler(spec, u, src.get("center"))
        p = cfg["particle"]
        state = ParticleState(float(p["q"]), float(p["m"]), p["x"], p["p"])
        pusher = cfg["pusher"]
        traj = trajectory(state, sampler, float(pusher["dt"]), int(pusher["steps"]), u,
                          int(pusher["record_every"]))
        self._write_csv("trajectory.csv", TRAJECTORY_HEADER, traj.rows())
        summary = {
            "kind": self.kind,
            "steps": int(pusher["steps"]),
            "dt": float(pusher["dt"]),
            "invariant_drift": traj.invariant_drift(),
            "mass_change": float(traj.m[-1] - traj.m[0]),
            "mass_shell_defect": abs(traj.final.mass_shell_defect(u)),
        }
        return ScenarioOutcome(self.kind, self.directory, summary=summary)

    def _run_cycle(self) -> ScenarioOutcome:
        cfg = self.config
        u = Units.from_config(cfg.get("units"))
        s = cfg["shell"]
        c = cfg["cycle"]
        cycle = CycleConfig(ShellSpec(float(s["q0"]), float(s["r0"]), float(s["tau"]), "growth"),
                            float(c["phi1"]), float(c["phi2"]), float(c["m0"]), float(c["M0"]))
        ledger = run_cycle(cycle, u)
        self._write_json("ledger.json", ledger.to_dict())
        text = format_table(ledger)
        summary = {"kind": self.kind, "relative_residual": ledger.relative_residual,
                   "particle_deficit": ledger.particle_deficit, "cage_deficit": ledger.cage_deficit}
        return ScenarioOutcome(self.kind, self.directory, summary=summary, text=text)

    def _run_verification(self) -> ScenarioOutcome:
        from .verification import run_checks, format_report

        block = self.config.get("verification", {})
        workers = self.workers or int(block.get("workers", PERFORMANCE_CONFIG["thread_pool_size"]))
        results = run_checks(block.get("checks") or None, workers=workers)
        rows = [(r.name, "PASS" if r.passed else "FAIL", r.value, r.tolerance, r.detail) for r in results]
        self._write_csv("verification.csv", ("check", "status", "value", "tolerance", "detail"), rows)
        passed = all(r.passed for r in results)
        summary = {"kind": self.kind, "passed": passed,
                   "checks": {r.name: {"passed": r.passed, "value": r.value, "tolerance": r.tolerance}
                              for r in results}}
        return ScenarioOutcome(self.kind, self.directory, summary=summary, passed=passed,
                               text=format_report(results))


def write_manifest(directory: str, files: List[str], kind: str) -> str:
    """
    写出清单：每个结果文件的相对路径、大小和摘要

    Args:
        directory: 结果目录
        files: 结果文件
        kind: 场景类型

    Returns:
        清单文件路径
    """
    entries = []
    for path in sorted(set(files)):
        entries.append({
            "path": os.path.relpath(path, directory),
            "bytes": os.path.getsize(path),
            OUTPUT_CONFIG["digest"]: file_digest(path),
        })
    manifest = {"app": APP_NAME, "version": APP_VERSION, "kind": kind, "files": entries}
    path = os.path.join(directory, OUTPUT_CONFIG["manifest_name"])
    if not save_config(manifest, path):
        raise OSError(f"无法写出 {path}")
    return path


def run(config_path: str, output_dir: Optional[str] = None, workers: Optional[int] = None) -> ScenarioOutcome:
    """
    读取场景文件并运行

    Args:
        config_path: 场景 JSON 路径
        output_dir: 覆盖结果目录
        workers: verify-all 的线程数

    Returns:
        ScenarioOutcome

    Raises:
        ConfigError: 配置无效
        VerificationFailed: verify-all 有检查未通过（结果文件已写出）
    """
    config = load_scenario(config_path)
    outcome = ScenarioRunner(config, output_dir, workers).run()
    if not outcome.passed:
        failed = [k for k, v in outcome.summary.get("checks", {}).items() if not v["passed"]]
        raise VerificationFailed(f"未通过的检查: {', '.join(failed)}")
    return outcome


# ---------------------------------------------------------------------------
# 结果比较
# ---------------------------------------------------------------------------

@dataclass
class CompareReport:
    """两份 CSV 结果的逐列差异"""

    columns: Dict[str, Dict[str, float]]
    tolerance: float
    passed: bool

    def to_dict(self) -> Dict[str, Any]:
        return {"columns": self.columns, "tolerance": self.tolerance, "passed": self.passed}

    def format(self) -> str:
        lines = [f"{'列':<16}{'max':>14}{'L2':>14}{'不一致':>8}"]
        for name, d in self.columns.items():
            lines.append(f"{name:<16}{d['max']:>14.6g}{d['l2']:>14.6g}{int(d['mismatches']):>8}")
        lines.append(f"容差 {self.tolerance:g}: {'通过' if self.passed else '未通过'}")
        return "\n".join(lines)


def _as_floats(values: List[str]) -> Optional[np.ndarray]:
    try:
        return np.array([float(v) for v in values])
    except ValueError:
        return None


def compare(path_a: str, path_b: str, tolerance: float) -> CompareReport:
    """
    逐列比较两份 CSV：数值列给出最大差和 L2 差，其它列统计不一致行数

    Args:
        path_a: 文件 A
        path_b: 文件 B
        tolerance: 最大绝对差容差

    Returns:
        CompareReport

    Raises:
        SchemaMismatch: 列名或行数不一致
    """
    a = read_csv(path_a)
    b = read_csv(path_b)
    if list(a) != list(b):
        raise SchemaMismatch(f"列不一致: {list(a)} != {list(b)}")
    rows_a = len(next(iter(a.values()), []))
    rows_b = len(next(iter(b.values()), []))
    if rows_a != rows_b:
        raise SchemaMismatch(f"行数不一致: {rows_a} != {rows_b}")

    columns: Dict[str, Dict[str, float]] = {}
    passed = True
    for name in a:
        fa, fb = _as_floats(a[name]), _as_floats(b[name])
        if fa is not None and fb is not None:
            delta = np.abs(fa - fb)
            d_max = float(delta.max()) if delta.size else 0.0
            columns[name] = {"max": d_max, "l2": float(np.linalg.norm(delta)), "mismatches": 0}
            passed = passed and d_max <= tolerance
        else:
            mismatches = sum(1 for x, y in zip(a[name], b[name]) if x != y)
            columns[name] = {"max": 0.0, "l2": 0.0, "mismatches": mismatches}
            passed = passed and mismatches == 0
    logger.info("比较 %s 与 %s: %s", path_a, path_b, "通过" if passed else "未通过")
    return CompareReport(columns, tolerance, passed)


def probe_comparison(directory: str, tolerance: float) -> CompareReport:
    """同一结果目录下数值探针与解析探针的比较"""
    return compare(os.path.join(directory, "probes.csv"), os.path.join(directory, "oracle.csv"), tolerance)
