#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Wigner 循环账目模块
在笼内产生电荷、搬运到远处、湮灭、返回的闭式能量账目
"""

import math
import logging
from dataclasses import dataclass, field, asdict
from typing import Any, Dict, List

from .analytic_shell import ShellSpec, rest_energy_change, coulomb_energy, radiated_energy
from .errors import ConfigError
from .field_model import Units

logger = logging.getLogger(__name__)

STAGES = ("birth", "transport", "annihilation", "return")


@dataclass(frozen=True)
class CycleConfig:
    """
    循环参数

    shell 给出产生与湮灭过程的电荷规律（两次使用同一 q0, r0, tau），
    phi1 为笼在产生点的势，phi2 为远处的势，m0、M0 为粒子与笼的初始静止质量
    """

    shell: ShellSpec
    phi1: float
    phi2: float
    m0: float
    M0: float

    def __post_init__(self):
        for name in ("phi1", "phi2", "m0", "M0"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ConfigError(f"{name} 必须为有限数: {value}", key=f"cycle.{name}")
        if not self.m0 > 0:
            raise ConfigError(f"m0 必须为正数: {self.m0}", key="cycle.m0")
        if not self.M0 > 0:
            raise ConfigError(f"M0 必须为正数: {self.M0}", key="cycle.M0")

    @property
    def q(self) -> float:
        return self.shell.q0


@dataclass
class StageEntry:
    """单个阶段的能量变化（正值表示增加）"""

    stage: str
    d_particle: float
    d_cage: float
    d_field: float
    work: float
    radiated: float

    def balance(self) -> float:
        """阶段内各项之和，守恒时为零"""
        return self.d_particle + self.d_cage + self.d_field + self.work + self.radiated


@dataclass
class CycleLedger:
    """整个循环的账目"""

    stages: List[StageEntry]
    particle_deficit: float
    cage_deficit: float
    work_extracted: float
    radiated: float
    residual: float
    m_final: float
    M_final: float
    units: Dict[str, float] = field(default_factory=dict)

    @property
    def scale(self) -> float:
        values = [abs(v) for s in self.stages
                  for v in (s.d_particle, s.d_cage, s.d_field, s.work, s.radiated)]
        return max(values + [1e-300])

    @property
    def relative_residual(self) -> float:
        return abs(self.residual) / self.scale

    def to_dict(self) -> Dict[str, Any]:
        return {
            "stages": [asdict(s) for s in self.stages],
            "totals": {
                "particle_deficit": self.particle_deficit,
                "cage_deficit": self.cage_deficit,
                "work_extracted": self.work_extracted,
                "radiated": self.radiated,
            },
            "residual": self.residual,
            "relative_residual": self.relative_residual,
            "m_final": self.m_final,
            "M_final": self.M_final,
            "units": self.units,
        }


def run_cycle(cfg: CycleConfig, u: Units) -> CycleLedger:
    """
    计算循环各阶段账目

    产生：粒子失去 W_Coul + W_rad,1，笼失去 qφ₁，场获得 W_Coul + qφ₁；
    搬运：场中相互作用能由 qφ₁ 变为 qφ₂，对外做功 A = q(φ₁ − φ₂)；
    湮灭：场释放 W_Coul + qφ₂，粒子获得 W_Coul − W_rad,2，笼获得 qφ₂；
    返回：无能量变化

    Args:
        cfg: 循环参数
        u: 单位

    Returns:
        CycleLedger

    Raises:
        ConfigError: 粒子静止能量不足以产生电荷
    """
    growth = ShellSpec(cfg.shell.q0, cfg.shell.r0, cfg.shell.tau, "growth")
    decay = ShellSpec(cfg.shell.q0, cfg.shell.r0, cfg.shell.tau, "decay")
    q = cfg.q
    c2 = u.c ** 2

    w_coul = coulomb_energy(q, growth.r0, math.inf, u)
    w_rad1 = radiated_energy(math.inf, growth, u)
    w_rad2 = radiated_energy(math.inf, decay, u)
    birth_loss = rest_energy_change(growth, u)
    annihilation_gain = rest_energy_change(decay, u)
    if birth_loss >= cfg.m0 * c2:
        raise ConfigError(f"粒子静止能量 {cfg.m0 * c2:.6g} 不足以产生电荷（需要 {birth_loss:.6g}）",
                          key="cycle.m0")

    a = q * (cfg.phi1 - cfg.phi2)
    stages = [
        StageEntry("birth", -birth_loss, -q * cfg.phi1, w_coul + q * cfg.phi1, 0.0, w_rad1),
        StageEntry("transport", 0.0, 0.0, -a, a, 0.0),
        StageEntry("annihilation", annihilation_gain, q * cfg.phi2, -(w_coul + q * cfg.phi2), 0.0, w_rad2),
        StageEntry("return", 0.0, 0.0, 0.0, 0.0, 0.0),
    ]

    particle_deficit = -sum(s.d_particle for s in stages)
    cage_deficit = -sum(s.d_cage for s in stages)
    work = sum(s.work for s in stages)
    radiated = sum(s.radiated for s in stages)
    field_left = sum(s.d_field for s in stages)
    residual = (particle_deficit + cage_deficit) - (work + radiated + field_left)

    ledger = CycleLedger(
        stages=stages,
        particle_deficit=particle_deficit,
        cage_deficit=cage_deficit,
        work_extracted=work,
        radiated=radiated,
        residual=residual,
        m_final=cfg.m0 - particle_deficit / c2,
        M_final=cfg.M0 - cage_deficit / c2,
        units={"c": u.c, "zeta": u.zeta},
    )
    logger.info("循环账目: 粒子亏损=%.6g, 笼亏损=%.6g, 残差=%.3g", particle_deficit, cage_deficit, residual)
    return ledger


def format_table(ledger: CycleLedger) -> str:
    """账目的文本表格"""
    header = f"{'阶段':<14}{'粒子':>16}{'笼':>16}{'场':>16}{'做功':>16}{'辐射':>16}"
    lines = [header, "-" * len(header)]
    for s in ledger.stages:
        lines.append(f"{s.stage:<14}{s.d_particle:>16.8g}{s.d_cage:>16.8g}{s.d_field:>16.8g}"
                     f"{s.work:>16.8g}{s.radiated:>16.8g}")
    lines.append("-" * len(header))
    lines.append(f"粒子亏损 = {ledger.particle_deficit:.12g}")
    lines.append(f"笼亏损   = {ledger.cage_deficit:.12g}")
    lines.append(f"对外做功 = {ledger.work_extracted:.12g}")
    lines.append(f"辐射能量 = {ledger.radiated:.12g}")
    lines.append(f"相对残差 = {ledger.relative_residual:.3g}")
    return "\n".join(lines)
