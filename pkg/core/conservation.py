#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
守恒律诊断模块
完整场方程组的能量、动量守恒律（密度、能流、应力张量、相互作用功率与力），
无质量子系统形式，逐点恒等式残差，以及求解器输出上的离散能量平衡
"""

import logging
from dataclasses import dataclass, asdict
from typing import Any, Callable, Dict, Tuple

import numpy as np
from scipy import integrate

from .analytic_shell import EnergyLedger
from .errors import GridMismatch
from .field_model import FieldPoint, FieldJet, SourcePoint, Units, EPS, BETA, E, CB, V0, V, U0, U
from .grid_solver import RadialRecord

logger = logging.getLogger(__name__)

_LEVI_CIVITA = np.zeros((3, 3, 3))
_LEVI_CIVITA[0, 1, 2] = _LEVI_CIVITA[1, 2, 0] = _LEVI_CIVITA[2, 0, 1] = 1.0
_LEVI_CIVITA[0, 2, 1] = _LEVI_CIVITA[2, 1, 0] = _LEVI_CIVITA[1, 0, 2] = -1.0


@dataclass
class EnergyMomentumSample:
    """某一点的能量动量诊断量"""

    energy_density: float
    energy_flux: np.ndarray
    momentum_density: np.ndarray
    stress: np.ndarray
    interaction_power: float
    interaction_force: np.ndarray

    def is_finite(self) -> bool:
        parts = [self.energy_density, self.energy_flux, self.momentum_density, self.stress,
                 self.interaction_power, self.interaction_force]
        return all(bool(np.all(np.isfinite(p))) for p in parts)

    def to_dict(self) -> Dict[str, Any]:
        return {k: (v.tolist() if isinstance(v, np.ndarray) else v) for k, v in asdict(self).items()}


def _split(f: np.ndarray):
    return f[EPS], f[BETA], f[E:E + 3], f[CB:CB + 3], f[V0], f[V:V + 3], f[U0], f[U:U + 3]


def _split_sources(src: SourcePoint):
    q = src.as_array()
    return q[0], q[1:4], q[4], q[5:8], q[8], q[9:12], q[12:15], q[15]


# 以下二次型均以扁平场数组为自变量

def _energy_density(f: np.ndarray, u: Units) -> float:
    return float(f @ f) / (2.0 * u.zeta * u.c)


def _energy_flux(f: np.ndarray, u: Units) -> np.ndarray:
    eps, beta, e, cb, v0, v, u0, uu = _split(f)
    return (np.cross(e, cb) + eps * e - beta * cb + v0 * v + u0 * uu + np.cross(v, uu)) / u.zeta


def _momentum_density(f: np.ndarray, u: Units) -> np.ndarray:
    eps, beta, e, cb, v0, v, u0, uu = _split(f)
    return (np.cross(e, cb) - eps * e + beta * cb + np.cross(uu, v) + v0 * v + u0 * uu) / (u.zeta * u.c ** 2)


def _stress(f: np.ndarray, u: Units) -> np.ndarray:
    eps, beta, e, cb, v0, v, u0, uu = _split(f)
    delta = np.eye(3)
    em = (np.outer(e, e) + np.outer(cb, cb)
          - 0.5 * delta * (e @ e + cb @ cb - eps ** 2 - beta ** 2)
          - _LEVI_CIVITA @ (beta * e + eps * cb))
    vu = (np.outer(v, v) + np.outer(uu, uu)
          + _LEVI_CIVITA @ (u0 * v - v0 * uu)
          - 0.5 * delta * (v @ v + uu @ uu - v0 ** 2 - u0 ** 2))
    return (em - vu) / (u.zeta * u.c)


def _interaction_power(f: np.ndarray, src: SourcePoint, u: Units) -> float:
    eps, beta, e, cb, v0, v, u0, uu = _split(f)
    rho_e, j_e, rho_m, j_m, s, k, l, p = _split_sources(src)
    c = u.c
    return float(e @ j_e - eps * c * rho_e - cb @ j_m - beta * c * rho_m
                 + v @ k - uu @ l - v0 * s + u0 * p)


def _interaction_force(f: np.ndarray, src: SourcePoint, u: Units) -> np.ndarray:
    eps, beta, e, cb, v0, v, u0, uu = _split(f)
    rho_e, j_e, rho_m, j_m, s, k, l, p = _split_sources(src)
    c = u.c
    bracket = (c * rho_e * e + np.cross(j_e, cb) - c * rho_m * cb + np.cross(j_m, e)
               - eps * j_e - beta * j_m
               - s * v + p * uu + v0 * k - u0 * l + np.cross(uu, k) + np.cross(v, l))
    return bracket / c


def energy_law_terms(f: FieldPoint, src: SourcePoint, u: Units) -> Tuple[float, float, np.ndarray]:
    """
    能量守恒律各项：∂w/∂t + P + div S = 0

    Args:
        f: 场
        src: 源
        u: 单位

    Returns:
        (能量密度 w, 相互作用功率 P, 能流密度 S)
    """
    a = f.as_array()
    return _energy_density(a, u), _interaction_power(a, src, u), _energy_flux(a, u)


def momentum_law_terms(f: FieldPoint, src: SourcePoint, u: Units) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    动量守恒律各项：∂g/∂t + f = ∂_j T^{ij}

    应力张量中 η^{ij} 取空间 Kronecker δ，保留反对称项

    Args:
        f: 场
        src: 源
        u: 单位

    Returns:
        (动量密度 g, 力密度 f, 应力张量 T)
    """
    a = f.as_array()
    return _momentum_density(a, u), _interaction_force(a, src, u), _stress(a, u)


def energy_momentum_sample(f: FieldPoint, src: SourcePoint, u: Units) -> EnergyMomentumSample:
    w, power, flux = energy_law_terms(f, src, u)
    g, force, stress = momentum_law_terms(f, src, u)
    return EnergyMomentumSample(w, flux, g, stress, power, force)


def subsystem_energy_terms(f: FieldPoint, src: SourcePoint, u: Units) -> Tuple[float, float, np.ndarray]:
    """无质量 (ε, E, B) 子系统、仅电荷源时的能量守恒律各项（直接编码）"""
    e, cb, eps = np.asarray(f.E, dtype=float), np.asarray(f.cB, dtype=float), f.eps
    density = (e @ e + cb @ cb + eps ** 2) / (2.0 * u.zeta * u.c)
    power = float(e @ src.j_e - eps * u.c * src.rho_e)
    flux = (np.cross(e, cb) + eps * e) / u.zeta
    return float(density), power, flux


def subsystem_momentum_terms(f: FieldPoint, src: SourcePoint, u: Units) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """无质量子系统的动量守恒律各项（直接编码）"""
    e, cb, eps = np.asarray(f.E, dtype=float), np.asarray(f.cB, dtype=float), f.eps
    j_e = np.asarray(src.j_e, dtype=float)
    g = (np.cross(e, cb) - eps * e) / (u.zeta * u.c ** 2)
    force = (u.c * src.rho_e * e + np.cross(j_e, cb) - eps * j_e) / u.c
    stress = (np.outer(e, e) + np.outer(cb, cb) - 0.5 * np.eye(3) * (e @ e + cb @ cb - eps ** 2)
              - _LEVI_CIVITA @ (eps * cb)) / (u.zeta * u.c)
    return g, force, stress


def _derivative(quadratic: Callable[[np.ndarray], Any], f: np.ndarray, df: np.ndarray) -> Any:
    # 二次型沿 df 的方向导数，中心差分对二次型精确
    return 0.5 * (np.asarray(quadratic(f + df)) - np.asarray(quadratic(f - df)))


def divergence_identity_residual(jet: FieldJet, src: SourcePoint, u: Units) -> Tuple[float, np.ndarray]:
    """
    由 jet 直接计算两个守恒恒等式的残差

    Args:
        jet: 场及其导数（下标 0 为 x^0 = ct）
        src: 源
        u: 单位

    Returns:
        (∂w/∂t + P + div S, ∂g/∂t + f − ∂_j T^{ij})；场方程成立时均为零
    """
    f = jet.value.as_array()
    d = jet.derivatives()
    c = u.c

    dw_dt = c * float(_derivative(lambda a: _energy_density(a, u), f, d[0]))
    div_S = sum(float(_derivative(lambda a: _energy_flux(a, u), f, d[j])[j - 1]) for j in (1, 2, 3))
    energy = dw_dt + _interaction_power(f, src, u) + div_S

    dg_dt = c * _derivative(lambda a: _momentum_density(a, u), f, d[0])
    div_T = sum(_derivative(lambda a: _stress(a, u), f, d[j])[:, j - 1] for j in (1, 2, 3))
    momentum = dg_dt + _interaction_force(f, src, u) - div_T
    return energy, momentum


def energy_contraction(f: FieldPoint, residual: np.ndarray, u: Units) -> float:
    """
    能量恒等式残差关于场方程残差的双线性表示

    ε·r_ε + E·r_E − β·r_β + cB·r_B + V⁰·r_V⁰ + V·r_V + U·r_U + U⁰·r_U⁰，再除以 ζ

    Args:
        f: 场
        residual: system_residual 的输出
        u: 单位

    Returns:
        标量
    """
    eps, beta, e, cb, v0, v, u0, uu = _split(f.as_array())
    r = np.asarray(residual, dtype=float)
    total = (eps * r[0] + e @ r[1:4] - beta * r[4] + cb @ r[5:8]
             + v0 * r[8] + v @ r[9:12] + uu @ r[12:15] + u0 * r[15])
    return float(total / u.zeta)


def momentum_contraction(f: FieldPoint, residual: np.ndarray, u: Units) -> np.ndarray:
    """动量恒等式残差关于场方程残差的双线性表示"""
    eps, beta, e, cb, v0, v, u0, uu = _split(f.as_array())
    r = np.asarray(residual, dtype=float)
    r_eps, r_e, r_beta, r_b = r[0], r[1:4], r[4], r[5:8]
    r_v0, r_v, r_u, r_u0 = r[8], r[9:12], r[12:15], r[15]
    combo = (e * r_eps + np.cross(cb, r_e) + cb * r_beta - np.cross(e, r_b)
             + eps * r_e - beta * r_b + np.cross(v, r_u) - np.cross(uu, r_v)
             - v * r_v0 - v0 * r_v - u0 * r_u - uu * r_u0)
    return -combo / (u.zeta * u.c)


# ---------------------------------------------------------------------------
# 求解器输出上的离散能量平衡
# ---------------------------------------------------------------------------

@dataclass
class DiscreteBalance:
    """逐步残差 dW/dt − P_src − F(r_inner) + F(R) 及其相对尺度"""

    times: np.ndarray
    residual: np.ndarray
    scale: float

    @property
    def max_relative(self) -> float:
        return float(np.max(np.abs(self.residual)) / self.scale) if self.scale > 0 else float(np.max(np.abs(self.residual)))


def _check_record(record: RadialRecord) -> None:
    n = len(record.times)
    lengths = {len(record.field_energy), len(record.inner_flux), len(record.outer_flux), len(record.source_power)}
    if lengths != {n}:
        raise GridMismatch(f"记录长度不一致: times={n}, 其它={sorted(lengths)}")
    if not record.grid.shell_index < record.flux_index < record.grid.size:
        raise GridMismatch(f"能流节点越界: {record.flux_index}")
    if n < 3 or np.any(np.diff(record.times) <= 0):
        raise GridMismatch("时间序列必须严格递增且至少三个点")


def discrete_balance(record: RadialRecord) -> DiscreteBalance:
    """
    [r_inner, R] 控制体积上的离散能量平衡

    沉积电荷上的功率 ∫cερ dV 作为源项，r_inner 处流入、R 处流出

    Args:
        record: 径向求解记录

    Returns:
        DiscreteBalance

    Raises:
        GridMismatch: 记录与网格元数据不一致
    """
    _check_record(record)
    dW = np.gradient(record.field_energy, record.times, edge_order=2)
    residual = dW - record.source_power - record.inner_flux + record.outer_flux
    scale = float(max(np.max(np.abs(record.source_power)), np.max(np.abs(record.outer_flux)),
                      np.max(np.abs(record.inner_flux))))
    return DiscreteBalance(record.times.copy(), residual, scale)


def time_integrated_ledger(record: RadialRecord) -> EnergyLedger:
    """
    时间积分后的模拟能量账目（梯形公式）

    W_Coul 为全空间场能的变化：控制体积内场能增量减去从 r_inner 流入的能量
    （r_inner 以内的场在过程首尾都为零）；W_rad 为穿过 R 的能量。
    增长：−Δmc² = ∫∫cερ dV dt；衰减：Δmc² = −∫∫cερ dV dt，W_Coul 取减少量

    Args:
        record: 径向求解记录

    Returns:
        EnergyLedger
    """
    _check_record(record)
    mode = getattr(record.source, "mode", "growth")
    delivered = float(integrate.trapezoid(record.source_power, record.times))
    inflow = float(integrate.trapezoid(record.inner_flux, record.times))
    w_rad = float(integrate.trapezoid(record.outer_flux, record.times))
    d_field = float(record.field_energy[-1] - record.field_energy[0]) - inflow
    if mode == "growth":
        rest, w_coul = delivered, d_field
        residual = rest - (w_coul + w_rad)
    else:
        rest, w_coul = -delivered, -d_field
        residual = w_coul - (rest + w_rad)
    logger.info("模拟账目(%s): rest=%.6g, W_Coul=%.6g, W_rad=%.6g", mode, rest, w_coul, w_rad)
    return EnergyLedger(mode, rest, w_coul, w_rad, residual)
