#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
带电球壳解析解模块
电荷按指数规律增长或衰减的球壳在外部区域的势、ε 场、径向电场，
辐射能量、静止能量变化与能量账目，以及基于自适应积分的校验量

记号：C = ζc/4π，a = r − r0，b = r + r0，T = cτ，s = ct
"""

import math
import logging
from dataclasses import dataclass, field, asdict
from typing import Dict, Any, Tuple, Union

import numpy as np
from scipy import integrate

from config.settings import QUADRATURE_CONFIG
from .errors import ConfigError, DomainError
from .field_model import Units

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

MODES = ("growth", "decay")


def _check_shell(q0, r0, tau):
    if not math.isfinite(q0):
        raise ConfigError(f"q0 必须为有限值: {q0}", key="shell.q0")
    if not r0 > 0:
        raise ConfigError(f"球壳半径 r0 必须为正数: {r0}", key="shell.r0")
    if not tau > 0:
        raise ConfigError(f"时间常数 tau 必须为正数: {tau}", key="shell.tau")


@dataclass(frozen=True)
class ShellSpec:
    """指数规律变化的球壳电荷"""

    q0: float = 1.0
    r0: float = 1.0
    tau: float = 1.0
    mode: str = "growth"

    def __post_init__(self):
        _check_shell(self.q0, self.r0, self.tau)
        if self.mode not in MODES:
            raise ConfigError(f"未知模式: {self.mode}", key="shell.mode")

    @property
    def law(self) -> str:
        return "exponential"

    def charge(self, t: ArrayLike) -> ArrayLike:
        t = np.asarray(t, dtype=float)
        decay = np.exp(-np.maximum(t, 0.0) / self.tau)
        if self.mode == "growth":
            q = np.where(t <= 0, 0.0, self.q0 * (1.0 - decay))
        else:
            q = np.where(t <= 0, self.q0, self.q0 * decay)
        return _out(q)

    def charge_rate(self, t: ArrayLike) -> ArrayLike:
        t = np.asarray(t, dtype=float)
        rate = (self.q0 / self.tau) * np.exp(-np.maximum(t, 0.0) / self.tau)
        rate = np.where(t <= 0, 0.0, rate)
        return _out(rate if self.mode == "growth" else -rate)

    def charge_integral(self, t: ArrayLike) -> ArrayLike:
        """∫_0^t q dt'（t < 0 时为负向积分）"""
        t = np.asarray(t, dtype=float)
        tp = np.maximum(t, 0.0)
        x = -np.expm1(-tp / self.tau)
        if self.mode == "growth":
            qi = self.q0 * (tp - self.tau * x)
        else:
            qi = np.where(t <= 0, self.q0 * t, self.q0 * self.tau * x)
        return _out(qi)


@dataclass(frozen=True)
class RampSpec:
    """
    光滑斜坡增长的球壳电荷 q = q0·S(t/τ)，S 为 7 次 smootherstep（C³ 连续）

    用于网格收敛阶研究：指数规律的波前折点会把探针误差限制为一阶
    """

    q0: float = 1.0
    r0: float = 1.0
    tau: float = 1.0
    mode: str = field(default="growth", init=False)

    def __post_init__(self):
        _check_shell(self.q0, self.r0, self.tau)

    @property
    def law(self) -> str:
        return "ramp"

    def _x(self, t):
        return np.clip(np.asarray(t, dtype=float) / self.tau, 0.0, 1.0)

    def charge(self, t: ArrayLike) -> ArrayLike:
        x = self._x(t)
        return _out(self.q0 * x ** 4 * (35.0 - 84.0 * x + 70.0 * x ** 2 - 20.0 * x ** 3))

    def charge_rate(self, t: ArrayLike) -> ArrayLike:
        x = self._x(t)
        return _out(self.q0 / self.tau * 140.0 * x ** 3 * (1.0 - x) ** 3)

    def charge_integral(self, t: ArrayLike) -> ArrayLike:
        t = np.asarray(t, dtype=float)
        x = self._x(t)
        inner = self.tau * x ** 5 * (7.0 - 14.0 * x + 10.0 * x ** 2 - 2.5 * x ** 3)
        tail = np.maximum(t - self.tau, 0.0)
        return _out(self.q0 * (inner + tail))


@dataclass(frozen=True)
class StaticShell:
    """电荷恒定的球壳：静态库仑场与离散平衡检验用"""

    q0: float = 1.0
    r0: float = 1.0
    tau: float = field(default=1.0, init=False)
    mode: str = field(default="static", init=False)

    def __post_init__(self):
        _check_shell(self.q0, self.r0, self.tau)

    @property
    def law(self) -> str:
        return "static"

    def charge(self, t: ArrayLike) -> ArrayLike:
        return _out(np.full_like(np.asarray(t, dtype=float), self.q0))

    def charge_rate(self, t: ArrayLike) -> ArrayLike:
        return _out(np.zeros_like(np.asarray(t, dtype=float)))

    def charge_integral(self, t: ArrayLike) -> ArrayLike:
        return _out(self.q0 * np.asarray(t, dtype=float))


ChargeLaw = Union[ShellSpec, RampSpec, StaticShell]


@dataclass
class EnergyLedger:
    """能量账目：静止能量变化、库仑场能量、辐射能量及残差"""

    mode: str
    delta_rest_energy: float
    w_coul: float
    w_rad: float
    residual: float = 0.0

    @property
    def scale(self) -> float:
        return max(abs(self.delta_rest_energy), abs(self.w_coul), abs(self.w_rad), 1e-300)

    @property
    def relative_residual(self) -> float:
        return abs(self.residual) / self.scale

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["relative_residual"] = self.relative_residual
        return data


def _out(x: np.ndarray) -> ArrayLike:
    x = np.asarray(x)
    return float(x) if x.ndim == 0 else x


def _coef(u: Units) -> float:
    return u.zeta * u.c / (4.0 * math.pi)


def _check_radius(r, r0):
    if np.any(np.asarray(r) < r0):
        raise DomainError(f"解析解仅适用于球壳外部 r >= r0 = {r0}")


def charge(t: ArrayLike, spec: ChargeLaw) -> ArrayLike:
    """
    球壳电荷 q(t)

    Args:
        t: 时间
        spec: 电荷规律

    Returns:
        电荷
    """
    return spec.charge(t)


def charge_rate(t: ArrayLike, spec: ChargeLaw) -> ArrayLike:
    return spec.charge_rate(t)


def _kinks(r, t, spec, u):
    r = np.asarray(r, dtype=float)
    s = u.c * np.asarray(t, dtype=float)
    a = r - spec.r0
    b = r + spec.r0
    return r, s, a, b


def potential(r: ArrayLike, t: ArrayLike, spec: ChargeLaw, u: Units) -> ArrayLike:
    """
    球壳外部的势 φ(r, t)

    Args:
        r: 径向距离，r >= r0
        t: 时间
        spec: 电荷规律
        u: 单位

    Returns:
        φ

    Raises:
        DomainError: r < r0
    """
    _check_radius(r, spec.r0)
    r, s, a, b = _kinks(r, t, spec, u)
    pref = _coef(u) / (2.0 * r * spec.r0)

    if spec.law != "exponential":
        t = np.asarray(t, dtype=float)
        qi = spec.charge_integral(t - a / u.c) - spec.charge_integral(t - b / u.c)
        return _out(pref * u.c * qi)

    T = u.c * spec.tau
    e_a = np.exp(np.minimum(a - s, 0.0) / T)
    e_b = np.exp(np.minimum(b - s, 0.0) / T)
    r0 = spec.r0
    if spec.mode == "growth":
        g = np.where(s <= a, 0.0,
                     np.where(s <= b, s - T + r0 - r + T * e_a, 2.0 * r0 - T * (e_b - e_a)))
    else:
        g = np.where(s <= a, 2.0 * r0,
                     np.where(s <= b, T - s + r0 + r - T * e_a, T * (e_b - e_a)))
    return _out(pref * spec.q0 * g)


def epsilon_field(r: ArrayLike, t: ArrayLike, spec: ChargeLaw, u: Units) -> ArrayLike:
    """
    球壳外部的 ε 场，衰减模式为增长模式取负

    Args:
        r: 径向距离，r >= r0
        t: 时间
        spec: 电荷规律
        u: 单位

    Returns:
        ε
    """
    _check_radius(r, spec.r0)
    r, s, a, b = _kinks(r, t, spec, u)
    pref = _coef(u) / (2.0 * r * spec.r0)

    if spec.law != "exponential":
        t = np.asarray(t, dtype=float)
        return _out(pref * (spec.charge(t - a / u.c) - spec.charge(t - b / u.c)))

    T = u.c * spec.tau
    e_a = np.exp(np.minimum(a - s, 0.0) / T)
    e_b = np.exp(np.minimum(b - s, 0.0) / T)
    g = np.where(s <= a, 0.0, np.where(s <= b, 1.0 - e_a, e_b - e_a))
    sign = 1.0 if spec.mode == "growth" else -1.0
    return _out(sign * pref * spec.q0 * g)


def radial_E(r: ArrayLike, t: ArrayLike, spec: ChargeLaw, u: Units) -> ArrayLike:
    """径向电场 E_r = ε + φ/r"""
    r_arr = np.asarray(r, dtype=float)
    return _out(epsilon_field(r, t, spec, u) + potential(r, t, spec, u) / r_arr)


def _require_exponential(spec):
    if spec.law != "exponential":
        raise DomainError(f"{spec.law} 规律没有闭式能量表达式")


def _bracket(D: float) -> float:
    """1 − (1 − e^{−D})/D，小 D 时用级数避免相消"""
    if D < 1e-3:
        return D / 2.0 - D ** 2 / 6.0 + D ** 3 / 24.0 - D ** 4 / 120.0
    return 1.0 + math.expm1(-D) / D


def _layer_energy(spec: ShellSpec, u: Units) -> float:
    # 与 R 无关、被不可逆带走的部分
    D = 2.0 * spec.r0 / (u.c * spec.tau)
    return _coef(u) * spec.q0 ** 2 / (2.0 * spec.r0) * _bracket(D)


def radiated_energy(R: float, spec: ShellSpec, u: Units) -> float:
    """
    0 到 ∞ 时间内穿过半径 R 球面的能量

    Args:
        R: 球面半径，R >= r0，可以为 inf
        spec: 球壳参数
        u: 单位

    Returns:
        能量（增长模式 R 项取正，衰减模式取负）
    """
    _require_exponential(spec)
    _check_radius(R, spec.r0)
    sign = 1.0 if spec.mode == "growth" else -1.0
    near = 0.0 if math.isinf(R) else sign * _coef(u) * spec.q0 ** 2 / (2.0 * R)
    return near + _layer_energy(spec, u)


def rest_energy_change(spec: ShellSpec, u: Units) -> float:
    """
    球壳静止能量变化：增长模式返回 −Δmc²，衰减模式返回 +Δmc²

    Args:
        spec: 球壳参数
        u: 单位

    Returns:
        能量
    """
    _require_exponential(spec)
    C = _coef(u)
    base = C * spec.q0 ** 2 / (2.0 * spec.r0)
    if spec.mode == "growth":
        return base + _layer_energy(spec, u)
    D = 2.0 * spec.r0 / (u.c * spec.tau)
    return base * (-math.expm1(-D) / D)


def coulomb_energy(q: float, r_inner: float, r_outer: float, u: Units) -> float:
    """
    两半径之间的库仑场能量 ζc q²/(8π)·(1/r_inner − 1/r_outer)

    Args:
        q: 电荷
        r_inner: 内半径
        r_outer: 外半径，可为 inf
        u: 单位

    Returns:
        能量
    """
    if not (r_inner > 0 and r_outer >= r_inner):
        raise DomainError(f"半径顺序无效: r_inner={r_inner}, r_outer={r_outer}")
    inv_outer = 0.0 if math.isinf(r_outer) else 1.0 / r_outer
    return _coef(u) * q ** 2 / 2.0 * (1.0 / r_inner - inv_outer)


def balance_ledger(spec: ShellSpec, R: float, u: Units) -> EnergyLedger:
    """
    0 到 ∞ 积分后的能量平衡账目

    增长：−Δmc² = W_Coul + W_rad；衰减：W_Coul = Δmc² + W_rad

    Args:
        spec: 球壳参数
        R: 控制球面半径
        u: 单位

    Returns:
        EnergyLedger
    """
    _check_radius(R, spec.r0)
    rest = rest_energy_change(spec, u)
    w_coul = coulomb_energy(spec.q0, spec.r0, R, u)
    w_rad = radiated_energy(R, spec, u)
    if spec.mode == "growth":
        residual = rest - (w_coul + w_rad)
    else:
        residual = w_coul - (rest + w_rad)
    return EnergyLedger(spec.mode, rest, w_coul, w_rad, residual)


def limiting_ledger(spec: ShellSpec, u: Units) -> EnergyLedger:
    """r0 ≪ cτ、R → ∞ 极限下的账目"""
    _require_exponential(spec)
    C = _coef(u)
    w_coul = C * spec.q0 ** 2 / (2.0 * spec.r0)
    w_rad = C * spec.q0 ** 2 / (2.0 * u.c * spec.tau)
    if spec.mode == "growth":
        rest = w_coul + w_rad
        residual = rest - (w_coul + w_rad)
    else:
        rest = w_coul - w_rad
        residual = w_coul - (rest + w_rad)
    return EnergyLedger(spec.mode, rest, w_coul, w_rad, residual)


def renormalization_masses(m0: float, spec: ShellSpec, u: Units) -> Tuple[float, float]:
    """
    电荷产生后的非场质量 m_e 与总质量 m_e + W_Coul/c²（R → ∞）

    Args:
        m0: 初始静止质量
        spec: 球壳参数
        u: 单位

    Returns:
        (m_e, m_total)
    """
    c2 = u.c ** 2
    w_coul = coulomb_energy(spec.q0, spec.r0, math.inf, u)
    w_rad = radiated_energy(math.inf, spec, u)
    m_e = m0 - w_coul / c2 - w_rad / c2
    return m_e, m_e + w_coul / c2


def _quad(func, a, b):
    cfg = QUADRATURE_CONFIG
    value, abserr = integrate.quad(func, a, b, epsabs=cfg["epsabs"], epsrel=cfg["epsrel"],
                                   limit=cfg["limit"])
    logger.debug("quad [%g, %g] = %g (误差估计 %g)", a, b, value, abserr)
    return value


def _time_pieces(r: float, spec: ChargeLaw, u: Units):
    """按波前折点 (r±r0)/c 分段的积分区间"""
    t1 = (r - spec.r0) / u.c
    t2 = (r + spec.r0) / u.c
    t_end = t2 + QUADRATURE_CONFIG["tail_time_constants"] * spec.tau
    if spec.law == "ramp":
        t_end = t2 + spec.tau
        return [(t1, min(t1 + spec.tau, t2)), (min(t1 + spec.tau, t2), t2), (t2, t_end)]
    return [(t1, t2), (t2, t_end)]


def flux_quadrature(R: float, spec: ChargeLaw, u: Units) -> float:
    """∫ εE/ζ·4πR² dt 的数值积分"""
    _check_radius(R, spec.r0)

    def integrand(t):
        return epsilon_field(R, t, spec, u) * radial_E(R, t, spec, u) / u.zeta * 4.0 * math.pi * R ** 2

    return sum(_quad(integrand, a, b) for a, b in _time_pieces(R, spec, u) if b > a)


def rest_energy_quadrature(spec: ChargeLaw, u: Units) -> float:
    """c∫q ε(r0, t) dt 的数值积分，符号约定同 rest_energy_change"""

    def integrand(t):
        return u.c * spec.charge(t) * epsilon_field(spec.r0, t, spec, u)

    total = sum(_quad(integrand, a, b) for a, b in _time_pieces(spec.r0, spec, u) if b > a)
    return total if spec.mode == "growth" else -total


def coulomb_energy_quadrature(q: float, r_inner: float, r_outer: float, u: Units) -> float:
    """∫ E²/(2ζc)·4πr² dr 的数值积分，E 为点电荷库仑场"""

    def integrand(r):
        e = _coef(u) * q / r ** 2
        return e ** 2 / (2.0 * u.zeta * u.c) * 4.0 * math.pi * r ** 2

    return _quad(integrand, r_inner, r_outer)
