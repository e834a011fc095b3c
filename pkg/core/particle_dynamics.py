#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
粒子动力学模块
在 E、B、ε 场中推进静止质量可变的相对论性试验粒子，
包括分布电荷的质量变化率和相互作用不变量
"""

import math
import logging
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from config.settings import PUSHER_CONFIG
from .analytic_shell import ChargeLaw, epsilon_field, radial_E, potential
from .errors import DomainError, MassNonPositive, NonFiniteState
from .field_model import FieldPoint, Units
from .utils import rk4_step

logger = logging.getLogger(__name__)

FieldSampler = Callable[[float, np.ndarray], FieldPoint]

TRAJECTORY_HEADER = ("t", "x", "y", "z", "p_x", "p_y", "p_z", "m", "energy", "invariant")


@dataclass(frozen=True, eq=False)
class ParticleState:
    """粒子状态：电荷、静止质量、位置、动量和时间；能量和速度由此导出"""

    q: float
    m: float
    x: np.ndarray
    p: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float).reshape(3))
        object.__setattr__(self, "p", np.asarray(self.p, dtype=float).reshape(3))

    def energy(self, u: Units) -> float:
        """𝓔 = sqrt(m²c⁴ + p²c²)"""
        c2 = u.c ** 2
        return math.sqrt(self.m ** 2 * c2 ** 2 + float(self.p @ self.p) * c2)

    def velocity(self, u: Units) -> np.ndarray:
        return self.p * u.c ** 2 / self.energy(u)

    def lorentz_factor_inverse(self, u: Units) -> float:
        """sqrt(1 − v²/c²) = mc²/𝓔"""
        return self.m * u.c ** 2 / self.energy(u)

    def mass_shell_defect(self, u: Units) -> float:
        """(𝓔² − p²c² − m²c⁴)/𝓔² 的相对偏差"""
        c2 = u.c ** 2
        e = self.energy(u)
        return (e ** 2 - float(self.p @ self.p) * c2 - self.m ** 2 * c2 ** 2) / e ** 2


def force_and_power(s: ParticleState, f: FieldPoint, u: Units) -> Tuple[float, np.ndarray]:
    """
    场对粒子的功率与力

    Args:
        s: 粒子状态
        f: 粒子所在处的场
        u: 单位

    Returns:
        (d𝓔/dt, dp/dt)：d𝓔/dt = q v·E − q c ε，dp/dt = qE + q v×B − q ε v/c
    """
    v = s.velocity(u)
    E = np.asarray(f.E, dtype=float)
    cB = np.asarray(f.cB, dtype=float)
    power = s.q * float(v @ E) - s.q * u.c * f.eps
    force = s.q * E + s.q * np.cross(v, cB) / u.c - s.q * f.eps * v / u.c
    return power, force


def mass_rate(s: ParticleState, eps: float, u: Units) -> float:
    """dm/dt = −q ε sqrt(1 − v²/c²)/c"""
    return -s.q * eps * s.lorentz_factor_inverse(u) / u.c


def distributed_mass_rate(rho: Sequence[float], eps: Sequence[float], weights: Sequence[float], u: Units,
                          v: Optional[np.ndarray] = None) -> float:
    """
    分布电荷的静止能量变化率 d(mc²)/dt = −∫ c ρ ε sqrt(1 − v²/c²) dV

    Args:
        rho: 采样点电荷密度
        eps: 采样点 ε
        weights: 采样点体积权重
        u: 单位
        v: 采样点速度 (n, 3)，默认静止

    Returns:
        d(mc²)/dt
    """
    rho = np.asarray(rho, dtype=float)
    eps = np.asarray(eps, dtype=float)
    weights = np.asarray(weights, dtype=float)
    factor = np.ones_like(rho)
    if v is not None:
        v = np.asarray(v, dtype=float).reshape(rho.size, 3)
        factor = np.sqrt(1.0 - np.sum(v ** 2, axis=-1) / u.c ** 2)
    return float(-u.c * np.sum(rho * eps * factor * weights))


def interaction_invariant(s: ParticleState, phi1: float, u: Units) -> float:
    """mc²/sqrt(1 − v²/c²) + qφ₁"""
    return s.energy(u) + s.q * phi1


def _rate(s: ParticleState, sampler: FieldSampler, u: Units):
    c = u.c
    q = s.q

    def rate(t: float, y: np.ndarray) -> np.ndarray:
        x, p, m = y[0:3], y[3:6], y[6]
        energy = math.sqrt(m ** 2 * c ** 4 + float(p @ p) * c ** 2)
        v = p * c ** 2 / energy
        f = sampler(t, x)
        E = np.asarray(f.E, dtype=float)
        cB = np.asarray(f.cB, dtype=float)
        dp = q * E + q * np.cross(v, cB) / c - q * f.eps * v / c
        dm = -q * f.eps * m * c / energy
        return np.concatenate((v, dp, [dm]))

    return rate


def push(s: ParticleState, field_sampler: FieldSampler, dt: float, u: Units) -> ParticleState:
    """
    RK4 推进 (x, p, m) 一步，能量始终由质壳关系导出

    Args:
        s: 当前状态
        field_sampler: (t, x) -> FieldPoint
        dt: 时间步长
        u: 单位

    Returns:
        新状态

    Raises:
        MassNonPositive: 质量将变为非正（拒绝该步）
        NonFiniteState: 状态发散
    """
    if not dt > 0:
        raise ValueError(f"dt 必须为正数: {dt}")
    y = np.concatenate((s.x, s.p, [s.m]))
    y = rk4_step(_rate(s, field_sampler, u), y, s.t, dt)
    t = s.t + dt
    if not np.all(np.isfinite(y)):
        raise NonFiniteState(f"t = {t:.6g} 时粒子状态发散")
    if not y[6] > 0:
        raise MassNonPositive(f"t = {t:.6g} 时静止质量变为 {y[6]:.6g}")
    return ParticleState(s.q, float(y[6]), y[0:3], y[3:6], t)


@dataclass
class Trajectory:
    """轨迹记录"""

    times: np.ndarray
    x: np.ndarray
    p: np.ndarray
    m: np.ndarray
    energy: np.ndarray
    invariant: np.ndarray
    final: ParticleState

    def rows(self):
        """按 TRAJECTORY_HEADER 的 CSV 行"""
        for i, t in enumerate(self.times):
            yield (float(t), *map(float, self.x[i]), *map(float, self.p[i]),
                   float(self.m[i]), float(self.energy[i]), float(self.invariant[i]))

    def invariant_drift(self) -> float:
        """不变量相对初值的最大相对漂移"""
        ref = self.invariant[0]
        return float(np.max(np.abs(self.invariant - ref)) / max(abs(ref), 1e-300))


def trajectory(s: ParticleState, sampler: FieldSampler, dt: float, steps: int, u: Units,
               record_every: Optional[int] = None) -> Trajectory:
    """
    连续推进 steps 步并记录

    Args:
        s: 初始状态
        sampler: 场采样器；若有 potential 属性，则记录 𝓔 + qφ，否则记录 𝓔
        dt: 时间步长
        steps: 步数
        u: 单位
        record_every: 记录间隔步数

    Returns:
        Trajectory
    """
    record_every = max(1, int(record_every or PUSHER_CONFIG["record_every"]))
    phi = getattr(sampler, "potential", None)
    times, xs, ps, ms, es, inv = [], [], [], [], [], []

    def record(state: ParticleState):
        e = state.energy(u)
        times.append(state.t)
        xs.append(state.x.copy())
        ps.append(state.p.copy())
        ms.append(state.m)
        es.append(e)
        inv.append(e if phi is None else interaction_invariant(state, phi(state.t, state.x), u))

    record(s)
    for i in range(1, int(steps) + 1):
        s = push(s, sampler, dt, u)
        if i % record_every == 0 or i == steps:
            record(s)
    logger.debug("轨迹推进完成: %d 步, t=%.6g", steps, s.t)
    return Trajectory(np.array(times), np.array(xs), np.array(ps), np.array(ms),
                      np.array(es), np.array(inv), s)


def _radial(x: np.ndarray, center: np.ndarray) -> Tuple[float, np.ndarray]:
    d = np.asarray(x, dtype=float) - center
    r = float(np.linalg.norm(d))
    if r == 0.0:
        raise DomainError("场源中心处场无定义")
    return r, d / r


class CoulombSampler:
    """静止点电荷 q1 的库仑场与势"""

    def __init__(self, q1: float, u: Units, center: Optional[Sequence[float]] = None):
        self.q1 = q1
        self.u = u
        self.center = np.zeros(3) if center is None else np.asarray(center, dtype=float)
        self._coef = u.zeta * u.c / (4.0 * math.pi)

    def __call__(self, t: float, x: np.ndarray) -> FieldPoint:
        r, n = _radial(x, self.center)
        return FieldPoint(E=self._coef * self.q1 / r ** 2 * n)

    def potential(self, t: float, x: np.ndarray) -> float:
        r, _ = _radial(x, self.center)
        return self._coef * self.q1 / r


class ShellSampler:
    """电荷随时间变化的球壳外部场（ε 与径向 E）和势"""

    def __init__(self, spec: ChargeLaw, u: Units, center: Optional[Sequence[float]] = None):
        self.spec = spec
        self.u = u
        self.center = np.zeros(3) if center is None else np.asarray(center, dtype=float)

    def __call__(self, t: float, x: np.ndarray) -> FieldPoint:
        r, n = _radial(x, self.center)
        eps = float(epsilon_field(r, t, self.spec, self.u))
        return FieldPoint(eps=eps, E=float(radial_E(r, t, self.spec, self.u)) * n)

    def potential(self, t: float, x: np.ndarray) -> float:
        r, _ = _radial(x, self.center)
        return float(potential(r, t, self.spec, self.u))


def coulomb_sampler(q1: float, u: Units, center: Optional[Sequence[float]] = None) -> CoulombSampler:
    return CoulombSampler(q1, u, center)


def shell_sampler(spec: ChargeLaw, u: Units, center: Optional[Sequence[float]] = None) -> ShellSampler:
    return ShellSampler(spec, u, center)


def zero_sampler(t: float, x: np.ndarray) -> FieldPoint:
    return FieldPoint()
