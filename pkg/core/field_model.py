#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
场模型模块
包含 16 个场分量、16 个源、16 个势的数据结构，三维形式场方程与势波动方程的
逐点残差，势到场的映射，ε 场源定律以及纵向平面波

导数以 jet 形式显式给出：下标 0 对应 x^0 = ct（即 (1/c)∂/∂t），1..3 对应 x, y, z
"""

import math
from dataclasses import dataclass, field
from typing import Dict, Any, Optional, Sequence, Tuple

import numpy as np

from config.settings import UNITS_CONFIG
from .errors import ConfigError


FIELD_NAMES = (
    "eps", "beta",
    "E_x", "E_y", "E_z",
    "cB_x", "cB_y", "cB_z",
    "V0", "V_x", "V_y", "V_z",
    "U0", "U_x", "U_y", "U_z",
)

SOURCE_NAMES = (
    "rho_e", "j_e_x", "j_e_y", "j_e_z",
    "rho_m", "j_m_x", "j_m_y", "j_m_z",
    "s", "k_x", "k_y", "k_z",
    "l_x", "l_y", "l_z", "p",
)

POTENTIAL_NAMES = (
    "phi", "cA_x", "cA_y", "cA_z",
    "Pi0", "Pi_x", "Pi_y", "Pi_z",
    "S", "theta_x", "theta_y", "theta_z",
    "Psi", "vartheta_x", "vartheta_y", "vartheta_z",
)

RESIDUAL_NAMES = (
    "eps_eq", "E_eq_x", "E_eq_y", "E_eq_z",
    "beta_eq", "cB_eq_x", "cB_eq_y", "cB_eq_z",
    "V0_eq", "V_eq_x", "V_eq_y", "V_eq_z",
    "U_eq_x", "U_eq_y", "U_eq_z", "U0_eq",
)

# 场数组偏移
EPS, BETA, E, CB, V0, V, U0, U = 0, 1, 2, 5, 8, 9, 12, 13
# 势数组偏移
PHI, CA, PI0, PI, S, THETA, PSI, VARTHETA = 0, 1, 4, 5, 8, 9, 12, 13

# 超复数 Dirac 残差第 i 个基元系数 = sign * system_residual[index]（源为零时）
# 基元顺序：I, γ^0..γ^3, γ^0γ^k, γ^2γ^3, γ^3γ^1, γ^1γ^2, 四个三重积, γ^0γ^1γ^2γ^3
SLOT_TO_EQUATION: Tuple[Tuple[int, int], ...] = (
    (8, -1),
    (0, 1), (1, 1), (2, 1), (3, 1),
    (9, 1), (10, 1), (11, 1),
    (12, 1), (13, 1), (14, 1),
    (4, -1), (5, -1), (6, -1), (7, -1),
    (15, -1),
)


@dataclass(frozen=True)
class Units:
    """光速、真空阻抗、Compton 波数以及 SI 输出换算因子"""

    c: float = 1.0
    zeta: float = 1.0
    kappa: float = 0.0
    length_scale: float = 1.0
    time_scale: float = 1.0
    field_scale: float = 1.0

    def __post_init__(self):
        if not self.c > 0:
            raise ConfigError(f"光速 c 必须为正数: {self.c}", key="units.c")
        if not self.zeta > 0:
            raise ConfigError(f"真空阻抗 zeta 必须为正数: {self.zeta}", key="units.zeta")
        if not self.kappa >= 0:
            raise ConfigError(f"kappa 不能为负: {self.kappa}", key="units.kappa")

    @classmethod
    def from_config(cls, block: Optional[Dict[str, Any]] = None) -> "Units":
        """
        由场景配置的 units 块构造

        Args:
            block: {"system": "natural" | "si", 其余键覆盖默认值}

        Returns:
            Units
        """
        block = dict(block or {})
        system = block.pop("system", UNITS_CONFIG["system"])
        if system not in ("natural", "si"):
            raise ConfigError(f"未知单位制: {system}", key="units.system")
        base = dict(UNITS_CONFIG[system])
        base["kappa"] = UNITS_CONFIG["kappa"]
        base.update(block)
        try:
            return cls(**{k: float(v) for k, v in base.items()})
        except (TypeError, ValueError) as e:
            raise ConfigError(f"units 配置无效: {e}", key="units") from e

    def with_kappa(self, kappa: float) -> "Units":
        return Units(self.c, self.zeta, kappa, self.length_scale, self.time_scale, self.field_scale)


def _vec(values) -> np.ndarray:
    return np.asarray(values, dtype=float).reshape(3)


@dataclass(frozen=True, eq=False)
class FieldPoint:
    """某一事件点的 16 个场分量"""

    eps: float = 0.0
    beta: float = 0.0
    E: np.ndarray = field(default_factory=lambda: np.zeros(3))
    cB: np.ndarray = field(default_factory=lambda: np.zeros(3))
    V0: float = 0.0
    V: np.ndarray = field(default_factory=lambda: np.zeros(3))
    U0: float = 0.0
    U: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def as_array(self) -> np.ndarray:
        return np.concatenate((
            [self.eps, self.beta], _vec(self.E), _vec(self.cB),
            [self.V0], _vec(self.V), [self.U0], _vec(self.U),
        )).astype(float)

    @classmethod
    def from_array(cls, a: Sequence[float]) -> "FieldPoint":
        a = np.asarray(a, dtype=float)
        return cls(eps=float(a[EPS]), beta=float(a[BETA]), E=a[E:E + 3].copy(),
                   cB=a[CB:CB + 3].copy(), V0=float(a[V0]), V=a[V:V + 3].copy(),
                   U0=float(a[U0]), U=a[U:U + 3].copy())

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.as_array())))


@dataclass(frozen=True, eq=False)
class SourcePoint:
    """16 个电荷密度与电流密度分量"""

    rho_e: float = 0.0
    j_e: np.ndarray = field(default_factory=lambda: np.zeros(3))
    rho_m: float = 0.0
    j_m: np.ndarray = field(default_factory=lambda: np.zeros(3))
    s: float = 0.0
    k: np.ndarray = field(default_factory=lambda: np.zeros(3))
    l: np.ndarray = field(default_factory=lambda: np.zeros(3))
    p: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.concatenate((
            [self.rho_e], _vec(self.j_e), [self.rho_m], _vec(self.j_m),
            [self.s], _vec(self.k), _vec(self.l), [self.p],
        )).astype(float)

    @classmethod
    def from_array(cls, a: Sequence[float]) -> "SourcePoint":
        a = np.asarray(a, dtype=float)
        return cls(rho_e=float(a[0]), j_e=a[1:4].copy(), rho_m=float(a[4]), j_m=a[5:8].copy(),
                   s=float(a[8]), k=a[9:12].copy(), l=a[12:15].copy(), p=float(a[15]))


ZERO_SOURCE = SourcePoint()


@dataclass(frozen=True, eq=False)
class PotentialPoint:
    """势：phi, cA, Pi0, Pi, S, theta, Psi, vartheta"""

    phi: float = 0.0
    cA: np.ndarray = field(default_factory=lambda: np.zeros(3))
    Pi0: float = 0.0
    Pi: np.ndarray = field(default_factory=lambda: np.zeros(3))
    S: float = 0.0
    theta: np.ndarray = field(default_factory=lambda: np.zeros(3))
    Psi: float = 0.0
    vartheta: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def as_array(self) -> np.ndarray:
        return np.concatenate((
            [self.phi], _vec(self.cA), [self.Pi0], _vec(self.Pi),
            [self.S], _vec(self.theta), [self.Psi], _vec(self.vartheta),
        )).astype(float)

    @classmethod
    def from_array(cls, a: Sequence[float]) -> "PotentialPoint":
        a = np.asarray(a, dtype=float)
        return cls(phi=float(a[PHI]), cA=a[CA:CA + 3].copy(), Pi0=float(a[PI0]), Pi=a[PI:PI + 3].copy(),
                   S=float(a[S]), theta=a[THETA:THETA + 3].copy(), Psi=float(a[PSI]),
                   vartheta=a[VARTHETA:VARTHETA + 3].copy())


@dataclass(frozen=True, eq=False)
class FieldJet:
    """场值及其对 x^0 = ct 和三个空间坐标的导数"""

    value: FieldPoint
    dt: FieldPoint
    grad: Tuple[FieldPoint, FieldPoint, FieldPoint]

    def __post_init__(self):
        if len(self.grad) != 3:
            raise ValueError("grad 需要三个空间导数")

    def derivatives(self) -> np.ndarray:
        """(4, 16) 数组，第 mu 行为 ∂/∂x^mu"""
        return np.stack([self.dt.as_array()] + [g.as_array() for g in self.grad])

    @classmethod
    def from_arrays(cls, value: Sequence[float], d: np.ndarray) -> "FieldJet":
        d = np.asarray(d, dtype=float)
        return cls(FieldPoint.from_array(value), FieldPoint.from_array(d[0]),
                   tuple(FieldPoint.from_array(d[k]) for k in (1, 2, 3)))

    def is_finite(self) -> bool:
        return self.value.is_finite() and bool(np.all(np.isfinite(self.derivatives())))


@dataclass(frozen=True, eq=False)
class PotentialJet:
    """势及其一阶导数 d[mu]，可选二阶导数 dd[mu, nu]（对称），x^0 = ct"""

    value: np.ndarray
    d: np.ndarray
    dd: Optional[np.ndarray] = None

    def __post_init__(self):
        object.__setattr__(self, "value", np.asarray(self.value, dtype=float).reshape(16))
        object.__setattr__(self, "d", np.asarray(self.d, dtype=float).reshape(4, 16))
        if self.dd is not None:
            object.__setattr__(self, "dd", np.asarray(self.dd, dtype=float).reshape(4, 4, 16))

    @property
    def point(self) -> PotentialPoint:
        return PotentialPoint.from_array(self.value)


def _div(d: np.ndarray, off: int) -> float:
    return d[1][off] + d[2][off + 1] + d[3][off + 2]


def _grad(d: np.ndarray, off: int) -> np.ndarray:
    return np.array([d[1][off], d[2][off], d[3][off]])


def _curl(d: np.ndarray, off: int) -> np.ndarray:
    return np.array([
        d[2][off + 2] - d[3][off + 1],
        d[3][off] - d[1][off + 2],
        d[1][off + 1] - d[2][off],
    ])


def system_residual(jet: FieldJet, src: SourcePoint, u: Units) -> np.ndarray:
    """
    三维形式有源场方程组的残差（左端减右端）

    Args:
        jet: 场及其导数
        src: 电荷与电流密度
        u: 单位（c, zeta, kappa）

    Returns:
        16 个残差，顺序同 RESIDUAL_NAMES
    """
    f = jet.value.as_array()
    d = jet.derivatives()
    q = src.as_array()
    c, z, k = u.c, u.zeta, u.kappa

    rho_e, j_e, rho_m, j_m = q[0], q[1:4], q[4], q[5:8]
    s, kk, ll, p = q[8], q[9:12], q[12:15], q[15]

    r = np.empty(16)
    r[0] = d[0][EPS] + _div(d, E) - k * f[V0] - z * c * rho_e
    r[1:4] = d[0][E:E + 3] - _curl(d, CB) + _grad(d, EPS) + k * f[V:V + 3] + z * j_e
    r[4] = -d[0][BETA] + _div(d, CB) + k * f[U0] + z * c * rho_m
    r[5:8] = d[0][CB:CB + 3] + _curl(d, E) - _grad(d, BETA) - k * f[U:U + 3] - z * j_m
    r[8] = d[0][V0] + _div(d, V) + k * f[EPS] - z * s
    r[9:12] = d[0][V:V + 3] - _curl(d, U) + _grad(d, V0) - k * f[E:E + 3] + z * kk
    r[12:15] = d[0][U:U + 3] + _curl(d, V) + _grad(d, U0) + k * f[CB:CB + 3] - z * ll
    r[15] = d[0][U0] + _div(d, U) + k * f[BETA] + z * p
    return r


def sources_for_jet(jet: FieldJet, u: Units) -> SourcePoint:
    """
    使任意场 jet 精确满足场方程组的源（每个方程恰含一个源分量）

    Args:
        jet: 场及其导数
        u: 单位

    Returns:
        SourcePoint
    """
    r = system_residual(jet, ZERO_SOURCE, u)
    z, c = u.zeta, u.c
    return SourcePoint(
        rho_e=r[0] / (z * c), j_e=-r[1:4] / z,
        rho_m=-r[4] / (z * c), j_m=r[5:8] / z,
        s=r[8] / z, k=-r[9:12] / z,
        l=r[12:15] / z, p=-r[15] / z,
    )


def _potential_map(x: np.ndarray, d: np.ndarray, kappa: float) -> np.ndarray:
    """势及其一阶导数到 16 个场分量的线性映射"""
    k = kappa
    out = np.empty(16)
    out[EPS] = d[0][PHI] + _div(d, CA) + k * x[S]
    out[E:E + 3] = -d[0][CA:CA + 3] - _grad(d, PHI) + _curl(d, PI) + k * x[THETA:THETA + 3]
    out[CB:CB + 3] = d[0][PI:PI + 3] + _grad(d, PI0) + _curl(d, CA) + k * x[VARTHETA:VARTHETA + 3]
    out[BETA] = d[0][PI0] + _div(d, PI) - k * x[PSI]
    out[V0] = d[0][S] + _div(d, THETA) - k * x[PHI]
    out[V:V + 3] = -d[0][THETA:THETA + 3] + _curl(d, VARTHETA) - _grad(d, S) - k * x[CA:CA + 3]
    out[U0] = -d[0][PSI] - _div(d, VARTHETA) - k * x[PI0]
    out[U:U + 3] = d[0][VARTHETA:VARTHETA + 3] + _curl(d, THETA) + _grad(d, PSI) - k * x[PI:PI + 3]
    return out


def fields_from_potentials(pjet: PotentialJet, u: Units) -> FieldPoint:
    """
    由势计算场

    Args:
        pjet: 势及其一阶导数
        u: 单位

    Returns:
        场
    """
    return FieldPoint.from_array(_potential_map(pjet.value, pjet.d, u.kappa))


def field_jet_from_potentials(pjet: PotentialJet, u: Units) -> FieldJet:
    """由二阶势 jet 计算场及其导数"""
    if pjet.dd is None:
        raise ValueError("需要二阶导数")
    value = _potential_map(pjet.value, pjet.d, u.kappa)
    d = np.stack([_potential_map(pjet.d[mu], pjet.dd[mu], u.kappa) for mu in range(4)])
    return FieldJet.from_arrays(value, d)


def _source_weights(src: SourcePoint, u: Units) -> np.ndarray:
    # 各势分量对应的源（未乘 zeta），顺序同 POTENTIAL_NAMES
    q = src.as_array()
    return np.concatenate((
        [u.c * q[0]], q[1:4],
        [u.c * q[4]], q[5:8],
        [q[8]], q[9:12],
        [q[15]], q[12:15],
    ))


def _box(pjet: PotentialJet) -> np.ndarray:
    dd = pjet.dd
    return dd[0, 0] - dd[1, 1] - dd[2, 2] - dd[3, 3]


def potential_wave_residual(pjet2: PotentialJet, src: SourcePoint, u: Units) -> np.ndarray:
    """
    势波动方程残差 □X + κ²X − ζ·源

    Args:
        pjet2: 带二阶导数的势
        src: 源
        u: 单位

    Returns:
        16 个残差，顺序同 POTENTIAL_NAMES
    """
    if pjet2.dd is None:
        raise ValueError("需要二阶导数")
    return _box(pjet2) + u.kappa ** 2 * pjet2.value - u.zeta * _source_weights(src, u)


def sources_from_potentials(pjet2: PotentialJet, u: Units) -> SourcePoint:
    """使势 jet 精确满足势波动方程的源（构造解用）"""
    w = (_box(pjet2) + u.kappa ** 2 * pjet2.value) / u.zeta
    return SourcePoint(
        rho_e=w[PHI] / u.c, j_e=w[CA:CA + 3],
        rho_m=w[PI0] / u.c, j_m=w[PI:PI + 3],
        s=w[S], k=w[THETA:THETA + 3],
        l=w[VARTHETA:VARTHETA + 3], p=w[PSI],
    )


def epsilon_source(drho_dt: float, div_j: float, u: Units) -> float:
    """□ε = ζ(∂ρ/∂t + ∇·j) 的右端，电荷守恒时为零"""
    return u.zeta * (drho_dt + div_j)


def _plane_wave_parts(omega, khat, t, r, u):
    if not omega > 0:
        raise ValueError("omega 必须为正数")
    khat = _vec(khat)
    norm = np.linalg.norm(khat)
    if not math.isclose(norm, 1.0, rel_tol=1e-12):
        raise ValueError(f"khat 必须为单位矢量, |khat| = {norm}")
    k = (omega / u.c) * khat
    phase = omega * t - float(np.dot(k, _vec(r)))
    return k, phase


def plane_wave(eps0: float, omega: float, khat: Sequence[float], t: float,
               r: Sequence[float], u: Units) -> FieldPoint:
    """
    纵向 ε–E 平面波：无磁场，E 平行于 k，|k| = ω/c

    Args:
        eps0: 振幅
        omega: 角频率
        khat: 传播方向单位矢量
        t: 时间
        r: 位置
        u: 单位

    Returns:
        (t, r) 处的场
    """
    k, phase = _plane_wave_parts(omega, khat, t, r, u)
    amp = eps0 * math.cos(phase)
    return FieldPoint(eps=amp, E=k * (u.c / omega) * amp)


def plane_wave_jet(eps0: float, omega: float, khat: Sequence[float], t: float,
                   r: Sequence[float], u: Units) -> FieldJet:
    """平面波及其精确导数"""
    k, phase = _plane_wave_parts(omega, khat, t, r, u)
    value = plane_wave(eps0, omega, khat, t, r, u).as_array()
    # ∂cos(phase)/∂x^mu = -sin(phase) ∂phase/∂x^mu
    slope = -eps0 * math.sin(phase)
    dphase = np.concatenate(([omega / u.c], -k))
    shape = np.zeros(16)
    shape[EPS] = 1.0
    shape[E:E + 3] = k * (u.c / omega)
    d = np.outer(dphase * slope, shape)
    return FieldJet.from_arrays(value, d)

