#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
显式时域求解器模块
球对称一维径向 ε–E_r 子系统：Courant 数为 1 的特征格式，ε ± E_r 沿特征线做梯形积分，
球壳电荷以四单元 top-hat 沉积为 ζcρ 源项；
含 κ 的 16 场一维笛卡尔求解器：空间中心二阶差分，时间经典四阶 Runge–Kutta（method of lines）
"""

import math
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import integrate

from config.settings import GRID_CONFIG
from .analytic_shell import ChargeLaw, ShellSpec, RampSpec, epsilon_field, radial_E
from .errors import CflViolation, ConfigError, NonFiniteState
from .field_model import Units, FIELD_NAMES, EPS, BETA, E, CB, V0, V, U0, U
from .utils import rk4_step

logger = logging.getLogger(__name__)

Sources = Union[None, np.ndarray, Callable[[float, np.ndarray], np.ndarray]]

# 球壳内侧的节点数；内边界节点位于 r0 − INNER_NODES·dr
INNER_NODES = 4

# 以球壳节点为中心的 top-hat 沉积权重（节点偏移 −2..2）
DEPOSIT_WEIGHTS = np.array([0.5, 1.0, 1.0, 1.0, 0.5])


def _check_finite(y: np.ndarray, t: float) -> None:
    limit = GRID_CONFIG["blowup_threshold"]
    if not np.all(np.isfinite(y)) or np.max(np.abs(y), initial=0.0) > limit:
        raise NonFiniteState(f"t = {t:.6g} 时状态发散")


def _check_cfl(dt: float, h: float, cfl: float, u: Units) -> None:
    if not 0 < cfl <= 1:
        raise CflViolation(f"Courant 数必须在 (0, 1] 内: {cfl}")
    if dt > cfl * h / u.c * (1.0 + 1e-12):
        raise CflViolation(f"dt = {dt:.6g} 超过 cfl*h/c = {cfl * h / u.c:.6g}")


# ---------------------------------------------------------------------------
# 径向求解器
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RadialGrid:
    """
    径向网格：[r0, r_max] 上 n 个等距单元，另在球壳内侧保留 INNER_NODES 个节点

    节点 0 为内边界 r_inner = r0 − INNER_NODES·dr，节点 shell_index 为球壳
    """

    r_min: float
    r_max: float
    n: int
    dt: float
    cfl: float = GRID_CONFIG["radial_cfl"]

    def __post_init__(self):
        if not (self.r_max > self.r_min > 0):
            raise ConfigError(f"需要 r_max > r_min > 0: r_min={self.r_min}, r_max={self.r_max}", key="grid.r_max")
        if int(self.n) < GRID_CONFIG["min_cells"]:
            raise ConfigError(f"单元数至少为 {GRID_CONFIG['min_cells']}: {self.n}", key="grid.n")
        if not self.dt > 0:
            raise ConfigError(f"dt 必须为正数: {self.dt}", key="grid.dt")
        if self.cfl != 1.0:
            raise ConfigError(f"径向特征格式要求 Courant 数为 1: {self.cfl}", key="grid.cfl")
        if self.r_min < (INNER_NODES + 1) * self.dr:
            raise ConfigError(f"球壳内侧放不下 {INNER_NODES} 个节点: r0={self.r_min}, dr={self.dr:.6g}",
                              key="grid.n")

    @classmethod
    def build(cls, r_min: float, r_max: float, n: int, u: Units,
              cfl: Optional[float] = None) -> "RadialGrid":
        """按 Courant 数确定时间步长"""
        cfl = GRID_CONFIG["radial_cfl"] if cfl is None else float(cfl)
        dr = (r_max - r_min) / n
        return cls(r_min, r_max, int(n), cfl * dr / u.c, cfl)

    @property
    def dr(self) -> float:
        return (self.r_max - self.r_min) / self.n

    @property
    def r_inner(self) -> float:
        return self.r_min - INNER_NODES * self.dr

    @property
    def shell_index(self) -> int:
        return INNER_NODES

    @property
    def size(self) -> int:
        return self.n + INNER_NODES + 1

    @property
    def r(self) -> np.ndarray:
        return self.r_inner + self.dr * np.arange(self.size)

    @cached_property
    def deposit(self) -> np.ndarray:
        """
        单位电荷的节点电荷密度

        归一化使离散 Gauss 律在球壳外给出的总电荷恰为 1
        """
        r = self.r
        shape = np.zeros(self.size)
        k = self.shell_index
        shape[k - 2:k + 3] = DEPOSIT_WEIGHTS
        norm = 4.0 * math.pi * np.sum(0.5 * self.dr * (shape[:-1] + shape[1:]) * r[1:] * r[:-1])
        return shape / norm

    def index_of(self, radius: float) -> int:
        """最接近给定半径的节点"""
        return int(np.clip(round((radius - self.r_inner) / self.dr), 0, self.size - 1))

    def metadata(self) -> Dict[str, Any]:
        return {"r_min": self.r_min, "r_max": self.r_max, "n": self.n, "dr": self.dr,
                "dt": self.dt, "cfl": self.cfl, "r_inner": self.r_inner, "shell_index": self.shell_index}


@dataclass
class RadialState:
    """
    节点上的 ε 与 E_r，以及两个边界上的势和内边界反射历史

    history[k] 为 t_start + k·dt 时刻内边界的出射不变量 (ε − E_r) + φ/r
    """

    eps: np.ndarray
    E_r: np.ndarray
    t: float = 0.0
    phi_inner: float = 0.0
    phi_outer: float = 0.0
    history: List[float] = field(default_factory=list)
    t_start: float = 0.0

    def copy(self) -> "RadialState":
        return RadialState(self.eps.copy(), self.E_r.copy(), self.t, self.phi_inner, self.phi_outer,
                           list(self.history), self.t_start)


def initial_radial_state(grid: RadialGrid, u: Units, q_static: float = 0.0, t: float = 0.0) -> RadialState:
    """
    初始状态：零场或电荷 q_static 的离散静态平衡

    E_r 由沉积电荷的离散 Gauss 律逐节点积出，在该格式下严格定常；
    球壳外等于 ζc q/(4π(r² − dr²))

    Args:
        grid: 径向网格
        u: 单位
        q_static: 球壳初始电荷
        t: 初始时刻

    Returns:
        RadialState
    """
    r = grid.r
    dr = grid.dr
    rho = q_static * grid.deposit
    gauss = np.concatenate(([0.0], np.cumsum(0.5 * dr * u.zeta * u.c * (rho[:-1] + rho[1:]) * r[1:] * r[:-1])))
    E_r = np.zeros_like(r)
    E_r[1:] = gauss[1:] / (r[1:] ** 2 - dr ** 2)
    eps = np.zeros_like(r)
    # 规范 φ(r_inner) = 0；外边界的 φ 取库仑势
    phi_outer = float(r[-1] * (E_r[-1] - eps[-1]))
    return RadialState(eps, E_r, t, 0.0, phi_outer, [float(eps[0] - E_r[0])], t)


def shell_density(grid: RadialGrid, source: Optional[ChargeLaw], t: float) -> np.ndarray:
    """t 时刻沉积在节点上的电荷密度 ρ"""
    if source is None:
        return np.zeros(grid.size)
    return float(source.charge(t)) * grid.deposit


def _delayed(state: RadialState, dt: float, s: float) -> float:
    pos = (s - state.t_start) / dt
    h = state.history
    if pos <= 0 or len(h) == 1:
        return h[0]
    k = min(int(math.floor(pos)), len(h) - 2)
    w = pos - k
    return (1.0 - w) * h[k] + w * h[k + 1]


def step_radial(state: RadialState, source: Optional[ChargeLaw], grid: RadialGrid, u: Units) -> RadialState:
    """
    径向求解器推进一步

    内部节点：w± = ε ± E_r 满足 (1/c)∂t w ± ∂r w = ζcρ − 2E_r/r，c·dt = dr 时沿特征线
    恰好从相邻节点出发，梯形积分后隐式部分在 E_r 中抵消，更新是显式的。
    内边界：源自由的内部区域正则，入射不变量等于 2r_inner/c 之前的出射不变量，经由原点反射；
    外边界：向内的不变量 (ε − E_r) + φ/r 保持为零

    Args:
        state: 当前状态
        source: 球壳电荷规律，None 表示无源
        grid: 径向网格
        u: 单位

    Returns:
        新状态

    Raises:
        CflViolation: c·dt 不等于 dr
        NonFiniteState: 状态发散
    """
    if abs(u.c * grid.dt - grid.dr) > 1e-12 * grid.dr:
        raise CflViolation(f"径向特征格式要求 c·dt = dr: dt={grid.dt:.6g}, dr/c={grid.dr / u.c:.6g}")
    r = grid.r
    dr = grid.dr
    half = 0.5 * dr
    zc = u.zeta * u.c
    t1 = state.t + grid.dt

    eps, E_r = state.eps, state.E_r
    rho0 = zc * shell_density(grid, source, state.t)
    rho1 = zc * shell_density(grid, source, t1)
    S = rho0 - 2.0 * E_r / r
    wp = eps + E_r
    wm = eps - E_r

    new_eps = np.empty_like(eps)
    new_E = np.empty_like(E_r)
    P = wp[:-2] + half * (S[:-2] + rho1[1:-1])
    Q = wm[2:] + half * (S[2:] + rho1[1:-1])
    kappa = dr / (2.0 * r[1:-1])
    new_E[1:-1] = 0.5 * (P - Q)
    new_eps[1:-1] = 0.5 * (P + Q) - kappa * (P - Q)

    # 内边界
    ra = r[0]
    k0 = dr / (2.0 * ra)
    B0 = wm[1] + half * S[1]
    Phi0 = state.phi_inner + half * eps[0]
    g_delay = _delayed(state, grid.dt, t1 - 2.0 * ra / u.c)
    a = (Phi0 / ra - g_delay + k0 * B0 / (2.0 * (1.0 - k0))) * (1.0 - k0) / (1.0 - 1.5 * k0 + k0 ** 2)
    b = (B0 - k0 * a) / (1.0 - k0)
    phi_inner = Phi0 + 0.5 * half * (a + b)
    new_eps[0], new_E[0] = 0.5 * (a + b), 0.5 * (a - b)

    # 外边界
    rn = r[-1]
    kn = dr / (2.0 * rn)
    A0 = wp[-2] + half * S[-2]
    Phi0 = state.phi_outer + half * eps[-1]
    b = (-Phi0 / rn - kn * A0 / (2.0 * (1.0 + kn))) / (1.0 + 0.5 * kn + kn ** 2 / (2.0 * (1.0 + kn)))
    a = (A0 + kn * b) / (1.0 + kn)
    phi_outer = Phi0 + 0.5 * half * (a + b)
    new_eps[-1], new_E[-1] = 0.5 * (a + b), 0.5 * (a - b)

    _check_finite(np.stack((new_eps, new_E)), t1)
    g_new = (new_eps[0] - new_E[0]) + phi_inner / ra
    return RadialState(new_eps, new_E, t1, float(phi_inner), float(phi_outer),
                       state.history + [float(g_new)], state.t_start)


def radial_field_energy(state: RadialState, grid: RadialGrid, u: Units, upto: Optional[int] = None) -> float:
    """[r_inner, r_upto] 内 (E² + ε²)/(2ζc) 的体积分（梯形公式）"""
    upto = grid.size - 1 if upto is None else upto
    r = grid.r[:upto + 1]
    density = (state.E_r[:upto + 1] ** 2 + state.eps[:upto + 1] ** 2) / (2.0 * u.zeta * u.c)
    return float(integrate.trapezoid(density * 4.0 * math.pi * r ** 2, r))


def radial_flux(state: RadialState, grid: RadialGrid, u: Units, index: int) -> float:
    """节点 index 所在球面上向外的 εE/ζ 能流"""
    r = grid.r[index]
    return float(state.eps[index] * state.E_r[index] / u.zeta * 4.0 * math.pi * r ** 2)


def source_power(state: RadialState, grid: RadialGrid, u: Units, source: Optional[ChargeLaw]) -> float:
    """沉积电荷上的功率 ∫cερ dV = −d(mc²)/dt"""
    r = grid.r
    rho = shell_density(grid, source, state.t)
    return float(integrate.trapezoid(u.c * state.eps * rho * 4.0 * math.pi * r ** 2, r))


@dataclass
class RadialRecord:
    """径向运行记录：探针时间序列和能量平衡输入量"""

    grid: RadialGrid
    source: Optional[ChargeLaw]
    times: np.ndarray
    probe_radii: np.ndarray
    probe_eps: np.ndarray          # (nt, n_probe)
    probe_E: np.ndarray
    flux_index: int
    field_energy: np.ndarray       # [r_inner, R] 内场能
    inner_flux: np.ndarray         # r_inner 处向外能流
    outer_flux: np.ndarray         # R 处向外能流
    source_power: np.ndarray       # ∫cερ dV
    final_state: RadialState

    @property
    def flux_radius(self) -> float:
        return float(self.grid.r[self.flux_index])

    def metadata(self) -> Dict[str, Any]:
        meta = self.grid.metadata()
        meta.update({"flux_radius": self.flux_radius, "steps": len(self.times) - 1})
        return meta


def run_radial(source: Optional[ChargeLaw], grid: RadialGrid, u: Units, t_end: float,
               probes: Sequence[float] = (), flux_radius: Optional[float] = None,
               initial: Optional[RadialState] = None, record_every: int = 1) -> RadialRecord:
    """
    径向求解器运行到 t_end，记录探针值与能量平衡量

    Args:
        source: 球壳电荷规律
        grid: 径向网格
        u: 单位
        t_end: 结束时间
        probes: 探针半径（线性插值）
        flux_radius: 能流球面半径，取最近节点
        initial: 初始状态，默认按 source 在 t=0 的电荷取离散静态平衡
        record_every: 记录间隔步数

    Returns:
        RadialRecord
    """
    if not t_end > 0:
        raise ConfigError(f"t_end 必须为正数: {t_end}", key="run.t_end")
    probes = np.asarray(probes, dtype=float)
    if probes.size and (probes.min() < grid.r_inner or probes.max() > grid.r_max):
        raise ConfigError("探针半径超出网格范围", key="probes.radii")
    if initial is None:
        q_start = 0.0 if source is None else float(source.charge(0.0))
        initial = initial_radial_state(grid, u, q_start)
    flux_index = grid.index_of(grid.r_max if flux_radius is None else flux_radius)
    steps = int(math.ceil(t_end / grid.dt - 1e-9))
    record_every = max(1, int(record_every))
    r = grid.r

    times, p_eps, p_E = [], [], []
    energy, inner, outer, power = [], [], [], []

    def record(s: RadialState):
        times.append(s.t)
        p_eps.append(np.interp(probes, r, s.eps))
        p_E.append(np.interp(probes, r, s.E_r))
        energy.append(radial_field_energy(s, grid, u, flux_index))
        inner.append(radial_flux(s, grid, u, 0))
        outer.append(radial_flux(s, grid, u, flux_index))
        power.append(source_power(s, grid, u, source))

    logger.info("径向求解: n=%d, dt=%.4g, 步数=%d", grid.n, grid.dt, steps)
    state = initial.copy()
    record(state)
    for i in range(1, steps + 1):
        state = step_radial(state, source, grid, u)
        if i % record_every == 0 or i == steps:
            record(state)
    logger.info("径向求解完成: t=%.6g", state.t)

    return RadialRecord(
        grid=grid, source=source, times=np.array(times), probe_radii=probes,
        probe_eps=np.array(p_eps).reshape(len(times), probes.size),
        probe_E=np.array(p_E).reshape(len(times), probes.size),
        flux_index=flux_index, field_energy=np.array(energy), inner_flux=np.array(inner),
        outer_flux=np.array(outer), source_power=np.array(power), final_state=state,
    )


def radial_oracle(record: RadialRecord, u: Units) -> Tuple[np.ndarray, np.ndarray]:
    """探针处的解析 (ε, E_r)，形状同 probe_eps"""
    t = record.times[:, None]
    r = record.probe_radii[None, :]
    spec = record.source
    return (np.broadcast_to(epsilon_field(r, t, spec, u), record.probe_eps.shape),
            np.broadcast_to(radial_E(r, t, spec, u), record.probe_E.shape))


def radial_l2_error(record: RadialRecord, u: Units) -> float:
    """探针时间序列相对解析解的 L2 相对误差（ε 与 E_r 合并）"""
    eps_ref, E_ref = radial_oracle(record, u)
    num = np.sum((record.probe_eps - eps_ref) ** 2 + (record.probe_E - E_ref) ** 2)
    den = np.sum(eps_ref ** 2 + E_ref ** 2)
    return float(math.sqrt(num / den)) if den > 0 else float(math.sqrt(num))


def convergence_order(errors: Sequence[float], spacings: Sequence[float]) -> float:
    """log(误差) 对 log(网格间距) 的最小二乘斜率"""
    slope, _ = np.polyfit(np.log(np.asarray(spacings)), np.log(np.asarray(errors)), 1)
    return float(slope)


# ---------------------------------------------------------------------------
# 笛卡尔求解器
# ---------------------------------------------------------------------------

# 特征对 (a, b, σ)：a + σb 向 +x 传播，a − σb 向 −x 传播
CHARACTERISTIC_PAIRS: Tuple[Tuple[int, int, int], ...] = (
    (EPS, E, 1),
    (E + 1, CB + 2, 1),
    (E + 2, CB + 1, -1),
    (BETA, CB, -1),
    (V0, V, 1),
    (V + 1, U + 2, 1),
    (V + 2, U + 1, -1),
    (U0, U, 1),
)

BOUNDARIES = ("periodic", "outflow")


@dataclass(frozen=True)
class CartesianGrid:
    """一维 x 网格；periodic 不含右端点，outflow 包含两端点"""

    x_min: float
    x_max: float
    n: int
    dt: float
    cfl: float = GRID_CONFIG["cfl"]
    boundary: str = GRID_CONFIG["boundary"]

    def __post_init__(self):
        if not self.x_max > self.x_min:
            raise ConfigError("需要 x_max > x_min", key="grid.x_max")
        if int(self.n) < GRID_CONFIG["min_cells"]:
            raise ConfigError(f"单元数至少为 {GRID_CONFIG['min_cells']}: {self.n}", key="grid.n")
        if self.boundary not in BOUNDARIES:
            raise ConfigError(f"未知边界条件: {self.boundary}", key="grid.boundary")
        if not self.dt > 0:
            raise ConfigError(f"dt 必须为正数: {self.dt}", key="grid.dt")

    @classmethod
    def build(cls, x_min: float, x_max: float, n: int, u: Units, cfl: Optional[float] = None,
              boundary: Optional[str] = None) -> "CartesianGrid":
        cfl = GRID_CONFIG["cfl"] if cfl is None else cfl
        boundary = boundary or GRID_CONFIG["boundary"]
        cells = n if boundary == "periodic" else n - 1
        return cls(x_min, x_max, int(n), cfl * (x_max - x_min) / cells / u.c, cfl, boundary)

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @property
    def dx(self) -> float:
        cells = self.n if self.boundary == "periodic" else self.n - 1
        return self.length / cells

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n)

    def metadata(self) -> Dict[str, Any]:
        return {"x_min": self.x_min, "x_max": self.x_max, "n": self.n, "dx": self.dx,
                "dt": self.dt, "cfl": self.cfl, "boundary": self.boundary}


@dataclass
class CartesianState1D:
    """16 个场分量在 x 节点上的值，fields[i] 顺序同 FIELD_NAMES"""

    fields: np.ndarray
    t: float = 0.0

    def copy(self) -> "CartesianState1D":
        return CartesianState1D(self.fields.copy(), self.t)

    def component(self, name: str) -> np.ndarray:
        return self.fields[FIELD_NAMES.index(name)]


def zero_cartesian_state(grid: CartesianGrid) -> CartesianState1D:
    return CartesianState1D(np.zeros((16, grid.n)), 0.0)


def _ddx(f: np.ndarray, grid: CartesianGrid) -> np.ndarray:
    h = grid.dx
    if grid.boundary == "periodic":
        return (np.roll(f, -1, axis=-1) - np.roll(f, 1, axis=-1)) / (2.0 * h)
    d = np.empty_like(f)
    d[..., 1:-1] = (f[..., 2:] - f[..., :-2]) / (2.0 * h)
    d[..., 0] = (-3.0 * f[..., 0] + 4.0 * f[..., 1] - f[..., 2]) / (2.0 * h)
    d[..., -1] = (3.0 * f[..., -1] - 4.0 * f[..., -2] + f[..., -3]) / (2.0 * h)
    return d


def _transport(f: np.ndarray, fx: np.ndarray) -> np.ndarray:
    """∂0 f 中只含 x 导数的部分"""
    out = np.zeros_like(f)
    for a, b, sigma in CHARACTERISTIC_PAIRS:
        out[a] = -sigma * fx[b]
        out[b] = -sigma * fx[a]
    return out


def _local(f: np.ndarray, src: Optional[np.ndarray], u: Units) -> np.ndarray:
    """∂0 f 中的 κ 耦合项与源项"""
    k, z, c = u.kappa, u.zeta, u.c
    out = np.zeros_like(f)
    out[EPS] = k * f[V0]
    out[E:E + 3] = -k * f[V:V + 3]
    out[BETA] = k * f[U0]
    out[CB:CB + 3] = k * f[U:U + 3]
    out[V0] = -k * f[EPS]
    out[V:V + 3] = k * f[E:E + 3]
    out[U:U + 3] = -k * f[CB:CB + 3]
    out[U0] = -k * f[BETA]
    if src is not None:
        out[EPS] += z * c * src[0]
        out[E:E + 3] -= z * src[1:4]
        out[BETA] += z * c * src[4]
        out[CB:CB + 3] += z * src[5:8]
        out[V0] += z * src[8]
        out[V:V + 3] -= z * src[9:12]
        out[U:U + 3] += z * src[12:15]
        out[U0] -= z * src[15]
    return out


def _outflow_fix(tr: np.ndarray, fx: np.ndarray) -> None:
    """边界节点：出射不变量取单侧导数输运，入射不变量输运置零"""
    for a, b, sigma in CHARACTERISTIC_PAIRS:
        for node, side in ((0, -1), (-1, 1)):
            w_right = fx[a, node] + sigma * fx[b, node]
            w_left = fx[a, node] - sigma * fx[b, node]
            # 左边界入射为右行波，右边界入射为左行波
            rate_right = -w_right if side == 1 else 0.0
            rate_left = w_left if side == -1 else 0.0
            tr[a, node] = 0.5 * (rate_right + rate_left)
            tr[b, node] = 0.5 * sigma * (rate_right - rate_left)


def _cartesian_rate(grid: CartesianGrid, sources: Sources, u: Units):
    x = grid.x

    def rate(t: float, f: np.ndarray) -> np.ndarray:
        fx = _ddx(f, grid)
        tr = _transport(f, fx)
        if grid.boundary == "outflow":
            _outflow_fix(tr, fx)
        src = sources(t, x) if callable(sources) else sources
        return u.c * (tr + _local(f, src, u))

    return rate


def step_cartesian(state: CartesianState1D, sources: Sources, grid: CartesianGrid, u: Units,
                   kappa: Optional[float] = None) -> CartesianState1D:
    """
    笛卡尔求解器推进一步（∂/∂y = ∂/∂z = 0）

    Args:
        state: 当前状态
        sources: (16, n) 源数组（SOURCE_NAMES 顺序）、源函数 sources(t, x) 或 None
        grid: 网格
        u: 单位
        kappa: 覆盖 u.kappa

    Returns:
        新状态
    """
    if kappa is not None:
        u = u.with_kappa(kappa)
    _check_cfl(grid.dt, grid.dx, grid.cfl, u)
    f = rk4_step(_cartesian_rate(grid, sources, u), state.fields, state.t, grid.dt)
    t = state.t + grid.dt
    _check_finite(f, t)
    return CartesianState1D(f, t)


def mode_state(grid: CartesianGrid, m: int, component: str = "eps", amplitude: float = 1.0) -> CartesianState1D:
    """单个分量初始化为 amplitude·cos(kx)，k = 2πm/L"""
    state = zero_cartesian_state(grid)
    k = 2.0 * math.pi * m / grid.length
    state.fields[FIELD_NAMES.index(component)] = amplitude * np.cos(k * (grid.x - grid.x_min))
    return state


def plane_wave_state(grid: CartesianGrid, m: int, eps0: float = 1.0) -> CartesianState1D:
    """沿 +x 传播的纵向 ε–E 平面波初值"""
    state = mode_state(grid, m, "eps", eps0)
    state.fields[E] = state.fields[EPS]
    return state


def mode_coefficient(state: CartesianState1D, grid: CartesianGrid, m: int, component: str = "eps") -> complex:
    """分量的第 m 个 Fourier 系数（cos 初值对应幅值 1）"""
    k = 2.0 * math.pi * m / grid.length
    f = state.component(component)
    return complex(2.0 * np.mean(f * np.exp(-1j * k * (grid.x - grid.x_min))))


def measure_phase_speed(state: CartesianState1D, grid: CartesianGrid, m: int, u: Units) -> float:
    """由 ε 的 Fourier 相位求相速度与 c 之比（要求累计相位误差小于 π）"""
    k = 2.0 * math.pi * m / grid.length
    omega = u.c * k
    if not state.t > 0:
        raise ValueError("需要 t > 0")
    a = mode_coefficient(state, grid, m) * np.exp(1j * omega * state.t)
    return 1.0 - float(np.angle(a)) / (omega * state.t)


def measure_frequency(times: np.ndarray, signal: np.ndarray, pad: int = 16) -> float:
    """
    单频信号的角频率：Hann 窗、补零、峰值抛物线插值

    Args:
        times: 等间距采样时间
        signal: 实信号
        pad: 补零倍数

    Returns:
        角频率
    """
    times = np.asarray(times, dtype=float)
    signal = np.asarray(signal, dtype=float)
    if times.size < 8:
        raise ValueError("采样点太少")
    dt = float(np.mean(np.diff(times)))
    windowed = (signal - np.mean(signal)) * np.hanning(signal.size)
    nfft = pad * signal.size
    spectrum = np.abs(np.fft.rfft(windowed, nfft))
    spectrum[:pad] = 0.0  # 去掉直流附近
    i = int(np.argmax(spectrum))
    i = min(max(i, 1), spectrum.size - 2)
    lo, mid, hi = np.log(spectrum[i - 1:i + 2] + 1e-300)
    shift = 0.5 * (lo - hi) / (lo - 2.0 * mid + hi)
    return 2.0 * math.pi * (i + shift) / (nfft * dt)


@dataclass
class CartesianRecord:
    """笛卡尔运行记录"""

    grid: CartesianGrid
    times: np.ndarray
    probe_x: np.ndarray
    probes: np.ndarray             # (nt, n_probe, 16)
    modes: Dict[int, np.ndarray]   # m -> ε 的 Fourier 系数序列
    final_state: CartesianState1D

    def metadata(self) -> Dict[str, Any]:
        meta = self.grid.metadata()
        meta["steps"] = len(self.times) - 1
        return meta


def run_cartesian(state: CartesianState1D, grid: CartesianGrid, u: Units, t_end: float,
                  sources: Sources = None, probes: Sequence[float] = (),
                  modes: Sequence[int] = (), record_every: int = 1) -> CartesianRecord:
    """
    笛卡尔求解器运行到 t_end

    Args:
        state: 初始状态
        grid: 网格
        u: 单位
        t_end: 结束时间
        sources: 源
        probes: 探针位置（取最近节点）
        modes: 需要记录 Fourier 系数的模式号
        record_every: 记录间隔步数

    Returns:
        CartesianRecord
    """
    if not t_end > 0:
        raise ConfigError(f"t_end 必须为正数: {t_end}", key="run.t_end")
    steps = int(math.ceil(t_end / grid.dt - 1e-9))
    idx = np.array([int(np.argmin(np.abs(grid.x - p))) for p in probes], dtype=int)
    record_every = max(1, int(record_every))

    times: List[float] = []
    probe_rows: List[np.ndarray] = []
    mode_rows: Dict[int, List[complex]] = {m: [] for m in modes}

    def record(s: CartesianState1D):
        times.append(s.t)
        probe_rows.append(s.fields[:, idx].T.copy())
        for m in modes:
            mode_rows[m].append(mode_coefficient(s, grid, m))

    logger.info("笛卡尔求解: n=%d, dt=%.4g, 步数=%d, 边界=%s", grid.n, grid.dt, steps, grid.boundary)
    s = state.copy()
    record(s)
    for i in range(1, steps + 1):
        s = step_cartesian(s, sources, grid, u)
        if i % record_every == 0 or i == steps:
            record(s)

    return CartesianRecord(
        grid=grid, times=np.array(times), probe_x=grid.x[idx],
        probes=np.array(probe_rows).reshape(len(times), idx.size, 16),
        modes={m: np.array(v) for m, v in mode_rows.items()}, final_state=s,
    )


# ---------------------------------------------------------------------------
# 场景运行
# ---------------------------------------------------------------------------

@dataclass
class SolverResult:
    """求解器场景结果：汇总量、长格式表和运行记录"""

    kind: str
    summary: Dict[str, Any]
    tables: Dict[str, Tuple[Sequence[str], List[Sequence[Any]]]] = field(default_factory=dict)
    record: Any = None


def _long_rows(times, coords, names, values):
    # values: (nt, n_coord, n_name)
    rows = []
    for i, t in enumerate(times):
        for j, x in enumerate(coords):
            for k, name in enumerate(names):
                rows.append((float(t), float(x), name, float(values[i, j, k])))
    return rows


def shell_law_from_config(block: Dict[str, Any], mode: str) -> ChargeLaw:
    """由 shell 配置块构造电荷规律"""
    law = block.get("law", "exponential")
    try:
        if law == "exponential":
            return ShellSpec(float(block["q0"]), float(block["r0"]), float(block["tau"]), mode)
        if law == "ramp":
            if mode != "growth":
                raise ConfigError("ramp 规律只支持 growth 模式", key="shell.law")
            return RampSpec(float(block["q0"]), float(block["r0"]), float(block["tau"]))
    except KeyError as e:
        raise ConfigError(f"shell 配置缺少 {e.args[0]}", key=f"shell.{e.args[0]}") from e
    raise ConfigError(f"未知电荷规律: {law}", key="shell.law")


def _run_shell(config: Dict[str, Any], u: Units) -> SolverResult:
    mode = "growth" if config["kind"] == "shell-growth" else "decay"
    spec = shell_law_from_config(config["shell"], mode)
    g = config["grid"]
    grid = RadialGrid.build(spec.r0, float(g["r_max"]), int(g["n"]), u, g.get("cfl"))
    p = config.get("probes", {})
    run = config.get("run", {})
    flux_radius = float(p.get("flux_radius", 0.5 * (spec.r0 + grid.r_max)))
    t_end = float(run.get("t_end", (flux_radius + spec.r0) / u.c + 25.0 * spec.tau))
    rec = run_radial(spec, grid, u, t_end, p.get("radii", [flux_radius]), flux_radius,
                     record_every=int(p.get("record_every", 1)))

    eps_ref, E_ref = radial_oracle(rec, u)
    names = ("eps", "E_r")
    numeric = np.stack((rec.probe_eps, rec.probe_E), axis=-1)
    oracle = np.stack((eps_ref, E_ref), axis=-1)
    header = ("t", "r", "field", "value")
    summary = {
        "kind": config["kind"],
        "grid": rec.metadata(),
        "l2_error": radial_l2_error(rec, u),
        "t_end": float(rec.times[-1]),
    }
    return SolverResult(
        kind=config["kind"], summary=summary, record=rec,
        tables={
            "probes": (header, _long_rows(rec.times, rec.probe_radii, names, numeric)),
            "oracle": (header, _long_rows(rec.times, rec.probe_radii, names, oracle)),
        },
    )


def _run_plane_wave(config: Dict[str, Any], u: Units) -> SolverResult:
    g = config["grid"]
    w = config.get("wave", {})
    grid = CartesianGrid.build(float(g.get("x_min", 0.0)), float(g.get("x_max", 1.0)), int(g["n"]), u,
                               g.get("cfl"), g.get("boundary", "periodic"))
    if grid.boundary != "periodic":
        raise ConfigError("平面波场景需要 periodic 边界", key="grid.boundary")
    m = int(w.get("mode", 1))
    crossings = float(config.get("run", {}).get("crossings", 10))
    t_end = crossings * grid.length / u.c
    state = plane_wave_state(grid, m, float(w.get("eps0", 1.0)))
    probes = config.get("probes", {}).get("x", [grid.x_min + 0.5 * grid.length])
    rec = run_cartesian(state, grid, u, t_end, probes=probes, modes=[m],
                        record_every=int(config.get("probes", {}).get("record_every", 16)))
    final = rec.final_state
    b_norm = float(np.max(np.abs(final.fields[CB:CB + 3])))
    e_norm = float(np.max(np.abs(final.fields[E:E + 3])))
    summary = {
        "kind": config["kind"],
        "grid": rec.metadata(),
        "phase_speed_ratio": measure_phase_speed(final, grid, m, u),
        "b_over_e": b_norm / e_norm if e_norm > 0 else 0.0,
        "t_end": float(final.t),
    }
    header = ("t", "x", "field", "value")
    return SolverResult(config["kind"], summary,
                        {"probes": (header, _long_rows(rec.times, rec.probe_x, FIELD_NAMES, rec.probes))}, rec)


def measure_dispersion(grid: CartesianGrid, u: Units, m: int, periods: float = 15.0,
                       component: str = "eps") -> Tuple[float, float]:
    """
    单模初值下测量角频率

    Returns:
        (测得 ω, 理论 ω = c·sqrt(k² + κ²))
    """
    k = 2.0 * math.pi * m / grid.length
    omega = u.c * math.sqrt(k ** 2 + u.kappa ** 2)
    t_end = periods * 2.0 * math.pi / omega
    state = mode_state(grid, m, component)
    rec = run_cartesian(state, grid, u, t_end, modes=[m])
    measured = measure_frequency(rec.times, rec.modes[m].real)
    return measured, omega


def _run_dispersion(config: Dict[str, Any], u: Units) -> SolverResult:
    g = config["grid"]
    d = config.get("dispersion", {})
    if not u.kappa > 0:
        raise ConfigError("massive-dispersion 需要 kappa > 0", key="units.kappa")
    grid = CartesianGrid.build(float(g.get("x_min", 0.0)), float(g.get("x_max", 1.0)), int(g["n"]), u,
                               g.get("cfl"), g.get("boundary", "periodic"))
    rows, errors = [], {}
    for m in d.get("modes", [1, 2, 3, 4, 5]):
        measured, expected = measure_dispersion(grid, u, int(m), float(d.get("periods", 15.0)))
        k = 2.0 * math.pi * int(m) / grid.length
        rel = abs(measured ** 2 - expected ** 2) / expected ** 2
        errors[str(m)] = rel
        rows.append((int(m), k, measured, expected, rel))
    summary = {
        "kind": config["kind"],
        "grid": grid.metadata(),
        "kappa": u.kappa,
        "omega2_relative_error": errors,
        "max_relative_error": max(errors.values()),
    }
    header = ("mode", "k", "omega_measured", "omega_expected", "omega2_relative_error")
    return SolverResult(config["kind"], summary, {"dispersion": (header, rows)})


_SOLVER_KINDS = {
    "shell-growth": _run_shell,
    "shell-decay": _run_shell,
    "plane-wave": _run_plane_wave,
    "massive-dispersion": _run_dispersion,
}


def run_scenario(config: Dict[str, Any]) -> SolverResult:
    """
    运行求解器场景（shell-growth, shell-decay, plane-wave, massive-dispersion）

    Args:
        config: 已校验的场景配置

    Returns:
        SolverResult

    Raises:
        ConfigError: 场景类型不是求解器场景
    """
    kind = config.get("kind")
    if kind not in _SOLVER_KINDS:
        raise ConfigError(f"不是求解器场景: {kind}", key="kind")
    u = Units.from_config(config.get("units"))
    return _SOLVER_KINDS[kind](config, u)
