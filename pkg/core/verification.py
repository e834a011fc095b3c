#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
验收检查模块
代数推导、平面波与有质量色散、球壳瞬态与能量账目、粒子推进、守恒恒等式、
Wigner 循环以及多线程确定性的检查，在线程池中并行运行，结果按名称排序
"""

import math
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from config.settings import VERIFICATION_CONFIG, PERFORMANCE_CONFIG
from .analytic_shell import (ShellSpec, RampSpec, StaticShell, balance_ledger, limiting_ledger, radiated_energy,
                             flux_quadrature)
from .conservation import (divergence_identity_residual, energy_contraction, momentum_contraction,
                           energy_law_terms, momentum_law_terms, subsystem_energy_terms,
                           subsystem_momentum_terms, discrete_balance, time_integrated_ledger)
from .errors import ConfigError
from .field_model import (FieldJet, FieldPoint, SourcePoint, Units, ZERO_SOURCE, SLOT_TO_EQUATION,
                          EPS, E, CB, V0, U0, system_residual, sources_for_jet)
from .gamma_algebra import dirac_residual, system_lhs_4d
from .grid_solver import (RadialGrid, CartesianGrid, run_radial, radial_l2_error,
                          convergence_order, run_cartesian, plane_wave_state, measure_phase_speed,
                          measure_dispersion, zero_cartesian_state, step_cartesian)
from .particle_dynamics import (ParticleState, force_and_power, mass_rate, push, trajectory,
                                coulomb_sampler, shell_sampler)
from .utils import log_error
from .wigner_ledger import CycleConfig, run_cycle

logger = logging.getLogger(__name__)

VC = VERIFICATION_CONFIG
NATURAL = Units()


@dataclass
class CheckResult:
    """单项检查结果"""

    name: str
    passed: bool
    value: float
    tolerance: float
    detail: str = ""


def _rng(offset: int = 0) -> np.random.Generator:
    return np.random.default_rng(VC["seed"] + offset)


# ---------------------------------------------------------------------------
# 代数
# ---------------------------------------------------------------------------

def check_algebra() -> CheckResult:
    """超复数 Dirac 残差与直接编码的方程组以及三维形式残差一致"""
    rng = _rng(1)
    worst = 0.0
    for kappa in VC["kappas"]:
        u = NATURAL.with_kappa(kappa)
        for _ in range(VC["algebra_samples"]):
            jet = FieldJet.from_arrays(rng.normal(size=16), rng.normal(size=(4, 16)))
            a = dirac_residual(jet, kappa)
            b = system_lhs_4d(jet, kappa)
            r = system_residual(jet, ZERO_SOURCE, u)
            mapped = np.array([sign * r[index] for index, sign in SLOT_TO_EQUATION])
            scale = max(1.0, float(np.max(np.abs(a))))
            worst = max(worst, float(np.max(np.abs(a - b))) / scale, float(np.max(np.abs(a - mapped))) / scale)
    tol = VC["algebra_tol"]
    return CheckResult("algebra", worst <= tol, worst, tol,
                       f"{len(VC['kappas'])} 个 kappa × {VC['algebra_samples']} 个随机 jet")


# ---------------------------------------------------------------------------
# 笛卡尔求解器
# ---------------------------------------------------------------------------

def check_plane_wave() -> CheckResult:
    """纵向 ε–E 平面波以光速传播，磁场保持为零"""
    u = NATURAL
    grid = CartesianGrid.build(0.0, 1.0, VC["plane_wave_cells"], u, boundary="periodic")
    t_end = VC["plane_wave_crossings"] * grid.length / u.c
    rec = run_cartesian(plane_wave_state(grid, 1), grid, u, t_end, record_every=10 ** 9)
    final = rec.final_state
    ratio = measure_phase_speed(final, grid, 1, u)
    k = 2.0 * math.pi / grid.length
    exact = np.cos(k * (grid.x - u.c * final.t))
    l2 = float(np.linalg.norm(final.fields[EPS] - exact) / np.linalg.norm(exact))
    b_over_e = float(np.max(np.abs(final.fields[CB:CB + 3])) / np.max(np.abs(final.fields[E:E + 3])))
    err = abs(ratio - 1.0)
    tol = VC["phase_speed_tol"]
    passed = err <= tol and l2 <= VC["plane_wave_l2_tol"] and b_over_e <= VC["b_over_e_tol"]
    return CheckResult("cartesian_plane_wave", passed, err, tol,
                       f"n={grid.n}, L2={l2:.3g}, |B|/|E|={b_over_e:.3g}")


def check_dispersion() -> CheckResult:
    """κ ≠ 0 时测得的 ω² 与 c²(k² + κ²) 一致"""
    u = NATURAL.with_kappa(4.0 * math.pi)
    grid = CartesianGrid.build(0.0, 1.0, VC["dispersion_cells"], u, boundary="periodic")
    worst = 0.0
    for m in range(1, 6):
        measured, expected = measure_dispersion(grid, u, m)
        worst = max(worst, abs(measured ** 2 - expected ** 2) / expected ** 2)
    tol = VC["dispersion_tol"]
    return CheckResult("cartesian_dispersion", worst <= tol, worst, tol, f"kappa=4π, n={grid.n}, m=1..5")


def check_decoupling() -> CheckResult:
    """κ = 0 时只初始化 V、U 扇区，ε、β、E、B 保持为零"""
    u = NATURAL
    grid = CartesianGrid.build(0.0, 1.0, 64, u, boundary="periodic")
    state = zero_cartesian_state(grid)
    rng = _rng(2)
    for i in list(range(V0, V0 + 4)) + list(range(U0, U0 + 4)):
        m = int(rng.integers(1, 4))
        state.fields[i] = rng.normal() * np.cos(2.0 * math.pi * m * grid.x + rng.uniform(0, 2 * math.pi))
    for _ in range(200):
        state = step_cartesian(state, None, grid, u)
    leak = float(np.max(np.abs(state.fields[:V0])))
    tol = VC["decoupling_tol"]
    return CheckResult("cartesian_decoupling", leak <= tol, leak, tol, "200 步")


# ---------------------------------------------------------------------------
# 径向求解器
# ---------------------------------------------------------------------------

def _shell_run(spec, n: int, r_max: float, t_end: float, probes: Sequence[float],
               flux_radius: Optional[float] = None):
    grid = RadialGrid.build(spec.r0, r_max, n, NATURAL)
    return run_radial(spec, grid, NATURAL, t_end, probes, flux_radius)


def check_shell_l2() -> CheckResult:
    """指数增长球壳：探针处数值解与解析解的 L2 相对误差"""
    rec = _shell_run(ShellSpec(1.0, 1.0, 1.0, "growth"), 4096, 9.0, 6.0, [3.0])
    err = radial_l2_error(rec, NATURAL)
    tol = VC["shell_l2_tol"]
    return CheckResult("radial_shell_l2", err <= tol, err, tol, "n=4096, r=3")


def check_convergence() -> CheckResult:
    """光滑斜坡电荷规律下网格加密的收敛阶"""
    spec = RampSpec(1.0, 1.0, 1.0)
    cells = (256, 512, 1024)
    errors, spacings = [], []
    for n in cells:
        rec = _shell_run(spec, n, 9.0, 6.0, [3.0])
        errors.append(radial_l2_error(rec, NATURAL))
        spacings.append(rec.grid.dr)
    order = convergence_order(errors, spacings)
    tol = VC["convergence_order_min"]
    return CheckResult("radial_convergence", order >= tol, order, tol,
                       "误差 " + ", ".join(f"{e:.3g}" for e in errors))


def check_causality() -> CheckResult:
    """波前到达前两个单元时间之前，探针处的 ε 可以忽略"""
    spec = ShellSpec(1.0, 1.0, 1.0, "growth")
    r = 3.0
    rec = _shell_run(spec, 1024, 9.0, 6.0, [r])
    eps = np.abs(rec.probe_eps[:, 0])
    margin = VC["causality_cells"] * rec.grid.dr / NATURAL.c
    early = rec.times < (r - spec.r0) / NATURAL.c - margin
    value = float(eps[early].max() / eps.max()) if np.any(early) else 0.0
    tol = VC["causality_tol"]
    return CheckResult("radial_causality", value <= tol, value, tol, f"提前 {VC['causality_cells']} 个单元")


def _growth_flux_run():
    spec = ShellSpec(1.0, 1.0, 1.0, "growth")
    return spec, _shell_run(spec, 4096, 33.0, 31.0, [5.0], flux_radius=5.0)


def check_flux() -> CheckResult:
    """穿过 R 的数值能流积分与解析辐射能量一致，r0 ≪ cτ 极限一致"""
    spec, rec = _growth_flux_run()
    u = NATURAL
    R = rec.flux_radius
    ledger = time_integrated_ledger(rec)
    ref = radiated_energy(R, spec, u)
    err = abs(ledger.w_rad - ref) / abs(ref)
    quad_err = abs(flux_quadrature(R, spec, u) - ref) / abs(ref)
    small = ShellSpec(1.0, 0.01, 1.0, "growth")
    limit_err = abs(radiated_energy(math.inf, small, u) - limiting_ledger(small, u).w_rad) / limiting_ledger(small, u).w_rad
    tol = VC["flux_tol"]
    worst = max(err, limit_err)
    passed = worst <= tol and quad_err <= 1e-6
    return CheckResult("radial_flux", passed, worst, tol,
                       f"数值={err:.3g}, 极限={limit_err:.3g}, 积分={quad_err:.3g}")


def check_ledger_closed_form() -> CheckResult:
    """闭式能量账目在三个数量级的参数范围内残差为零"""
    u = NATURAL
    worst = 0.0
    count = 0
    for mode in ("growth", "decay"):
        for q0 in (1e-3, 1.0, 1e3):
            for r0 in (0.01, 0.1, 1.0, 10.0):
                for tau in (0.01, 0.1, 1.0, 10.0):
                    spec = ShellSpec(q0, r0, tau, mode)
                    for R in (2.0 * r0, 10.0 * r0, math.inf):
                        worst = max(worst, balance_ledger(spec, R, u).relative_residual)
                        count += 1
                    worst = max(worst, limiting_ledger(spec, u).relative_residual)
    tol = VC["ledger_tol"]
    return CheckResult("ledger_closed_form", worst <= tol, worst, tol, f"{count} 组参数")


def check_ledger_simulated() -> CheckResult:
    """模拟账目 −Δmc² 与 W_Coul + W_rad 的分配与解析账目一致"""
    spec, rec = _growth_flux_run()
    sim = time_integrated_ledger(rec)
    ref = balance_ledger(spec, rec.flux_radius, NATURAL)
    errors = [abs(sim.delta_rest_energy - ref.delta_rest_energy) / abs(ref.delta_rest_energy),
              abs(sim.w_coul - ref.w_coul) / abs(ref.w_coul),
              abs(sim.w_rad - ref.w_rad) / abs(ref.w_rad)]
    worst = max(errors)
    tol = VC["ledger_sim_tol"]
    return CheckResult("ledger_simulated", worst <= tol, worst, tol,
                       "rest/coul/rad = " + ", ".join(f"{e:.3g}" for e in errors))


def check_radial_balance() -> CheckResult:
    """离散能量平衡：静态库仑场残差为零，加密网格残差按二阶缩小"""
    u = NATURAL
    grid = RadialGrid.build(1.0, 9.0, 256, u)
    static = run_radial(StaticShell(1.0, 1.0), grid, u, 1.0, [3.0], 5.0)
    static_res = float(np.max(np.abs(discrete_balance(static).residual)))

    spec = RampSpec(1.0, 1.0, 1.0)
    maxima = []
    for n in (256, 512, 1024):
        rec = _shell_run(spec, n, 9.0, 6.0, [3.0], flux_radius=5.0)
        maxima.append(float(np.max(np.abs(discrete_balance(rec).residual))))
    ratio = min(maxima[0] / maxima[1], maxima[1] / maxima[2])
    tol = VC["balance_ratio_min"]
    passed = ratio >= tol and static_res <= VC["identity_tol"]
    return CheckResult("radial_balance", passed, ratio, tol,
                       f"静态残差={static_res:.3g}, 最大残差 " + ", ".join(f"{m:.3g}" for m in maxima))


# ---------------------------------------------------------------------------
# 粒子
# ---------------------------------------------------------------------------

def check_mass_shell() -> CheckResult:
    """质壳关系保持；无 ε 时质量不变；功率与力和质量变化率一致"""
    u = NATURAL
    rng = _rng(3)
    E_field = rng.normal(size=3) * 0.1
    B_field = rng.normal(size=3) * 0.1

    def uniform(t, x):
        return FieldPoint(E=E_field, cB=B_field)

    s = ParticleState(1.0, 1.0, np.zeros(3), rng.normal(size=3) * 0.3)
    traj = trajectory(s, uniform, 1e-3, 10000, u, record_every=100)
    dm = float(np.max(np.abs(traj.m - s.m)))

    def with_eps(t, x):
        return FieldPoint(eps=0.05 * math.cos(t), E=E_field, cB=B_field)

    defect = 0.0
    state = s
    for _ in range(10000):
        state = push(state, with_eps, 1e-3, u)
        defect = max(defect, abs(state.mass_shell_defect(u)))

    consistency = 0.0
    for _ in range(100):
        st = ParticleState(rng.normal(), rng.uniform(0.5, 2.0), rng.normal(size=3), rng.normal(size=3))
        f = FieldPoint(eps=rng.normal(), E=rng.normal(size=3), cB=rng.normal(size=3))
        power, force = force_and_power(st, f, u)
        energy = st.energy(u)
        lhs = 2.0 * energy * power - 2.0 * u.c ** 2 * float(st.p @ force)
        rhs = 2.0 * st.m * u.c ** 4 * mass_rate(st, f.eps, u)
        consistency = max(consistency, abs(lhs - rhs) / max(1.0, abs(lhs)))

    passed = dm <= VC["mass_drift_tol"] and defect <= VC["mass_shell_tol"] and consistency <= VC["algebra_tol"]
    return CheckResult("particle_mass_shell", passed, defect, VC["mass_shell_tol"],
                       f"Δm={dm:.3g}, 一致性={consistency:.3g}")


def _orbit_drift(dt: float, t_end: float) -> float:
    u = NATURAL
    s = ParticleState(-1.0, 1.0, [1.0, 0.0, 0.0], [0.0, 0.25, 0.0])
    traj = trajectory(s, coulomb_sampler(1.0, u), dt, int(round(t_end / dt)), u)
    return traj.invariant_drift()


def check_invariant() -> CheckResult:
    """相互作用不变量：静态源漂移按 dt⁴ 缩小，时变球壳源漂移很小"""
    drifts = [_orbit_drift(dt, 20.0) for dt in (0.05, 0.025, 0.0125)]
    order = min(math.log2(drifts[0] / drifts[1]), math.log2(drifts[1] / drifts[2]))

    u = NATURAL
    sampler = shell_sampler(ShellSpec(1.0, 1.0, 1.0, "growth"), u)
    s = ParticleState(0.1, 1.0, [3.0, 0.0, 0.0], [0.0, 0.0, 0.0])
    shell_drift = trajectory(s, sampler, 0.01, 2000, u, record_every=10).invariant_drift()

    tol = VC["invariant_order_min"]
    passed = order >= tol and shell_drift <= VC["invariant_drift_tol"]
    return CheckResult("particle_invariant", passed, order, tol,
                       "漂移 " + ", ".join(f"{d:.3g}" for d in drifts) + f", 球壳={shell_drift:.3g}")


# ---------------------------------------------------------------------------
# 守恒恒等式与循环
# ---------------------------------------------------------------------------

def check_conservation() -> CheckResult:
    """守恒恒等式在构造解上为零，在任意 jet 上等于残差的双线性缩并；子系统为限制"""
    rng = _rng(4)
    worst = 0.0
    for kappa in VC["kappas"]:
        u = NATURAL.with_kappa(kappa)
        for _ in range(50):
            jet = FieldJet.from_arrays(rng.normal(size=16), rng.normal(size=(4, 16)))
            src = sources_for_jet(jet, u)
            e_res, p_res = divergence_identity_residual(jet, src, u)
            worst = max(worst, abs(e_res), float(np.max(np.abs(p_res))))

            other = SourcePoint.from_array(rng.normal(size=16))
            r = system_residual(jet, other, u)
            e_res, p_res = divergence_identity_residual(jet, other, u)
            worst = max(worst, abs(e_res - energy_contraction(jet.value, r, u)),
                        float(np.max(np.abs(p_res - momentum_contraction(jet.value, r, u)))))

    restriction = 0.0
    for _ in range(50):
        f = FieldPoint(eps=rng.normal(), E=rng.normal(size=3), cB=rng.normal(size=3))
        src = SourcePoint(rho_e=rng.normal(), j_e=rng.normal(size=3))
        full_e, sub_e = energy_law_terms(f, src, NATURAL), subsystem_energy_terms(f, src, NATURAL)
        full_p, sub_p = momentum_law_terms(f, src, NATURAL), subsystem_momentum_terms(f, src, NATURAL)
        for a, b in zip(full_e + full_p, sub_e + sub_p):
            restriction = max(restriction, float(np.max(np.abs(np.asarray(a) - np.asarray(b)))))

    tol = VC["identity_tol"]
    value = max(worst, restriction)
    return CheckResult("conservation_identities", value <= tol, value, tol,
                       f"恒等式={worst:.3g}, 子系统={restriction:.3g}")


def check_wigner() -> CheckResult:
    """循环账目残差为零，粒子亏损等于两次辐射能量"""
    u = NATURAL
    worst = 0.0
    for phi1 in (-1.0, 0.0, 0.5, 2.0):
        for phi2 in (-1.0, 0.0, 0.5, 2.0):
            for q0 in (0.1, 1.0, 10.0):
                for r0 in (0.1, 1.0):
                    for tau in (0.01, 1.0, 100.0):
                        shell = ShellSpec(q0, r0, tau, "growth")
                        ledger = run_cycle(CycleConfig(shell, phi1, phi2, 1e6, 1e6), u)
                        w_rad = radiated_energy(math.inf, shell, u) + radiated_energy(
                            math.inf, ShellSpec(q0, r0, tau, "decay"), u)
                        deficit_err = abs(ledger.particle_deficit - w_rad) / max(w_rad, 1e-300)
                        worst = max(worst, ledger.relative_residual, deficit_err)
    tol = VC["wigner_tol"]
    return CheckResult("wigner_cycle", worst <= tol, worst, tol, "φ₁, φ₂, q0, r0, τ 扫描")


DETERMINISM_SUBSET = ("algebra", "conservation_identities", "particle_mass_shell", "wigner_cycle")


def check_determinism() -> CheckResult:
    """不同线程数下检查数值完全一致"""
    runs = {w: {r.name: r.value for r in run_checks(DETERMINISM_SUBSET, workers=w)}
            for w in VC["determinism_workers"]}
    base = runs[VC["determinism_workers"][0]]
    worst = 0.0
    for values in runs.values():
        for name, value in values.items():
            worst = max(worst, abs(value - base[name]) / max(1.0, abs(base[name])))
    tol = VC["determinism_tol"]
    return CheckResult("determinism", worst <= tol, worst, tol,
                       "线程数 " + ", ".join(str(w) for w in VC["determinism_workers"]))


CHECKS: Dict[str, Callable[[], CheckResult]] = {
    "algebra": check_algebra,
    "cartesian_decoupling": check_decoupling,
    "cartesian_dispersion": check_dispersion,
    "cartesian_plane_wave": check_plane_wave,
    "conservation_identities": check_conservation,
    "determinism": check_determinism,
    "ledger_closed_form": check_ledger_closed_form,
    "ledger_simulated": check_ledger_simulated,
    "particle_invariant": check_invariant,
    "particle_mass_shell": check_mass_shell,
    "radial_balance": check_radial_balance,
    "radial_causality": check_causality,
    "radial_convergence": check_convergence,
    "radial_flux": check_flux,
    "radial_shell_l2": check_shell_l2,
    "wigner_cycle": check_wigner,
}


def _run_one(name: str) -> CheckResult:
    try:
        result = CHECKS[name]()
    except Exception as e:
        log_error(f"检查 {name} 出错: {e}", type(e).__name__)
        return CheckResult(name, False, float("nan"), float("nan"), str(e))
    logger.info("检查 %-24s %s (%.6g / %.6g)", name, "通过" if result.passed else "未通过",
                result.value, result.tolerance)
    return result


def run_checks(names: Optional[Sequence[str]] = None, workers: Optional[int] = None) -> List[CheckResult]:
    """
    在线程池中运行检查

    Args:
        names: 检查名称，默认全部
        workers: 线程数，默认 PERFORMANCE_CONFIG["thread_pool_size"]

    Returns:
        按名称排序的结果

    Raises:
        ConfigError: 未知的检查名称
    """
    names = sorted(set(names or CHECKS))
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise ConfigError(f"未知的检查: {', '.join(unknown)}", key="verification.checks")
    workers = max(1, int(workers or PERFORMANCE_CONFIG["thread_pool_size"]))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(_run_one, names))
    return sorted(results, key=lambda r: r.name)


def format_report(results: Sequence[CheckResult]) -> str:
    """检查结果的文本表格"""
    lines = [f"{'检查':<26}{'结果':<6}{'数值':>14}{'容差':>14}  说明"]
    for r in results:
        lines.append(f"{r.name:<26}{'PASS' if r.passed else 'FAIL':<6}{r.value:>14.6g}{r.tolerance:>14.6g}  {r.detail}")
    passed = sum(r.passed for r in results)
    lines.append(f"{passed}/{len(results)} 项通过")
    return "\n".join(lines)
