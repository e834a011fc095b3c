#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
模拟器设置配置
"""

import os

# 应用信息
APP_NAME = "ncce"
APP_VERSION = "1.0.0"
APP_DESCRIPTION = "非守恒电荷电动力学：扩展 Maxwell 方程组模拟器"

# 物理单位（自然单位下场方程各系数均为 ±1）
UNITS_CONFIG = {
    "system": "natural",
    "natural": {"c": 1.0, "zeta": 1.0},
    "si": {"c": 299792458.0, "zeta": 376.730313668},
    "kappa": 0.0
}

# 网格与时间步进
GRID_CONFIG = {
    "cfl": 0.5,
    "radial_cfl": 1.0,  # 径向特征格式只在 c·dt = dr 时成立
    "min_cells": 16,
    "radial_cells": 2048,
    "cartesian_cells": 512,
    "boundary": "outflow",  # outflow 或 periodic
    "blowup_threshold": 1e150
}

# 球壳默认参数（电荷增长/衰减过程）
SHELL_CONFIG = {
    "q0": 1.0,
    "r0": 1.0,
    "tau": 1.0,
    "mode": "growth"
}

# 解析解校验用的自适应积分
QUADRATURE_CONFIG = {
    "epsrel": 1e-8,
    "epsabs": 0.0,
    "limit": 400,
    "tail_time_constants": 60.0
}

# 粒子推进
PUSHER_CONFIG = {
    "dt": 1e-3,
    "steps": 10000,
    "record_every": 1
}

# 输出文件
OUTPUT_CONFIG = {
    "float_digits": 17,
    "output_root_env": "NCCE_OUTPUT_ROOT",
    "default_output_root": "output",
    "manifest_name": "manifest.json",
    "digest": "sha256"
}

# 文件路径
PATHS = {
    "config": "config",
    "scenarios": "config/scenarios",
    "logs": "logs",
    "output": "output"
}

# 日志设置
LOGGING_CONFIG = {
    "level": "INFO",
    "max_file_size": 10 * 1024 * 1024,  # 10MB
    "backup_count": 5,
    "format": "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    "console_output": True,
    "file_output": False,
    "file_name": "ncce.log"
}

# 性能设置
PERFORMANCE_CONFIG = {
    "thread_pool_size": 4
}

# 验收容差
VERIFICATION_CONFIG = {
    "algebra_tol": 1e-12,
    "algebra_samples": 100,
    "kappas": [0.0, 0.5, 2.0],
    "phase_speed_tol": 1e-3,
    "dispersion_tol": 1e-2,
    "shell_l2_tol": 1e-2,
    "convergence_order_min": 1.8,
    "flux_tol": 2e-2,
    "ledger_tol": 1e-12,
    "ledger_sim_tol": 2e-2,
    "mass_shell_tol": 1e-10,
    "mass_drift_tol": 1e-12,
    "invariant_order_min": 3.5,
    "identity_tol": 1e-10,
    "wigner_tol": 1e-12,
    "determinism_tol": 1e-13,
    "determinism_workers": [1, 2, 8],
    "plane_wave_cells": 1024,
    "plane_wave_crossings": 10,
    "plane_wave_l2_tol": 1e-2,
    "probe_abs_tol": 1e-2,  # 球壳场景中探针与解析值的最大绝对差
    "b_over_e_tol": 1e-10,
    "dispersion_cells": 512,
    "decoupling_tol": 1e-12,
    "causality_cells": 2,  # 波前之前留出的单元数
    "causality_tol": 1e-8,
    "balance_ratio_min": 3.0,  # 网格加密一倍时残差的缩小倍数
    "invariant_drift_tol": 1e-6,
    "seed": 20240611
}


def create_directories():
    """创建必要的目录"""
    for key in ("logs", "output"):
        os.makedirs(PATHS[key], exist_ok=True)


def _config_map():
    return {
        "units": UNITS_CONFIG,
        "grid": GRID_CONFIG,
        "shell": SHELL_CONFIG,
        "quadrature": QUADRATURE_CONFIG,
        "pusher": PUSHER_CONFIG,
        "output": OUTPUT_CONFIG,
        "paths": PATHS,
        "logging": LOGGING_CONFIG,
        "performance": PERFORMANCE_CONFIG,
        "verification": VERIFICATION_CONFIG
    }


def get_config_value(section, key, default=None):
    """获取配置值"""
    return _config_map().get(section, {}).get(key, default)


def set_config_value(section, key, value):
    """设置配置值"""
    config_map = _config_map()
    if section in config_map:
        config_map[section][key] = value
        return True
    return False
