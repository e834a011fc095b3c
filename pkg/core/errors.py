#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
异常类型定义
每个异常类带有命令行返回的退出码
"""


class SimulationError(Exception):
    """模拟器异常基类"""

    exit_code = 1

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key  # 出错的配置键（可选）


class ConfigError(SimulationError):
    """场景配置格式错误或参数超出范围"""

    exit_code = 2


class SchemaMismatch(SimulationError):
    """两个结果文件的列不一致"""

    exit_code = 3


class GridMismatch(SimulationError):
    """求解器记录的网格信息不一致"""

    exit_code = 3


class NumericalError(SimulationError):
    exit_code = 4


class NonRealDecomposition(NumericalError):
    """超复数不在场分量的实数像内"""


class DomainError(NumericalError):
    """解析式在其推导区域之外求值"""


class CflViolation(NumericalError):
    """时间步长超过 Courant 限制"""


class NonFiniteState(NumericalError):
    """求解器或粒子状态出现非有限值"""


class MassNonPositive(NumericalError):
    """静止质量将变为非正，拒绝该步"""


class VerificationFailed(SimulationError):
    """至少一项验收检查未通过"""

    exit_code = 5
