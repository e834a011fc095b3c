#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
核心模块初始化文件
"""

from .errors import *
from .field_model import Units, FieldPoint, SourcePoint, PotentialPoint, FieldJet, PotentialJet, system_residual
from .analytic_shell import ShellSpec, RampSpec, StaticShell, EnergyLedger, balance_ledger, limiting_ledger
from .grid_solver import RadialGrid, CartesianGrid, run_radial, run_cartesian, run_scenario
from .particle_dynamics import ParticleState, push, trajectory
from .wigner_ledger import CycleConfig, run_cycle
from .scenarios import ScenarioRunner, load_scenario, run, compare
from .verification import CheckResult, run_checks, format_report
from .utils import setup_logging, save_config, load_config, log_error

__all__ = [
    'SimulationError',
    'ConfigError',
    'SchemaMismatch',
    'GridMismatch',
    'NumericalError',
    'VerificationFailed',
    'Units',
    'FieldPoint',
    'SourcePoint',
    'PotentialPoint',
    'FieldJet',
    'PotentialJet',
    'system_residual',
    'ShellSpec',
    'RampSpec',
    'StaticShell',
    'EnergyLedger',
    'balance_ledger',
    'limiting_ledger',
    'RadialGrid',
    'CartesianGrid',
    'run_radial',
    'run_cartesian',
    'run_scenario',
    'ParticleState',
    'push',
    'trajectory',
    'CycleConfig',
    'run_cycle',
    'ScenarioRunner',
    'load_scenario',
    'run',
    'compare',
    'CheckResult',
    'run_checks',
    'format_report',
    'setup_logging',
    'save_config',
    'load_config',
    'log_error'
]
