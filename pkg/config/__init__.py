#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
配置模块初始化文件
"""

from .settings import *

__all__ = [
    'APP_NAME', 'APP_VERSION', 'APP_DESCRIPTION',
    'UNITS_CONFIG', 'GRID_CONFIG', 'SHELL_CONFIG', 'QUADRATURE_CONFIG',
    'PUSHER_CONFIG', 'OUTPUT_CONFIG', 'PATHS', 'LOGGING_CONFIG',
    'PERFORMANCE_CONFIG', 'VERIFICATION_CONFIG',
    'create_directories', 'get_config_value', 'set_config_value'
]
