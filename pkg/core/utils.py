#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
工具函数模块
包含配置读写、日志初始化、结果文件写出与校验和等实用函数
"""

import os
import csv
import json
import hashlib
import logging
import logging.handlers
from typing import List, Dict, Any, Optional, Iterable, Sequence, Callable

import numpy as np

from config.settings import LOGGING_CONFIG, OUTPUT_CONFIG, PATHS


_LOGGING_READY = False


def setup_logging(config: Optional[Dict[str, Any]] = None) -> logging.Logger:
    """
    按 LOGGING_CONFIG 初始化根日志器（只初始化一次）

    Args:
        config: 覆盖 LOGGING_CONFIG 的配置项

    Returns:
        根日志器
    """
    global _LOGGING_READY
    cfg = {**LOGGING_CONFIG, **(config or {})}
    root = logging.getLogger()
    if _LOGGING_READY:
        root.setLevel(cfg["level"])
        return root

    formatter = logging.Formatter(cfg["format"])
    root.setLevel(cfg["level"])

    if cfg.get("console_output", True):
        console = logging.StreamHandler()
        console.setFormatter(formatter)
        root.addHandler(console)

    if cfg.get("file_output", False):
        os.makedirs(PATHS["logs"], exist_ok=True)
        file_handler = logging.handlers.RotatingFileHandler(
            os.path.join(PATHS["logs"], cfg["file_name"]),
            maxBytes=cfg["max_file_size"],
            backupCount=cfg["backup_count"],
            encoding="utf-8"
        )
        file_handler.setFormatter(formatter)
        root.addHandler(file_handler)

    _LOGGING_READY = True
    return root


def log_error(error_msg: str, error_type: str = "ERROR") -> None:
    """
    记录错误日志

    Args:
        error_msg: 错误信息
        error_type: 错误类型
    """
    logger = logging.getLogger("ncce.errors")
    logger.error("%s: %s", error_type, error_msg)

    try:
        os.makedirs(PATHS["logs"], exist_ok=True)
        handler = logging.FileHandler(os.path.join(PATHS["logs"], "error.log"), encoding="utf-8")
        handler.setFormatter(logging.Formatter(LOGGING_CONFIG["format"]))
        record = logger.makeRecord(logger.name, logging.ERROR, __file__, 0,
                                   "%s: %s", (error_type, error_msg), None)
        handler.emit(record)
        handler.close()
    except OSError:
        pass  # 控制台已输出


def save_config(config: Dict[str, Any], file_path: str) -> bool:
    """
    保存配置或账目到 JSON 文件

    Args:
        config: 配置字典
        file_path: 文件路径

    Returns:
        bool: 保存是否成功
    """
    try:
        directory = os.path.dirname(file_path)
        if directory:
            os.makedirs(directory, exist_ok=True)

        with open(file_path, 'w', encoding='utf-8') as f:
            json.dump(to_jsonable(config), f, indent=2, ensure_ascii=False, sort_keys=True)

        return True

    except OSError as e:
        log_error(f"保存 {file_path} 失败: {e}")
        return False


def load_config(file_path: str, default_config: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """
    从 JSON 文件加载配置，并逐块合并到默认配置上

    Args:
        file_path: 文件路径
        default_config: 默认配置，嵌套字典按一层合并

    Returns:
        合并后的配置

    Raises:
        FileNotFoundError: 文件不存在
        json.JSONDecodeError: 文件不是合法 JSON
    """
    with open(file_path, 'r', encoding='utf-8') as f:
        config = json.load(f)

    if not default_config or not isinstance(config, dict):
        return config

    merged_config = {k: (dict(v) if isinstance(v, dict) else v) for k, v in default_config.items()}
    for key, value in config.items():
        if isinstance(value, dict) and isinstance(merged_config.get(key), dict):
            merged_config[key].update(value)
        else:
            merged_config[key] = value
    return merged_config


def format_float(value: float, digits: Optional[int] = None) -> str:
    """按可往返的有效位数格式化浮点数"""
    digits = digits or OUTPUT_CONFIG["float_digits"]
    return format(float(value), f".{digits}g")


def to_jsonable(obj: Any) -> Any:
    """把 numpy 标量和数组转换为可 JSON 序列化的对象"""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def write_csv(file_path: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """
    写出 CSV 文件，浮点数保留足够有效位

    Args:
        file_path: 文件路径
        header: 列名
        rows: 行数据

    Returns:
        写出的文件路径
    """
    directory = os.path.dirname(file_path)
    if directory:
        os.makedirs(directory, exist_ok=True)

    with open(file_path, 'w', encoding='utf-8', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_float(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return file_path


def read_csv(file_path: str) -> Dict[str, List[str]]:
    """读取 CSV 文件为 {列名: 值列表}，保持列顺序"""
    with open(file_path, 'r', encoding='utf-8', newline='') as f:
        reader = csv.reader(f)
        header = next(reader)
        columns: Dict[str, List[str]] = {name: [] for name in header}
        for row in reader:
            for name, value in zip(header, row):
                columns[name].append(value)
    return columns


def rk4_step(rate: Callable[[float, np.ndarray], np.ndarray], y: np.ndarray, t: float, dt: float) -> np.ndarray:
    """
    经典四阶 Runge–Kutta 单步

    Args:
        rate: 导数函数 rate(t, y)
        y: 当前状态
        t: 当前时间
        dt: 步长

    Returns:
        t + dt 时刻的状态
    """
    k1 = rate(t, y)
    k2 = rate(t + 0.5 * dt, y + 0.5 * dt * k1)
    k3 = rate(t + 0.5 * dt, y + 0.5 * dt * k2)
    k4 = rate(t + dt, y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def file_digest(file_path: str, algorithm: Optional[str] = None) -> str:
    """计算文件内容摘要"""
    h = hashlib.new(algorithm or OUTPUT_CONFIG["digest"])
    with open(file_path, 'rb') as f:
        for chunk in iter(lambda: f.read(65536), b''):
            h.update(chunk)
    return h.hexdigest()
