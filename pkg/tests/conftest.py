#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
测试公共夹具
"""

import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from core.field_model import FieldJet, Units  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def natural():
    return Units()


@pytest.fixture
def random_jet(rng):
    """返回生成随机场 jet 的函数"""

    def make(scale: float = 1.0) -> FieldJet:
        return FieldJet.from_arrays(scale * rng.normal(size=16), scale * rng.normal(size=(4, 16)))

    return make


@pytest.fixture
def output_root(tmp_path, monkeypatch):
    """把结果根目录重定向到临时目录"""
    monkeypatch.setenv("NCCE_OUTPUT_ROOT", str(tmp_path / "output"))
    monkeypatch.chdir(tmp_path)
    return tmp_path / "output"
