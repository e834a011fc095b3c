#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
工具函数测试
"""

import json
import math

import numpy as np
import pytest

from core.utils import (save_config, load_config, format_float, to_jsonable, write_csv, read_csv,
                        rk4_step, file_digest, log_error)


def test_save_and_load_config_merges_one_level(tmp_path):
    path = tmp_path / "cfg.json"
    assert save_config({"grid": {"n": 64}, "kind": "plane-wave"}, str(path))
    merged = load_config(str(path), {"grid": {"n": 16, "cfl": 0.5}, "run": {"crossings": 1}})
    assert merged["grid"] == {"n": 64, "cfl": 0.5}
    assert merged["run"] == {"crossings": 1}
    assert merged["kind"] == "plane-wave"


def test_save_config_sorts_keys_and_converts_numpy(tmp_path):
    path = tmp_path / "out.json"
    save_config({"b": np.float64(1.5), "a": np.arange(3)}, str(path))
    text = path.read_text(encoding="utf-8")
    assert text.index('"a"') < text.index('"b"')
    assert json.loads(text) == {"a": [0, 1, 2], "b": 1.5}


def test_load_config_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_config(str(tmp_path / "missing.json"))


def test_format_float_round_trips():
    x = 0.1 + 0.2
    assert float(format_float(x)) == x


def test_to_jsonable_nested():
    out = to_jsonable({"x": (np.int64(2), [np.float32(0.5)]), 3: np.zeros(2)})
    assert out == {"x": [2, [0.5]], "3": [0.0, 0.0]}


def test_csv_write_read(tmp_path):
    path = str(tmp_path / "sub" / "t.csv")
    write_csv(path, ("t", "name", "value"), [(0.0, "eps", 1.0 / 3.0), (0.5, "E_x", -2.0)])
    cols = read_csv(path)
    assert list(cols) == ["t", "name", "value"]
    assert cols["name"] == ["eps", "E_x"]
    assert float(cols["value"][0]) == 1.0 / 3.0


def test_rk4_step_exponential_is_fourth_order():
    def rate(t, y):
        return -y

    errors = []
    for dt in (0.1, 0.05):
        y = np.array([1.0])
        t = 0.0
        for _ in range(int(round(1.0 / dt))):
            y = rk4_step(rate, y, t, dt)
            t += dt
        errors.append(abs(y[0] - math.exp(-1.0)))
    assert math.log2(errors[0] / errors[1]) == pytest.approx(4.0, abs=0.2)


def test_file_digest_changes_with_content(tmp_path):
    path = tmp_path / "a.txt"
    path.write_text("abc", encoding="utf-8")
    first = file_digest(str(path))
    assert first == file_digest(str(path))
    path.write_text("abd", encoding="utf-8")
    assert file_digest(str(path)) != first


def test_log_error_writes_error_log(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    log_error("测试错误", "ConfigError")
    text = (tmp_path / "logs" / "error.log").read_text(encoding="utf-8")
    assert "ConfigError: 测试错误" in text


def test_settings_accessors(tmp_path, monkeypatch):
    from config import settings

    assert settings.get_config_value("units", "system") == "natural"
    assert settings.get_config_value("nope", "x", 7) == 7
    monkeypatch.setitem(settings.PUSHER_CONFIG, "dt", settings.PUSHER_CONFIG["dt"])
    assert settings.set_config_value("pusher", "dt", 0.5)
    assert settings.PUSHER_CONFIG["dt"] == 0.5
    assert not settings.set_config_value("nope", "x", 1)

    monkeypatch.chdir(tmp_path)
    settings.create_directories()
    assert (tmp_path / "logs").is_dir() and (tmp_path / "output").is_dir()
