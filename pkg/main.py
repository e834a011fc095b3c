#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
非守恒电荷扩展电磁场模拟器
主程序入口
"""

import sys
import argparse
import logging
from typing import List, Optional

from config.settings import APP_NAME, APP_VERSION, LOGGING_CONFIG, VERIFICATION_CONFIG, create_directories
from core.errors import SimulationError, VerificationFailed
from core.scenarios import ScenarioRunner, default_config, run, compare
from core.utils import setup_logging, log_error

logger = logging.getLogger(APP_NAME)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=APP_NAME, description="非守恒电荷扩展电磁场模拟器")
    parser.add_argument("--version", action="version", version=f"{APP_NAME} {APP_VERSION}")
    parser.add_argument("--log-level", default=LOGGING_CONFIG["level"], help="日志级别")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="运行场景文件")
    p_run.add_argument("config", help="场景 JSON 路径")
    p_run.add_argument("--output", help="结果目录（覆盖配置和环境变量）")
    p_run.add_argument("--workers", type=int, help="verify-all 的线程数")

    p_cmp = sub.add_parser("compare", help="逐列比较两份 CSV 结果")
    p_cmp.add_argument("a")
    p_cmp.add_argument("b")
    p_cmp.add_argument("--tol", type=float, default=VERIFICATION_CONFIG["determinism_tol"], help="最大绝对差容差")

    p_ver = sub.add_parser("verify-all", help="运行全部验收检查")
    p_ver.add_argument("--output", help="结果目录")
    p_ver.add_argument("--workers", type=int, help="线程数")
    p_ver.add_argument("--checks", nargs="*", default=[], help="只运行指定的检查")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """主函数，返回退出码"""
    args = build_parser().parse_args(argv)
    create_directories()
    setup_logging({"level": args.log_level.upper()})

    try:
        if args.command == "run":
            outcome = run(args.config, args.output, args.workers)
            if outcome.text:
                print(outcome.text)
            print(f"结果已写出到 {outcome.directory}")
        elif args.command == "compare":
            report = compare(args.a, args.b, args.tol)
            print(report.format())
            if not report.passed:
                return VerificationFailed.exit_code
        else:
            config = default_config("verify-all")
            config["verification"]["checks"] = list(args.checks)
            outcome = ScenarioRunner(config, args.output, args.workers).run()
            print(outcome.text)
            if not outcome.passed:
                return VerificationFailed.exit_code
    except SimulationError as e:
        key = f" [{e.key}]" if getattr(e, "key", None) else ""
        log_error(f"{e}{key}", type(e).__name__)
        print(f"错误{key}: {e}", file=sys.stderr)
        return e.exit_code
    except OSError as e:
        log_error(str(e), "IOError")
        print(f"文件错误: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
