"""
Run Logger

记录每个命令行子命令的运行日志，包括：
- 触发时间
- 耗时
- 曲线、α 值与网格大小
- 成功/失败状态
- 计数（分支、点、尖点、事件、缺口）

日志按日期分文件存储在 $EIL_LOG_DIR/{command}/{YYYY-MM-DD}.jsonl，
不属于运行结果文件。
"""

import json
import logging
import os
from datetime import datetime
from pathlib import Path
from typing import Optional

logger = logging.getLogger(__name__)


class RunLogger:
    """运行日志记录器"""

    def __init__(self, command: str, enabled: Optional[bool] = None):
        """
        初始化日志记录器

        Args:
            command: 子命令名称（用于日志文件路径）
            enabled: 是否启用日志，None 表示从环境变量 EIL_RUN_LOGGING 读取
        """
        self.command = command

        if enabled is None:
            env_value = os.getenv("EIL_RUN_LOGGING", "true").lower()
            self.enabled = env_value in ("true", "1", "yes", "on")
        else:
            self.enabled = enabled

        self.log_root = Path(os.getenv("EIL_LOG_DIR", "logs"))
        self.command_log_dir = self.log_root / command

    def log_run(
        self,
        curve: Optional[str],
        alphas: Optional[list[float]],
        grid_n: Optional[int],
        duration_ms: float,
        success: bool,
        error_message: Optional[str] = None,
        **counts
    ):
        """
        记录一次运行

        Args:
            curve: 曲线标签
            alphas: 本次运行的 α 值
            grid_n: 追踪网格大小
            duration_ms: 耗时（毫秒）
            success: 退出码是否为 0
            error_message: 失败时的错误信息
            **counts: 其他计数（分支、点、尖点、事件、缺口）
        """
        if not self.enabled:
            return

        try:
            self.command_log_dir.mkdir(parents=True, exist_ok=True)
            today = datetime.now().strftime("%Y-%m-%d")
            log_file = self.command_log_dir / f"{today}.jsonl"

            log_entry = {
                "timestamp": datetime.now().isoformat(),
                "command": self.command,
                "curve": curve,
                "alphas": alphas,
                "grid_n": grid_n,
                "duration_ms": round(duration_ms, 2),
                "success": success,
                "error_message": error_message,
            }
            log_entry.update(counts)

            with open(log_file, "a", encoding="utf-8") as f:
                f.write(json.dumps(log_entry, ensure_ascii=False) + "\n")

        except Exception as e:
            # 日志写入失败不影响运行
            logger.warning("Failed to write run log: %s", e)


_loggers: dict[str, RunLogger] = {}


def get_run_logger(command: str) -> RunLogger:
    """获取或创建子命令的日志记录器"""
    if command not in _loggers:
        _loggers[command] = RunLogger(command)
    return _loggers[command]
