"""
日志工具模块
"""

import logging
import os
from logging.handlers import RotatingFileHandler
from typing import Optional

from config.settings import LOG_LEVEL

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
LOG_MAX_BYTES = 10 * 1024 * 1024
LOG_BACKUP_COUNT = 5

# 第三方库在 DEBUG 级别下输出过多（字体扫描等）
NOISY_LOGGERS = ('matplotlib', 'PIL')


def _file_handler(log_file: str, level: int, formatter: logging.Formatter) -> RotatingFileHandler:
    log_dir = os.path.dirname(log_file)
    if log_dir:
        os.makedirs(log_dir, exist_ok=True)
    handler = RotatingFileHandler(log_file, maxBytes=LOG_MAX_BYTES, backupCount=LOG_BACKUP_COUNT,
                                  encoding='utf-8')
    handler.setLevel(level)
    handler.setFormatter(formatter)
    return handler


def setup_logger(level: Optional[str] = None, log_file: Optional[str] = None) -> logging.Logger:
    """
    配置根日志记录器：控制台输出，外加可选的轮转日志文件

    Args:
        level: 日志级别名称，默认取 LOG_LEVEL；无法识别时退回 INFO
        log_file: 日志文件路径，None 表示只输出到控制台

    Returns:
        根日志记录器
    """
    level_name = (level or LOG_LEVEL).upper()
    numeric_level = getattr(logging, level_name, None)
    if not isinstance(numeric_level, int):
        numeric_level = logging.INFO

    formatter = logging.Formatter(LOG_FORMAT)
    root = logging.getLogger()
    root.setLevel(numeric_level)
    root.handlers.clear()

    console = logging.StreamHandler()
    console.setLevel(numeric_level)
    console.setFormatter(formatter)
    root.addHandler(console)

    for name in NOISY_LOGGERS:
        logging.getLogger(name).setLevel(max(numeric_level, logging.WARNING))

    if log_file:
        try:
            root.addHandler(_file_handler(log_file, numeric_level, formatter))
        except OSError as e:
            root.warning(f"无法创建日志文件 {log_file}: {e}")

    if numeric_level != getattr(logging, level_name, None):
        root.warning(f"未知日志级别 {level_name}，使用 INFO")
    return root


def get_logger(name: str) -> logging.Logger:
    """获取指定名称的日志记录器"""
    return logging.getLogger(name)
