"""日志工具

处理器只挂在工具链根记录器 ``xylo_toolchain`` 上，各模块通过 ``setup_logger(__name__)``
取得它的子记录器，日志向上传递，同一个日志文件只有一个轮转处理器。
"""
import logging
import os
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Optional, Union


ROOT_LOGGER_NAME = "xylo_toolchain"

# 日志配置（支持环境变量）
LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")
LOG_FILE: str = os.getenv("LOG_FILE", "./logs/xylo_toolchain.log")
LOG_MAX_BYTES: int = int(os.getenv("LOG_MAX_BYTES", "10485760"))  # 默认10MB
LOG_BACKUP_COUNT: int = int(os.getenv("LOG_BACKUP_COUNT", "5"))  # 默认保留5个备份文件

LOG_FORMAT = '%(asctime)s.%(msecs)03d - %(name)s - %(levelname)s - %(message)s'
CONSOLE_FORMAT = '%(asctime)s.%(msecs)03d - %(levelname)s - %(message)s'
DATE_FORMAT = '%Y-%m-%d %H:%M:%S'

_console_handler: Optional[logging.Handler] = None


def _install_handlers(root: logging.Logger):
    global _console_handler

    log_file_path = Path(LOG_FILE)
    log_file_path.parent.mkdir(parents=True, exist_ok=True)

    # 长时间仿真 / 批量验证时日志会很大，按大小轮转
    file_handler = RotatingFileHandler(
        log_file_path,
        maxBytes=LOG_MAX_BYTES,
        backupCount=LOG_BACKUP_COUNT,
        encoding='utf-8'
    )
    file_handler.setLevel(logging.DEBUG)
    file_handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT))

    # 控制台输出到 stderr，stdout 留给命令行结果
    console_handler = logging.StreamHandler()
    console_handler.setLevel(logging.INFO)
    console_handler.setFormatter(logging.Formatter(CONSOLE_FORMAT, datefmt=DATE_FORMAT))

    root.addHandler(file_handler)
    root.addHandler(console_handler)
    _console_handler = console_handler


def setup_logger(name: str = ROOT_LOGGER_NAME) -> logging.Logger:
    """获取日志记录器（首次调用时为根记录器安装文件与控制台处理器）"""
    root = logging.getLogger(ROOT_LOGGER_NAME)
    if not root.handlers:
        root.setLevel(getattr(logging, LOG_LEVEL.upper(), logging.INFO))
        _install_handlers(root)

    if name == ROOT_LOGGER_NAME or name.startswith(ROOT_LOGGER_NAME + "."):
        return logging.getLogger(name)
    return root.getChild(name)


def set_console_level(level: Union[int, str]):
    """调整控制台输出级别（命令行 -v / -q），文件日志不受影响"""
    setup_logger()
    if isinstance(level, str):
        level = getattr(logging, level.upper(), logging.INFO)
    _console_handler.setLevel(level)
    root = logging.getLogger(ROOT_LOGGER_NAME)
    # 根记录器级别高于 DEBUG 时，DEBUG 请求无法到达处理器
    if level < root.level:
        root.setLevel(level)
