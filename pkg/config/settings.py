"""配置管理"""
import os
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv

from config.constants import QUANTIZE_GLOBAL, QUANTIZE_METHODS


class Settings:
    """应用配置类（从 .env / 环境变量加载，CLI 参数可覆盖）"""

    # ============================================================================
    # 仿真与流水线默认值
    # 注意：类属性只是默认值，实际值通过 load_from_env() 加载
    # ============================================================================

    DT: float = 0.001  # 时间步长（秒）
    OUT_DIR: str = "./artifacts"
    SEED: int = 42
    STEPS: int = 200
    INPUT_RATE: float = 50.0  # 每通道泊松发放率（Hz）
    QUANTIZE_METHOD: str = QUANTIZE_GLOBAL

    # 浮点/整数仿真输出脉冲总数的相对差异容忍度（首次运行后冻结）
    SPIKE_TOLERANCE: float = 0.25

    _loaded: bool = False

    @classmethod
    def load_from_env(cls, env_file: Optional[str] = None, force: bool = False):
        """从 .env 文件和环境变量加载配置到类属性"""
        if cls._loaded and not force:
            return

        # .env 不会覆盖已存在的环境变量
        if env_file:
            load_dotenv(env_file)
        else:
            load_dotenv(Path.cwd() / ".env")

        dt_str = os.getenv("XYLO_DT", "")
        cls.DT = float(dt_str) if dt_str else cls.DT
        cls.OUT_DIR = os.getenv("XYLO_OUT_DIR", "") or cls.OUT_DIR
        seed_str = os.getenv("XYLO_SEED", "")
        cls.SEED = int(seed_str) if seed_str else cls.SEED
        steps_str = os.getenv("XYLO_STEPS", "")
        cls.STEPS = int(steps_str) if steps_str else cls.STEPS
        rate_str = os.getenv("XYLO_INPUT_RATE", "")
        cls.INPUT_RATE = float(rate_str) if rate_str else cls.INPUT_RATE
        cls.QUANTIZE_METHOD = os.getenv("XYLO_QUANTIZE_METHOD", "") or cls.QUANTIZE_METHOD
        tolerance_str = os.getenv("XYLO_SPIKE_TOLERANCE", "")
        cls.SPIKE_TOLERANCE = float(tolerance_str) if tolerance_str else cls.SPIKE_TOLERANCE

        cls._loaded = True

    @classmethod
    def validate(cls):
        """验证必要的配置项"""
        if not cls.DT > 0:
            raise ValueError(f"XYLO_DT 必须为正数，当前值: {cls.DT}")
        if cls.STEPS < 0:
            raise ValueError(f"XYLO_STEPS 不能为负数，当前值: {cls.STEPS}")
        if cls.INPUT_RATE < 0:
            raise ValueError(f"XYLO_INPUT_RATE 不能为负数，当前值: {cls.INPUT_RATE}")
        if cls.QUANTIZE_METHOD not in QUANTIZE_METHODS:
            raise ValueError(
                f"XYLO_QUANTIZE_METHOD 无效: {cls.QUANTIZE_METHOD}，可选值: {', '.join(QUANTIZE_METHODS)}"
            )
        if cls.SPIKE_TOLERANCE < 0:
            raise ValueError(f"XYLO_SPIKE_TOLERANCE 不能为负数，当前值: {cls.SPIKE_TOLERANCE}")
        return True
