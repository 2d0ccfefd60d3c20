"""数据转换器模块 - 将量化规格转换为硬件配置"""
from typing import Tuple

import numpy as np

from hwconfig.models import HardwareConfig
from hwconfig.validator import seal_config
from quantizer.models import QuantizedSpecification
from utils.logger import setup_logger

logger = setup_logger(__name__)


class HardwareConfigConverter:
    """硬件配置转换器类"""

    @staticmethod
    def build_config(qspec: QuantizedSpecification) -> HardwareConfig:
        """
        按量化规格填充硬件配置（不含缩放记录，尚未封印）

        Args:
            qspec: 量化后的网络规格

        Returns:
            未封印的 HardwareConfig
        """
        return HardwareConfig(
            dt=qspec.dt,
            C=qspec.C,
            H=qspec.H,
            O=qspec.O,
            S=qspec.S,
            w_in=np.array(qspec.w_in_q, dtype=np.int64),
            w_rec=np.array(qspec.w_rec_q, dtype=np.int64),
            w_out=np.array(qspec.w_out_q, dtype=np.int64),
            threshold_hid=np.array(qspec.threshold_hid_q, dtype=np.int64),
            threshold_out=np.array(qspec.threshold_out_q, dtype=np.int64),
            bias_hid=np.array(qspec.bias_hid_q, dtype=np.int64),
            bias_out=np.array(qspec.bias_out_q, dtype=np.int64),
            dash_mem_hid=np.array(qspec.dash_mem_hid, dtype=np.int64),
            dash_syn_hid=np.array(qspec.dash_syn_hid, dtype=np.int64),
            dash_mem_out=np.array(qspec.dash_mem_out, dtype=np.int64),
            dash_syn_out=np.array(qspec.dash_syn_out, dtype=np.int64),
            aliases=[[] if target is None else [int(target)] for target in qspec.aliases],
        )

    @staticmethod
    def config_from_specification(qspec: QuantizedSpecification) -> Tuple[HardwareConfig, bool, str]:
        """
        生成并校验硬件配置

        Returns:
            (config, is_valid, message)：校验失败时 message 逐行列出违例，成功时为空字符串
        """
        config = HardwareConfigConverter.build_config(qspec)
        report = seal_config(config)
        if report.ok:
            logger.info(f"✅ 硬件配置校验通过: C={config.C}, H={config.H}, O={config.O}")
            return config, True, ""

        message = report.format()
        logger.error(f"❌ 硬件配置校验失败，共 {len(report.violations)} 项:\n{message}")
        return config, False, message


# 函数式接口
def config_from_specification(qspec: QuantizedSpecification) -> Tuple[HardwareConfig, bool, str]:
    """生成并校验硬件配置（函数式接口）"""
    return HardwareConfigConverter.config_from_specification(qspec)
