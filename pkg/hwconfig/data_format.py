"""硬件配置文件格式（.xcfg.json）

规范 JSON：键按字母排序、紧凑分隔符、UTF-8、末尾换行。字段集合：

    dt                  十进制秒字符串，例如 "0.001"
    C, H, O, S          输入通道数、隐藏神经元数、输出神经元数、隐藏突触通道数
    w_in                (C × H × S) 整数
    w_rec               (H × H × S) 整数
    w_out               (H × O) 整数
    threshold_hid/out   (H,) / (O,) 整数
    bias_hid/out        (H,) / (O,) 整数
    dash_mem_hid        (H,)      dash_syn_hid (H × S)
    dash_mem_out        (O,)      dash_syn_out (O,)
    aliases             每个隐藏神经元一个列表（0 或 1 个目标下标）
    output_synapses     输出神经元突触数（1）
    input_spike_clamp / hidden_spike_clamp / output_spike_clamp   每步脉冲钳位
    v_mem_hid_init, i_syn_hid_init, v_mem_out_init, i_syn_out_init   可选初始状态

封印标志不写入文件，读取时重新校验计算。
"""
import json
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Dict, Optional, Union

import numpy as np

from hwconfig.models import ARRAY_FIELDS, CLAMP_FIELDS, STATE_FIELDS, HardwareConfig
from hwconfig.validator import seal_config
from utils.exceptions import ParseError
from utils.helpers import canonical_dumps, write_text
from utils.logger import setup_logger

logger = setup_logger(__name__)


class HardwareConfigFormatter:
    """硬件配置序列化器类"""

    @staticmethod
    def serialize(config: HardwareConfig) -> bytes:
        """序列化为规范 JSON 字节"""
        return canonical_dumps(config.to_dict()).encode("utf-8")

    @staticmethod
    def _require(data: Dict, key: str):
        if key not in data:
            raise ParseError(f"配置缺少字段 {key}", location=key)
        return data[key]

    @staticmethod
    def _int(data: Dict, key: str, minimum: Optional[int] = None) -> int:
        value = HardwareConfigFormatter._require(data, key)
        if isinstance(value, bool) or not isinstance(value, int):
            raise ParseError(f"字段 {key} 必须是整数，实际: {value!r}", location=key)
        if minimum is not None and value < minimum:
            raise ParseError(f"字段 {key} 不能小于 {minimum}，实际: {value}", location=key)
        return value

    @staticmethod
    def _array(data: Dict, key: str, shape: tuple) -> np.ndarray:
        raw = HardwareConfigFormatter._require(data, key)
        try:
            arr = np.array(raw, dtype=np.int64)
        except (TypeError, ValueError, OverflowError) as e:
            raise ParseError(f"字段 {key} 不是整数数组: {e}", location=key)
        if arr.shape != shape:
            # 空的嵌套列表丢失尾部维度，只在声明的形状同样为空时补回
            if arr.size == 0 and int(np.prod(shape)) == 0:
                return arr.reshape(shape)
            raise ParseError(f"字段 {key} 形状应为 {shape}，实际: {arr.shape}", location=key)
        return arr

    @staticmethod
    def deserialize(payload: bytes) -> HardwareConfig:
        """
        从 JSON 字节解析配置，封印标志重新计算（不信任输入）

        Raises:
            ParseError: JSON 截断/语法错误、字段缺失或类型错误，location 指出位置
        """
        try:
            text = payload.decode("utf-8") if isinstance(payload, (bytes, bytearray)) else payload
            data = json.loads(text)
        except UnicodeDecodeError as e:
            raise ParseError(f"配置文件不是 UTF-8: {e}", location=f"byte {e.start}")
        except json.JSONDecodeError as e:
            raise ParseError(f"配置 JSON 解析失败: {e.msg}", location=f"line {e.lineno}, column {e.colno}")
        if not isinstance(data, dict):
            raise ParseError("配置顶层必须是 JSON 对象", location="$")

        dt_raw = HardwareConfigFormatter._require(data, "dt")
        try:
            dt = float(Decimal(str(dt_raw)))
        except (InvalidOperation, ValueError):
            raise ParseError(f"dt 不是十进制数: {dt_raw!r}", location="dt")

        dims = {key: HardwareConfigFormatter._int(data, key, minimum=0) for key in ("C", "H", "O", "S")}
        kwargs = {"dt": dt, **dims}
        for name, shape in ARRAY_FIELDS.items():
            kwargs[name] = HardwareConfigFormatter._array(data, name, tuple(dims[d] for d in shape))
        for name, shape in STATE_FIELDS.items():
            if name in data:
                kwargs[name] = HardwareConfigFormatter._array(data, name, tuple(dims[d] for d in shape))
        for name in CLAMP_FIELDS:
            if name in data:
                kwargs[name] = HardwareConfigFormatter._int(data, name)
        if "output_synapses" in data:
            kwargs["output_synapses"] = HardwareConfigFormatter._int(data, "output_synapses")

        aliases = HardwareConfigFormatter._require(data, "aliases")
        if not isinstance(aliases, list) or not all(isinstance(entry, list) for entry in aliases):
            raise ParseError("aliases 必须是列表的列表", location="aliases")
        if not all(isinstance(t, int) and not isinstance(t, bool) for entry in aliases for t in entry):
            raise ParseError("aliases 目标必须是整数", location="aliases")
        kwargs["aliases"] = [list(entry) for entry in aliases]

        config = HardwareConfig(**kwargs)
        report = seal_config(config)
        if not report.ok:
            logger.warning(f"⚠️ 读取的配置未通过校验（{len(report.violations)} 项），保持未封印")
        return config


# 函数式接口
def serialize_config(config: HardwareConfig) -> bytes:
    """序列化硬件配置（函数式接口）"""
    return HardwareConfigFormatter.serialize(config)


def deserialize_config(payload: bytes) -> HardwareConfig:
    """反序列化硬件配置（函数式接口）"""
    return HardwareConfigFormatter.deserialize(payload)


def save_config(config: HardwareConfig, path: Union[str, Path]) -> Path:
    path = write_text(path, serialize_config(config).decode("utf-8"))
    logger.info(f"✅ 硬件配置已写入 {path}")
    return path


def load_config(path: Union[str, Path]) -> HardwareConfig:
    return deserialize_config(Path(path).read_bytes())
