"""映射后的浮点网络规格（FloatSpecification）及其规范 JSON 序列化"""
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Union

import numpy as np

from config.constants import MAX_HIDDEN_SYNAPSES
from utils.exceptions import DomainError, ParseError, ShapeError
from utils.helpers import canonical_dumps, write_text
from utils.logger import setup_logger

logger = setup_logger(__name__)

# 浮点数组字段及其期望形状（用维度名表示）
ARRAY_FIELDS = {
    "w_in": ("C", "H", "S"),
    "w_rec": ("H", "H", "S"),
    "w_out": ("H", "O"),
    "tau_mem_hid": ("H",),
    "tau_syn_hid": ("H", "S"),
    "threshold_hid": ("H",),
    "bias_hid": ("H",),
    "tau_mem_out": ("O",),
    "tau_syn_out": ("O",),
    "threshold_out": ("O",),
    "bias_out": ("O",),
}


@dataclass
class FloatSpecification:
    """映射后、量化前的网络规格（稠密矩阵 + 每神经元参数 + 别名）"""
    dt: float
    C: int
    H: int
    O: int
    S: int
    w_in: np.ndarray
    w_rec: np.ndarray
    w_out: np.ndarray
    tau_mem_hid: np.ndarray
    tau_syn_hid: np.ndarray
    threshold_hid: np.ndarray
    bias_hid: np.ndarray
    tau_mem_out: np.ndarray
    tau_syn_out: np.ndarray
    threshold_out: np.ndarray
    bias_out: np.ndarray
    aliases: List[Optional[int]] = field(default_factory=list)

    def expected_shape(self, name: str) -> tuple:
        dims = {"C": self.C, "H": self.H, "O": self.O, "S": self.S}
        return tuple(dims[d] for d in ARRAY_FIELDS[name])

    def check(self):
        """
        检查规格是否有效

        Raises:
            ShapeError: 数组形状与 C/H/O/S 不一致
            DomainError: dt / 时间常数 / 阈值非正，或别名目标越界
        """
        if not self.dt > 0:
            raise DomainError(f"dt 必须为正，实际: {self.dt}")
        if self.S not in (1, MAX_HIDDEN_SYNAPSES):
            raise ShapeError(f"突触通道数 S 必须为 1 或 2，实际: {self.S}")
        for name in ARRAY_FIELDS:
            actual = np.shape(getattr(self, name))
            expected = self.expected_shape(name)
            if actual != expected:
                raise ShapeError(f"字段 {name} 形状应为 {expected}，实际: {actual}")
        for name in ("tau_mem_hid", "tau_syn_hid", "tau_mem_out", "tau_syn_out"):
            if np.any(~(getattr(self, name) > 0)):
                raise DomainError(f"时间常数 {name} 必须严格为正")
        for name in ("threshold_hid", "threshold_out"):
            if np.any(~(getattr(self, name) > 0)):
                raise DomainError(f"阈值 {name} 必须严格为正")
        if len(self.aliases) != self.H:
            raise ShapeError(f"aliases 长度应为 H={self.H}，实际: {len(self.aliases)}")
        for idx, target in enumerate(self.aliases):
            if target is not None and not 0 <= target < self.H:
                raise DomainError(f"隐藏神经元 {idx} 的别名目标 {target} 越界")

    def to_dict(self) -> Dict:
        data = {"dt": float(self.dt), "C": self.C, "H": self.H, "O": self.O, "S": self.S}
        for name in ARRAY_FIELDS:
            data[name] = np.asarray(getattr(self, name), dtype=np.float64).tolist()
        data["aliases"] = [None if a is None else int(a) for a in self.aliases]
        return data

    @classmethod
    def from_dict(cls, data: Dict) -> "FloatSpecification":
        try:
            kwargs = {
                "dt": float(data["dt"]),
                "C": int(data["C"]),
                "H": int(data["H"]),
                "O": int(data["O"]),
                "S": int(data["S"]),
                "aliases": [None if a is None else int(a) for a in data["aliases"]],
            }
        except KeyError as e:
            raise ParseError(f"规格缺少字段 {e.args[0]}", location=str(e.args[0]))
        except (TypeError, ValueError) as e:
            raise ParseError(f"规格字段类型错误: {e}", location="header")

        for name in ARRAY_FIELDS:
            if name not in data:
                raise ParseError(f"规格缺少字段 {name}", location=name)
            arr = np.array(data[name], dtype=np.float64)
            # 空维度的 JSON 列表无法还原形状，按声明维度补齐
            dims = {"C": kwargs["C"], "H": kwargs["H"], "O": kwargs["O"], "S": kwargs["S"]}
            expected = tuple(dims[d] for d in ARRAY_FIELDS[name])
            if arr.size == 0:
                arr = arr.reshape(expected)
            kwargs[name] = arr
        spec = cls(**kwargs)
        spec.check()
        return spec


def dumps_specification(spec: FloatSpecification) -> str:
    """规范 JSON 文本"""
    return canonical_dumps(spec.to_dict())


def save_specification(spec: FloatSpecification, path: Union[str, Path]) -> Path:
    path = write_text(path, dumps_specification(spec))
    logger.info(f"✅ 浮点规格已写入 {path}")
    return path


def load_specification(path: Union[str, Path]) -> FloatSpecification:
    """
    读取浮点规格 JSON

    Raises:
        ParseError: JSON 语法错误或字段缺失
    """
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"规格文件 JSON 解析失败: {e.msg}", location=f"{path}:{e.lineno}:{e.colno}")
    return FloatSpecification.from_dict(data)
