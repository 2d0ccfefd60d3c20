"""量化后的网络规格（QuantizedSpecification）"""
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Union

import numpy as np

from utils.exceptions import ParseError
from utils.helpers import canonical_dumps, write_text
from utils.logger import setup_logger

logger = setup_logger(__name__)

INT_FIELDS = {
    "w_in_q": ("C", "H", "S"),
    "w_rec_q": ("H", "H", "S"),
    "w_out_q": ("H", "O"),
    "threshold_hid_q": ("H",),
    "threshold_out_q": ("O",),
    "bias_hid_q": ("H",),
    "bias_out_q": ("O",),
    "dash_mem_hid": ("H",),
    "dash_syn_hid": ("H", "S"),
    "dash_mem_out": ("O",),
    "dash_syn_out": ("O",),
}


@dataclass
class ScaleOverflow:
    """缩放后超出 16 位范围的参数（已钳位，仅报告）"""
    population: str  # hidden / output
    index: int
    parameter: str  # threshold / bias
    scaled: float
    clamped: int

    def to_dict(self) -> Dict:
        return {
            "population": self.population,
            "index": self.index,
            "parameter": self.parameter,
            "scaled": float(self.scaled),
            "clamped": int(self.clamped),
        }


@dataclass
class QuantizedSpecification:
    """整数网络参数 + 量化缩放记录"""
    dt: float
    C: int
    H: int
    O: int
    S: int
    w_in_q: np.ndarray
    w_rec_q: np.ndarray
    w_out_q: np.ndarray
    threshold_hid_q: np.ndarray
    threshold_out_q: np.ndarray
    bias_hid_q: np.ndarray
    bias_out_q: np.ndarray
    dash_mem_hid: np.ndarray
    dash_syn_hid: np.ndarray
    dash_mem_out: np.ndarray
    dash_syn_out: np.ndarray
    aliases: List[Optional[int]] = field(default_factory=list)
    # {"method": "global"|"channel", "s_hidden": 标量或(H,)列表, "s_out": 标量或(O,)列表}
    scales: Dict = field(default_factory=dict)
    overflows: List[ScaleOverflow] = field(default_factory=list)

    def hidden_scale(self) -> np.ndarray:
        """隐藏层缩放因子，广播为 (H,)"""
        return np.broadcast_to(np.asarray(self.scales.get("s_hidden", 1.0), dtype=np.float64), (self.H,))

    def output_scale(self) -> np.ndarray:
        """输出层缩放因子，广播为 (O,)"""
        return np.broadcast_to(np.asarray(self.scales.get("s_out", 1.0), dtype=np.float64), (self.O,))

    def to_dict(self) -> Dict:
        data = {"dt": float(self.dt), "C": self.C, "H": self.H, "O": self.O, "S": self.S}
        for name in INT_FIELDS:
            data[name] = np.asarray(getattr(self, name), dtype=np.int64).tolist()
        data["aliases"] = [None if a is None else int(a) for a in self.aliases]
        data["scales"] = self.scales
        data["overflows"] = [o.to_dict() for o in self.overflows]
        return data

    @classmethod
    def from_dict(cls, data: Dict) -> "QuantizedSpecification":
        try:
            kwargs = {
                "dt": float(data["dt"]),
                "C": int(data["C"]),
                "H": int(data["H"]),
                "O": int(data["O"]),
                "S": int(data["S"]),
                "aliases": [None if a is None else int(a) for a in data["aliases"]],
                "scales": dict(data.get("scales", {})),
                "overflows": [ScaleOverflow(**o) for o in data.get("overflows", [])],
            }
        except KeyError as e:
            raise ParseError(f"量化规格缺少字段 {e.args[0]}", location=str(e.args[0]))
        except (TypeError, ValueError) as e:
            raise ParseError(f"量化规格字段类型错误: {e}", location="header")

        dims = {"C": kwargs["C"], "H": kwargs["H"], "O": kwargs["O"], "S": kwargs["S"]}
        for name, shape in INT_FIELDS.items():
            if name not in data:
                raise ParseError(f"量化规格缺少字段 {name}", location=name)
            arr = np.array(data[name], dtype=np.int64)
            expected = tuple(dims[d] for d in shape)
            if arr.size == 0:
                arr = arr.reshape(expected)
            if arr.shape != expected:
                raise ParseError(f"字段 {name} 形状应为 {expected}，实际 {arr.shape}", location=name)
            kwargs[name] = arr
        return cls(**kwargs)


def save_quantized(qspec: QuantizedSpecification, path: Union[str, Path]) -> Path:
    path = write_text(path, canonical_dumps(qspec.to_dict()))
    logger.info(f"✅ 量化规格已写入 {path}")
    return path


def load_quantized(path: Union[str, Path]) -> QuantizedSpecification:
    """
    读取量化规格 JSON

    Raises:
        ParseError: JSON 语法错误或字段缺失
    """
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"量化规格 JSON 解析失败: {e.msg}", location=f"{path}:{e.lineno}:{e.colno}")
    return QuantizedSpecification.from_dict(data)
