"""硬件配置对象（寄存器级视图）"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from config.constants import MAX_HIDDEN_SPIKES, MAX_INPUT_SPIKES, MAX_OUTPUT_SPIKES, MAX_OUTPUT_SYNAPSES
from utils.helpers import format_dt

# 整数数组字段及其维度
ARRAY_FIELDS = {
    "w_in": ("C", "H", "S"),
    "w_rec": ("H", "H", "S"),
    "w_out": ("H", "O"),
    "threshold_hid": ("H",),
    "threshold_out": ("O",),
    "bias_hid": ("H",),
    "bias_out": ("O",),
    "dash_mem_hid": ("H",),
    "dash_syn_hid": ("H", "S"),
    "dash_mem_out": ("O",),
    "dash_syn_out": ("O",),
}

# 可选的初始状态字段
STATE_FIELDS = {
    "v_mem_hid_init": ("H",),
    "i_syn_hid_init": ("H", "S"),
    "v_mem_out_init": ("O",),
    "i_syn_out_init": ("O",),
}

# 每步脉冲钳位寄存器
CLAMP_FIELDS = {
    "input_spike_clamp": MAX_INPUT_SPIKES,
    "hidden_spike_clamp": MAX_HIDDEN_SPIKES,
    "output_spike_clamp": MAX_OUTPUT_SPIKES,
}


@dataclass(eq=False)
class HardwareConfig:
    """经过校验可封印的硬件配置；sealed 只由校验成功设置"""
    dt: float
    C: int
    H: int
    O: int
    S: int
    w_in: np.ndarray
    w_rec: np.ndarray
    w_out: np.ndarray
    threshold_hid: np.ndarray
    threshold_out: np.ndarray
    bias_hid: np.ndarray
    bias_out: np.ndarray
    dash_mem_hid: np.ndarray
    dash_syn_hid: np.ndarray
    dash_mem_out: np.ndarray
    dash_syn_out: np.ndarray
    # 每个隐藏神经元一个列表（0 或 1 个目标）
    aliases: List[List[int]] = field(default_factory=list)
    output_synapses: int = MAX_OUTPUT_SYNAPSES
    input_spike_clamp: int = MAX_INPUT_SPIKES
    hidden_spike_clamp: int = MAX_HIDDEN_SPIKES
    output_spike_clamp: int = MAX_OUTPUT_SPIKES
    v_mem_hid_init: Optional[np.ndarray] = None
    i_syn_hid_init: Optional[np.ndarray] = None
    v_mem_out_init: Optional[np.ndarray] = None
    i_syn_out_init: Optional[np.ndarray] = None
    sealed: bool = False

    def expected_shape(self, name: str) -> tuple:
        dims = {"C": self.C, "H": self.H, "O": self.O, "S": self.S}
        shape = ARRAY_FIELDS.get(name) or STATE_FIELDS[name]
        return tuple(dims[d] for d in shape)

    def alias_targets(self) -> List[Optional[int]]:
        """每个隐藏神经元的别名目标（无则 None）"""
        targets: List[Optional[int]] = [None] * self.H
        for idx, entry in enumerate(self.aliases[:self.H]):
            if entry:
                targets[idx] = int(entry[0])
        return targets

    def to_dict(self) -> Dict:
        """规范字典：整数数组为嵌套列表，dt 为十进制字符串"""
        data = {
            "dt": format_dt(self.dt),
            "C": int(self.C),
            "H": int(self.H),
            "O": int(self.O),
            "S": int(self.S),
            "aliases": [[int(t) for t in entry] for entry in self.aliases],
            "output_synapses": int(self.output_synapses),
        }
        for name in CLAMP_FIELDS:
            data[name] = int(getattr(self, name))
        for name in ARRAY_FIELDS:
            data[name] = np.asarray(getattr(self, name), dtype=np.int64).tolist()
        for name in STATE_FIELDS:
            value = getattr(self, name)
            if value is not None:
                data[name] = np.asarray(value, dtype=np.int64).tolist()
        return data

    def __eq__(self, other) -> bool:
        if not isinstance(other, HardwareConfig):
            return NotImplemented
        return self.sealed == other.sealed and self.to_dict() == other.to_dict()
