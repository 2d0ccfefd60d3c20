"""整数仿真器（位精确的硬件黄金模型）

每个时间步的顺序固定：
    1. 隐藏层突触电流: i_syn ← sat16(decay(i_syn) + w_in·输入 + w_rec·上一步路由脉冲)
    2. 隐藏层膜电位:   v_mem ← sat16(decay(v_mem) + Σ_s i_syn + bias)
    3. 发放:           spikes = min(31, v_mem // threshold)（v_mem ≥ threshold 时），减去 spikes·threshold
    4. 别名路由:       routed = spikes，再把别名源的脉冲加到目标上，钳位 31
    5. 输出层:         同样的积分/衰减（w_out·routed），脉冲钳位 1，减去一个阈值

routed 既驱动本步输出层，也作为下一步的循环输入（一步延迟）。
"""
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from hwconfig.models import HardwareConfig
from simulator.recording import InputRaster, SimulationRecording
from utils.exceptions import ShapeError, UnsealedConfig
from utils.helpers import sat16
from utils.logger import setup_logger

logger = setup_logger(__name__)


def bitshift_decay(v, dash):
    """
    位移衰减：d = |v| >> dash，d 为 0 且 v ≠ 0 时取 1（线性衰减下限），结果 v - sign(v)·d

    标量输入返回 int，数组输入返回 int64 数组（逐元素）。
    """
    v = np.asarray(v, dtype=np.int64)
    dash = np.asarray(dash, dtype=np.int64)
    d = np.abs(v) >> dash
    d = np.where((d == 0) & (v != 0), 1, d)
    result = v - np.sign(v) * d
    if result.ndim == 0:
        return int(result)
    return result


@dataclass
class NeuronStates:
    """一次仿真的全部可变状态"""
    v_mem_hid: np.ndarray  # (H,)
    i_syn_hid: np.ndarray  # (H, S)
    v_mem_out: np.ndarray  # (O,)
    i_syn_out: np.ndarray  # (O,)

    @classmethod
    def initial(cls, config: HardwareConfig) -> "NeuronStates":
        """配置带初始状态时使用之，否则全零"""
        def _init(value, shape):
            if value is None:
                return np.zeros(shape, dtype=np.int64)
            return np.array(value, dtype=np.int64).reshape(shape)

        return cls(
            v_mem_hid=_init(config.v_mem_hid_init, (config.H,)),
            i_syn_hid=_init(config.i_syn_hid_init, (config.H, config.S)),
            v_mem_out=_init(config.v_mem_out_init, (config.O,)),
            i_syn_out=_init(config.i_syn_out_init, (config.O,)),
        )


def _fire(v_mem: np.ndarray, threshold: np.ndarray, clamp: int) -> Tuple[np.ndarray, np.ndarray]:
    """多脉冲减法复位"""
    spikes = np.where(v_mem >= threshold, np.minimum(clamp, v_mem // threshold), 0)
    return v_mem - spikes * threshold, spikes


class XyloSim:
    """整数仿真器：持有已封印配置的只读参数"""

    def __init__(self, config: HardwareConfig):
        if not config.sealed:
            raise UnsealedConfig("硬件配置未通过校验（未封印），拒绝仿真")
        self.config = config
        self.w_in = np.asarray(config.w_in, dtype=np.int64)
        self.w_rec = np.asarray(config.w_rec, dtype=np.int64)
        self.w_out = np.asarray(config.w_out, dtype=np.int64)
        self.threshold_hid = np.asarray(config.threshold_hid, dtype=np.int64)
        self.threshold_out = np.asarray(config.threshold_out, dtype=np.int64)
        self.bias_hid = np.asarray(config.bias_hid, dtype=np.int64)
        self.bias_out = np.asarray(config.bias_out, dtype=np.int64)
        self.dash_mem_hid = np.asarray(config.dash_mem_hid, dtype=np.int64)
        self.dash_syn_hid = np.asarray(config.dash_syn_hid, dtype=np.int64)
        self.dash_mem_out = np.asarray(config.dash_mem_out, dtype=np.int64)
        self.dash_syn_out = np.asarray(config.dash_syn_out, dtype=np.int64)
        pairs = [(src, tgt) for src, tgt in enumerate(config.alias_targets()) if tgt is not None]
        self.alias_sources = np.array([p[0] for p in pairs], dtype=np.int64)
        self.alias_targets = np.array([p[1] for p in pairs], dtype=np.int64)

    def step(
        self,
        states: NeuronStates,
        inputs: np.ndarray,
        hidden_prev: np.ndarray,
    ) -> Tuple[NeuronStates, np.ndarray, np.ndarray]:
        """
        单步更新（不修改传入的 states）

        Returns:
            (新状态, 隐藏层路由后脉冲 (H,), 输出脉冲 (O,))
        """
        config = self.config
        inputs = np.minimum(np.asarray(inputs, dtype=np.int64), config.input_spike_clamp)
        hidden_prev = np.asarray(hidden_prev, dtype=np.int64)

        syn_input = np.einsum("c,chs->hs", inputs, self.w_in) + np.einsum("j,jhs->hs", hidden_prev, self.w_rec)
        i_syn_hid = sat16(bitshift_decay(states.i_syn_hid, self.dash_syn_hid) + syn_input)
        v_mem_hid = sat16(bitshift_decay(states.v_mem_hid, self.dash_mem_hid) + i_syn_hid.sum(axis=1) + self.bias_hid)
        v_mem_hid, spikes = _fire(v_mem_hid, self.threshold_hid, config.hidden_spike_clamp)

        routed = spikes.copy()
        if self.alias_sources.size:
            np.add.at(routed, self.alias_targets, spikes[self.alias_sources])
            routed = np.minimum(routed, config.hidden_spike_clamp)

        i_syn_out = sat16(bitshift_decay(states.i_syn_out, self.dash_syn_out) + routed @ self.w_out)
        v_mem_out = sat16(bitshift_decay(states.v_mem_out, self.dash_mem_out) + i_syn_out + self.bias_out)
        v_mem_out, out_spikes = _fire(v_mem_out, self.threshold_out, config.output_spike_clamp)

        new_states = NeuronStates(v_mem_hid=v_mem_hid, i_syn_hid=i_syn_hid, v_mem_out=v_mem_out, i_syn_out=i_syn_out)
        return new_states, routed, out_spikes

    def evolve(self, raster, record: bool = True) -> SimulationRecording:
        """
        从初始状态逐步仿真整个输入栅格

        Args:
            raster: InputRaster 或 (steps × C) 整数数组
            record: False 时只保留输出脉冲

        Raises:
            ShapeError: 栅格通道数与配置 C 不一致
        """
        if not isinstance(raster, InputRaster):
            raster = InputRaster(raster)
        config = self.config
        if raster.channels != config.C:
            raise ShapeError(f"输入栅格通道数 {raster.channels} 与配置 C={config.C} 不一致")

        T, H, O, S = raster.steps, config.H, config.O, config.S
        spikes_out = np.zeros((T, O), dtype=np.int64)
        if record:
            v_mem_hid = np.zeros((T, H), dtype=np.int64)
            i_syn_hid = np.zeros((T, H, S), dtype=np.int64)
            spikes_hid = np.zeros((T, H), dtype=np.int64)
            v_mem_out = np.zeros((T, O), dtype=np.int64)
            i_syn_out = np.zeros((T, O), dtype=np.int64)

        states = NeuronStates.initial(config)
        routed = np.zeros(H, dtype=np.int64)
        for t in range(T):
            states, routed, spikes_out[t] = self.step(states, raster.counts[t], routed)
            if record:
                v_mem_hid[t] = states.v_mem_hid
                i_syn_hid[t] = states.i_syn_hid
                spikes_hid[t] = routed
                v_mem_out[t] = states.v_mem_out
                i_syn_out[t] = states.i_syn_out

        logger.debug(f"整数仿真完成: {T} 步, 输出脉冲总数 {int(spikes_out.sum())}")
        if not record:
            return SimulationRecording(spikes_out=spikes_out)
        return SimulationRecording(
            spikes_out=spikes_out,
            v_mem_hid=v_mem_hid,
            i_syn_hid=i_syn_hid,
            spikes_hid=spikes_hid,
            v_mem_out=v_mem_out,
            i_syn_out=i_syn_out,
        )


# 函数式接口
def step(
    config: HardwareConfig,
    states: Optional[NeuronStates],
    inputs: np.ndarray,
    hidden_prev: Optional[np.ndarray] = None,
) -> Tuple[NeuronStates, np.ndarray, np.ndarray]:
    """单步更新（函数式接口）；states 为 None 时从初始状态开始"""
    sim = XyloSim(config)
    if states is None:
        states = NeuronStates.initial(config)
    if hidden_prev is None:
        hidden_prev = np.zeros(config.H, dtype=np.int64)
    return sim.step(states, inputs, hidden_prev)


def evolve(config: HardwareConfig, raster, record: bool = True) -> SimulationRecording:
    """整数仿真（函数式接口）"""
    return XyloSim(config).evolve(raster, record=record)
