"""浮点参考仿真器：与整数仿真相同的步骤结构，衰减系数 α = 1 - 2^(-dash)，无下限、无饱和"""
from typing import Tuple

import numpy as np

from config.constants import MAX_HIDDEN_SPIKES, MAX_INPUT_SPIKES, MAX_OUTPUT_SPIKES
from mapper.specification import FloatSpecification
from quantizer.quantize_methods import tau_to_dash
from simulator.recording import FloatRecording, InputRaster
from utils.exceptions import ShapeError
from utils.logger import setup_logger

logger = setup_logger(__name__)


def decay_factor(tau, dt: float) -> np.ndarray:
    """由时间常数得到与硬件 dash 一致的衰减系数"""
    return 1.0 - 2.0 ** (-np.asarray(tau_to_dash(tau, dt), dtype=np.float64))


def _fire(v_mem: np.ndarray, threshold: np.ndarray, clamp: int) -> Tuple[np.ndarray, np.ndarray]:
    spikes = np.where(v_mem >= threshold, np.minimum(clamp, np.floor(v_mem / threshold)), 0.0)
    return v_mem - spikes * threshold, spikes.astype(np.int64)


def evolve_float(spec: FloatSpecification, raster, record: bool = True) -> FloatRecording:
    """
    浮点仿真映射后的（量化前）网络

    Raises:
        ShapeError: 栅格通道数与规格 C 不一致
    """
    spec.check()
    if not isinstance(raster, InputRaster):
        raster = InputRaster(raster)
    if raster.channels != spec.C:
        raise ShapeError(f"输入栅格通道数 {raster.channels} 与规格 C={spec.C} 不一致")

    alpha_mem_hid = decay_factor(spec.tau_mem_hid, spec.dt)
    alpha_syn_hid = decay_factor(spec.tau_syn_hid, spec.dt)
    alpha_mem_out = decay_factor(spec.tau_mem_out, spec.dt)
    alpha_syn_out = decay_factor(spec.tau_syn_out, spec.dt)
    pairs = [(src, tgt) for src, tgt in enumerate(spec.aliases) if tgt is not None]
    alias_sources = np.array([p[0] for p in pairs], dtype=np.int64)
    alias_targets = np.array([p[1] for p in pairs], dtype=np.int64)

    T, H, O, S = raster.steps, spec.H, spec.O, spec.S
    spikes_out = np.zeros((T, O), dtype=np.int64)
    if record:
        v_mem_hid_rec = np.zeros((T, H))
        i_syn_hid_rec = np.zeros((T, H, S))
        spikes_hid_rec = np.zeros((T, H), dtype=np.int64)
        v_mem_out_rec = np.zeros((T, O))
        i_syn_out_rec = np.zeros((T, O))

    v_mem_hid = np.zeros(H)
    i_syn_hid = np.zeros((H, S))
    v_mem_out = np.zeros(O)
    i_syn_out = np.zeros(O)
    routed = np.zeros(H, dtype=np.int64)

    for t in range(T):
        inputs = np.minimum(raster.counts[t], MAX_INPUT_SPIKES).astype(np.float64)
        syn_input = np.einsum("c,chs->hs", inputs, spec.w_in) + np.einsum("j,jhs->hs", routed.astype(np.float64), spec.w_rec)
        i_syn_hid = alpha_syn_hid * i_syn_hid + syn_input
        v_mem_hid = alpha_mem_hid * v_mem_hid + i_syn_hid.sum(axis=1) + spec.bias_hid
        v_mem_hid, spikes = _fire(v_mem_hid, spec.threshold_hid, MAX_HIDDEN_SPIKES)

        routed = spikes.copy()
        if alias_sources.size:
            np.add.at(routed, alias_targets, spikes[alias_sources])
            routed = np.minimum(routed, MAX_HIDDEN_SPIKES)

        i_syn_out = alpha_syn_out * i_syn_out + routed.astype(np.float64) @ spec.w_out
        v_mem_out = alpha_mem_out * v_mem_out + i_syn_out + spec.bias_out
        v_mem_out, spikes_out[t] = _fire(v_mem_out, spec.threshold_out, MAX_OUTPUT_SPIKES)

        if record:
            v_mem_hid_rec[t] = v_mem_hid
            i_syn_hid_rec[t] = i_syn_hid
            spikes_hid_rec[t] = routed
            v_mem_out_rec[t] = v_mem_out
            i_syn_out_rec[t] = i_syn_out

    logger.debug(f"浮点仿真完成: {T} 步, 输出脉冲总数 {int(spikes_out.sum())}")
    if not record:
        return FloatRecording(spikes_out=spikes_out)
    return FloatRecording(
        spikes_out=spikes_out,
        v_mem_hid=v_mem_hid_rec,
        i_syn_hid=i_syn_hid_rec,
        spikes_hid=spikes_hid_rec,
        v_mem_out=v_mem_out_rec,
        i_syn_out=i_syn_out_rec,
    )
