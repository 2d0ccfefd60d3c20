"""标量参考实现：逐神经元、逐突触的朴素循环，只用 Python 整数

与 xylo_sim 不共享任何计算函数，用于逐值核对整数仿真器。
"""
from typing import List

import numpy as np

from hwconfig.models import HardwareConfig
from simulator.recording import SimulationRecording
from utils.exceptions import ShapeError, UnsealedConfig

_LOW = -32768
_HIGH = 32767


def _saturate(x: int) -> int:
    if x > _HIGH:
        return _HIGH
    if x < _LOW:
        return _LOW
    return x


def _decay(v: int, dash: int) -> int:
    if v == 0:
        return 0
    magnitude = abs(v)
    step = magnitude >> dash
    if step == 0:
        step = 1
    return v - step if v > 0 else v + step


def _fire(v: int, threshold: int, clamp: int):
    if v < threshold:
        return v, 0
    count = v // threshold
    if count > clamp:
        count = clamp
    return v - count * threshold, count


def _initial(value, size: int) -> List[int]:
    if value is None:
        return [0] * size
    return [int(x) for x in np.asarray(value).ravel()]


def reference_evolve(config: HardwareConfig, counts) -> SimulationRecording:
    """
    参考仿真（始终记录全部状态）

    Args:
        config: 已封印的硬件配置
        counts: (steps × C) 输入计数
    """
    if not config.sealed:
        raise UnsealedConfig("硬件配置未封印")
    rows = [[int(x) for x in row] for row in np.asarray(counts)]
    C, H, O, S = int(config.C), int(config.H), int(config.O), int(config.S)
    if any(len(row) != C for row in rows):
        raise ShapeError("输入通道数与配置不一致")

    w_in = np.asarray(config.w_in).tolist()
    w_rec = np.asarray(config.w_rec).tolist()
    w_out = np.asarray(config.w_out).tolist()
    thr_h = [int(x) for x in config.threshold_hid]
    thr_o = [int(x) for x in config.threshold_out]
    bias_h = [int(x) for x in config.bias_hid]
    bias_o = [int(x) for x in config.bias_out]
    dm_h = [int(x) for x in config.dash_mem_hid]
    ds_h = np.asarray(config.dash_syn_hid).tolist()
    dm_o = [int(x) for x in config.dash_mem_out]
    ds_o = [int(x) for x in config.dash_syn_out]
    alias = [entry[0] if entry else None for entry in list(config.aliases)[:H]]
    in_clamp = int(config.input_spike_clamp)
    hid_clamp = int(config.hidden_spike_clamp)
    out_clamp = int(config.output_spike_clamp)

    v_h = _initial(config.v_mem_hid_init, H)
    flat = _initial(config.i_syn_hid_init, H * S)
    i_h = [[flat[i * S + s] for s in range(S)] for i in range(H)]
    v_o = _initial(config.v_mem_out_init, O)
    i_o = _initial(config.i_syn_out_init, O)
    prev = [0] * H

    rec_v_h, rec_i_h, rec_s_h, rec_v_o, rec_i_o, rec_s_o = [], [], [], [], [], []
    for row in rows:
        inp = [min(x, in_clamp) for x in row]

        raw = [0] * H
        for i in range(H):
            for s in range(S):
                acc = _decay(i_h[i][s], int(ds_h[i][s]))
                for c in range(C):
                    acc += int(w_in[c][i][s]) * inp[c]
                for j in range(H):
                    acc += int(w_rec[j][i][s]) * prev[j]
                i_h[i][s] = _saturate(acc)
            v = _decay(v_h[i], dm_h[i])
            for s in range(S):
                v += i_h[i][s]
            v = _saturate(v + bias_h[i])
            v_h[i], raw[i] = _fire(v, thr_h[i], hid_clamp)

        routed = list(raw)
        for i in range(H):
            target = alias[i]
            if target is not None:
                routed[target] = min(hid_clamp, routed[target] + raw[i])

        out = [0] * O
        for o in range(O):
            acc = _decay(i_o[o], ds_o[o])
            for j in range(H):
                acc += int(w_out[j][o]) * routed[j]
            i_o[o] = _saturate(acc)
            v = _saturate(_decay(v_o[o], dm_o[o]) + i_o[o] + bias_o[o])
            v_o[o], out[o] = _fire(v, thr_o[o], out_clamp)

        prev = routed
        rec_v_h.append(list(v_h))
        rec_i_h.append([list(ch) for ch in i_h])
        rec_s_h.append(list(routed))
        rec_v_o.append(list(v_o))
        rec_i_o.append(list(i_o))
        rec_s_o.append(out)

    T = len(rows)
    return SimulationRecording(
        spikes_out=np.array(rec_s_o, dtype=np.int64).reshape(T, O),
        v_mem_hid=np.array(rec_v_h, dtype=np.int64).reshape(T, H),
        i_syn_hid=np.array(rec_i_h, dtype=np.int64).reshape(T, H, S),
        spikes_hid=np.array(rec_s_h, dtype=np.int64).reshape(T, H),
        v_mem_out=np.array(rec_v_o, dtype=np.int64).reshape(T, O),
        i_syn_out=np.array(rec_i_o, dtype=np.int64).reshape(T, O),
    )
