"""后训练量化：全局量化 / 按通道量化，以及时间常数到位移衰减参数的转换"""
from typing import List, Tuple

import numpy as np

from config.constants import (
    INT16_MAX,
    INT16_MIN,
    MAX_DASH,
    QUANTIZE_CHANNEL,
    QUANTIZE_GLOBAL,
    THRESHOLD_MAX,
    THRESHOLD_MIN,
    WEIGHT_Q_MAX,
)
from mapper.specification import FloatSpecification
from quantizer.models import QuantizedSpecification, ScaleOverflow
from utils.exceptions import DomainError
from utils.helpers import max_abs, round_half_away_from_zero
from utils.logger import setup_logger

logger = setup_logger(__name__)


def tau_to_dash(tau, dt: float):
    """
    时间常数转换为位移衰减参数 dash = round(log2(tau / dt))，钳位到 [0, 15]

    标量输入返回 int，数组输入返回 int64 数组。

    Raises:
        DomainError: tau 或 dt 非正
    """
    if not dt > 0:
        raise DomainError(f"dt 必须为正，实际: {dt}")
    arr = np.asarray(tau, dtype=np.float64)
    if np.any(~(arr > 0)):
        raise DomainError("时间常数 tau 必须严格为正")

    raw = round_half_away_from_zero(np.log2(arr / dt))
    if np.any(raw > MAX_DASH):
        logger.warning(f"⚠️ 部分时间常数超过 {2 ** MAX_DASH}·dt，dash 钳位到 {MAX_DASH}")
    dash = np.clip(raw, 0, MAX_DASH)
    if dash.ndim == 0:
        return int(dash)
    return dash


def _scale_for(max_value: float) -> float:
    return WEIGHT_Q_MAX / max_value if max_value > 0 else 1.0


def _quantize_weights(scaled: np.ndarray) -> np.ndarray:
    return np.clip(round_half_away_from_zero(scaled), -WEIGHT_Q_MAX, WEIGHT_Q_MAX)


def _quantize_neuron_params(
    threshold: np.ndarray,
    bias: np.ndarray,
    scale: np.ndarray,
    population: str,
    overflows: List[ScaleOverflow],
) -> Tuple[np.ndarray, np.ndarray]:
    """阈值与偏置按神经元缩放后取整、钳位（阈值下限为 1），越界项记录为 ScaleOverflow"""
    scaled_threshold = threshold * scale
    scaled_bias = bias * scale
    threshold_q = np.clip(round_half_away_from_zero(scaled_threshold), THRESHOLD_MIN, THRESHOLD_MAX)
    bias_q = np.clip(round_half_away_from_zero(scaled_bias), INT16_MIN, INT16_MAX)

    for idx in np.flatnonzero(scaled_threshold > THRESHOLD_MAX):
        overflows.append(ScaleOverflow(population, int(idx), "threshold", float(scaled_threshold[idx]), int(threshold_q[idx])))
    for idx in np.flatnonzero((scaled_bias > INT16_MAX) | (scaled_bias < INT16_MIN)):
        overflows.append(ScaleOverflow(population, int(idx), "bias", float(scaled_bias[idx]), int(bias_q[idx])))
    return threshold_q, bias_q


def _dash_fields(spec: FloatSpecification) -> dict:
    return {
        "dash_mem_hid": tau_to_dash(spec.tau_mem_hid, spec.dt),
        "dash_syn_hid": tau_to_dash(spec.tau_syn_hid, spec.dt),
        "dash_mem_out": tau_to_dash(spec.tau_mem_out, spec.dt),
        "dash_syn_out": tau_to_dash(spec.tau_syn_out, spec.dt),
    }


def _build(
    spec: FloatSpecification,
    s_hidden: np.ndarray,
    s_out: np.ndarray,
    scales: dict,
) -> QuantizedSpecification:
    """按给定的 (H,) / (O,) 缩放因子生成整数规格"""
    overflows: List[ScaleOverflow] = []
    threshold_hid_q, bias_hid_q = _quantize_neuron_params(
        spec.threshold_hid, spec.bias_hid, s_hidden, "hidden", overflows
    )
    threshold_out_q, bias_out_q = _quantize_neuron_params(
        spec.threshold_out, spec.bias_out, s_out, "output", overflows
    )
    for overflow in overflows:
        logger.warning(
            f"⚠️ ScaleOverflow: {overflow.population}[{overflow.index}] {overflow.parameter} "
            f"缩放后 {overflow.scaled:.1f}，已钳位为 {overflow.clamped}"
        )

    return QuantizedSpecification(
        dt=spec.dt,
        C=spec.C,
        H=spec.H,
        O=spec.O,
        S=spec.S,
        w_in_q=_quantize_weights(spec.w_in * s_hidden[None, :, None]),
        w_rec_q=_quantize_weights(spec.w_rec * s_hidden[None, :, None]),
        w_out_q=_quantize_weights(spec.w_out * s_out[None, :]),
        threshold_hid_q=threshold_hid_q,
        threshold_out_q=threshold_out_q,
        bias_hid_q=bias_hid_q,
        bias_out_q=bias_out_q,
        aliases=list(spec.aliases),
        scales=scales,
        overflows=overflows,
        **_dash_fields(spec),
    )


def quantize_global(spec: FloatSpecification) -> QuantizedSpecification:
    """
    全局量化：输入权重与隐藏层循环权重作为一组共享 s_hidden，输出权重单独一组 s_out

    隐藏层阈值/偏置乘以 s_hidden，输出层乘以 s_out。
    """
    spec.check()
    s_hidden = _scale_for(max_abs(spec.w_in, spec.w_rec))
    s_out = _scale_for(max_abs(spec.w_out))
    qspec = _build(
        spec,
        np.full(spec.H, s_hidden),
        np.full(spec.O, s_out),
        {"method": QUANTIZE_GLOBAL, "s_hidden": s_hidden, "s_out": s_out},
    )
    logger.info(f"✅ 全局量化完成: s_hidden={s_hidden:.6g}, s_out={s_out:.6g}")
    return qspec


def quantize_channel(spec: FloatSpecification) -> QuantizedSpecification:
    """
    按通道量化：每个目标神经元的全部输入权重（w_in、w_rec、两个突触通道）共享一个缩放因子

    输出神经元使用各自 w_out 列的最大值。
    """
    spec.check()
    s_hidden = np.ones(spec.H)
    for n in range(spec.H):
        s_hidden[n] = _scale_for(max_abs(spec.w_in[:, n, :], spec.w_rec[:, n, :]))
    s_out = np.ones(spec.O)
    for o in range(spec.O):
        s_out[o] = _scale_for(max_abs(spec.w_out[:, o]))

    qspec = _build(
        spec,
        s_hidden,
        s_out,
        {"method": QUANTIZE_CHANNEL, "s_hidden": s_hidden.tolist(), "s_out": s_out.tolist()},
    )
    logger.info(f"✅ 按通道量化完成: {spec.H} 个隐藏神经元, {spec.O} 个输出神经元")
    return qspec


def quantize(spec: FloatSpecification, method: str = QUANTIZE_GLOBAL) -> QuantizedSpecification:
    """按方法名分派量化"""
    if method == QUANTIZE_GLOBAL:
        return quantize_global(spec)
    if method == QUANTIZE_CHANNEL:
        return quantize_channel(spec)
    raise DomainError(f"未知量化方法: {method}")
