"""仿真记录比较：整数 vs 参考实现、浮点 vs 整数（反缩放后）"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from quantizer.models import QuantizedSpecification
from simulator.recording import FloatRecording, SimulationRecording
from utils.exceptions import ShapeError
from utils.logger import setup_logger

logger = setup_logger(__name__)

STATE_TRACES = ("v_mem_hid", "i_syn_hid", "v_mem_out", "i_syn_out")


@dataclass
class ComparisonReport:
    exact_match: bool
    first_divergence_step: Optional[int]
    # 每条状态轨迹的最大绝对差
    max_abs_diff: Dict[str, float] = field(default_factory=dict)
    # 每个神经元脉冲总数差 (a - b)
    spike_count_diff: Dict[str, List[int]] = field(default_factory=dict)
    # 输出脉冲总数相对差 |A - B| / max(A, B, 1)
    relative_spike_diff: float = 0.0
    within_tolerance: Optional[bool] = None

    def to_dict(self) -> Dict:
        return {
            "exact_match": self.exact_match,
            "first_divergence_step": self.first_divergence_step,
            "max_abs_diff": {k: float(v) for k, v in self.max_abs_diff.items()},
            "spike_count_diff": self.spike_count_diff,
            "relative_spike_diff": float(self.relative_spike_diff),
            "within_tolerance": self.within_tolerance,
        }

    def is_finite(self) -> bool:
        values = list(self.max_abs_diff.values()) + [self.relative_spike_diff]
        return all(np.isfinite(v) for v in values)


def unscale_recording(recording: SimulationRecording, qspec: QuantizedSpecification) -> FloatRecording:
    """把整数记录的状态除以量化缩放因子，换算回浮点网络的单位"""
    s_hidden = qspec.hidden_scale()
    s_out = qspec.output_scale()
    if not recording.recorded:
        return FloatRecording(spikes_out=recording.spikes_out.copy())
    return FloatRecording(
        spikes_out=recording.spikes_out.copy(),
        v_mem_hid=recording.v_mem_hid / s_hidden[None, :],
        i_syn_hid=recording.i_syn_hid / s_hidden[None, :, None],
        spikes_hid=recording.spikes_hid.copy(),
        v_mem_out=recording.v_mem_out / s_out[None, :],
        i_syn_out=recording.i_syn_out / s_out[None, :],
    )


def _first_divergence(a: np.ndarray, b: np.ndarray) -> Optional[int]:
    differs = (a != b).reshape(a.shape[0], -1).any(axis=1)
    hits = np.flatnonzero(differs)
    return int(hits[0]) if hits.size else None


def compare_recordings(
    a,
    b,
    qspec: Optional[QuantizedSpecification] = None,
    tolerance: Optional[float] = None,
) -> ComparisonReport:
    """
    逐元素比较两份记录

    恰好一方是整数记录且给出 qspec 时，先把整数一方反缩放到浮点单位。
    只有一方记录了完整状态时，只比较两者共有的轨迹（至少是输出脉冲）。

    Args:
        tolerance: 给出时在报告中填写 within_tolerance（按输出脉冲相对差判断）

    Raises:
        ShapeError: 共有轨迹的形状不一致
    """
    if qspec is not None:
        if isinstance(a, SimulationRecording) and isinstance(b, FloatRecording):
            a = unscale_recording(a, qspec)
        elif isinstance(b, SimulationRecording) and isinstance(a, FloatRecording):
            b = unscale_recording(b, qspec)

    traces_a, traces_b = a.traces(), b.traces()
    common = [name for name in traces_a if name in traces_b]
    for name in common:
        if traces_a[name].shape != traces_b[name].shape:
            raise ShapeError(f"轨迹 {name} 形状不一致: {traces_a[name].shape} vs {traces_b[name].shape}")

    max_abs_diff: Dict[str, float] = {}
    divergence: Optional[int] = None
    for name in common:
        left, right = traces_a[name], traces_b[name]
        step = _first_divergence(left, right) if left.size else None
        if step is not None:
            divergence = step if divergence is None else min(divergence, step)
        if name in STATE_TRACES:
            diff = np.abs(left.astype(np.float64) - right.astype(np.float64))
            max_abs_diff[name] = float(diff.max()) if diff.size else 0.0

    spike_count_diff = {
        "output": (a.spikes_out.sum(axis=0) - b.spikes_out.sum(axis=0)).astype(np.int64).tolist()
    }
    if "spikes_hid" in common:
        spike_count_diff["hidden"] = (a.spikes_hid.sum(axis=0) - b.spikes_hid.sum(axis=0)).astype(np.int64).tolist()

    total_a, total_b = int(a.spikes_out.sum()), int(b.spikes_out.sum())
    relative = abs(total_a - total_b) / max(total_a, total_b, 1)

    report = ComparisonReport(
        exact_match=divergence is None,
        first_divergence_step=divergence,
        max_abs_diff=max_abs_diff,
        spike_count_diff=spike_count_diff,
        relative_spike_diff=relative,
        within_tolerance=None if tolerance is None else relative <= tolerance,
    )
    if report.exact_match:
        logger.info("✅ 两份记录完全一致")
    else:
        logger.info(f"⚠️ 两份记录在第 {divergence} 步开始不一致，输出脉冲相对差 {relative:.4f}")
    return report
