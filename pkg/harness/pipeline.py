"""完整流水线：构建 → 映射 → 量化 → 校验 → 刺激 → 仿真 → 比较 → 导出绘图数据"""
import csv
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, Optional, Union

import numpy as np

from config.constants import (
    ARTIFACT_COMPARISON,
    ARTIFACT_CONFIG,
    ARTIFACT_PLOT_ISYN,
    ARTIFACT_PLOT_SPIKES,
    ARTIFACT_PLOT_VMEM,
    ARTIFACT_QSPEC,
    ARTIFACT_RASTER,
    ARTIFACT_RECORDING_FLOAT,
    ARTIFACT_RECORDING_INT,
    ARTIFACT_SPEC,
    ARTIFACT_SUMMARY_FLOAT,
    ARTIFACT_SUMMARY_INT,
)
from config.settings import Settings
from harness.comparison import ComparisonReport, compare_recordings
from harness.network_loader import load_network
from hwconfig.converter import config_from_specification
from hwconfig.data_format import save_config
from mapper.mapper import map_graph
from mapper.specification import save_specification
from quantizer.models import QuantizedSpecification, save_quantized
from quantizer.quantize_methods import quantize
from simulator.float_sim import evolve_float
from simulator.recording import FloatRecording, InputRaster, SimulationRecording
from simulator.xylo_sim import evolve
from stimulus.poisson import poisson_raster, save_raster
from utils.exceptions import ConfigValidationError, PipelineStageError
from utils.helpers import canonical_dumps, write_text
from utils.logger import setup_logger

logger = setup_logger(__name__)


@dataclass
class PipelineOptions:
    """流水线参数；为 None 的项取 Settings 默认值（dt 优先取网络文件中的值）"""
    out_dir: Optional[str] = None
    dt: Optional[float] = None
    seed: Optional[int] = None
    steps: Optional[int] = None
    input_rate: Optional[float] = None
    quantize_method: Optional[str] = None
    record: bool = True
    tolerance: Optional[float] = None


@dataclass
class PipelineResult:
    artifacts: Dict[str, Path] = field(default_factory=dict)
    comparison: Optional[ComparisonReport] = None


def run_stage(name: str, func: Callable, *args, **kwargs):
    """执行一个阶段，失败时包装为 PipelineStageError（带阶段名）"""
    logger.info(f"▶️ 阶段 {name} 开始")
    try:
        result = func(*args, **kwargs)
    except PipelineStageError:
        raise
    except Exception as e:
        logger.error(f"❌ 阶段 {name} 失败: {e}")
        raise PipelineStageError(name, e) from e
    logger.info(f"✅ 阶段 {name} 完成")
    return result


def validated_config(qspec: QuantizedSpecification):
    """生成硬件配置，校验失败抛 ConfigValidationError（消息逐行列出违例）"""
    config, is_valid, message = config_from_specification(qspec)
    if not is_valid:
        raise ConfigValidationError(f"硬件配置校验失败:\n{message}")
    return config


def _fmt(value) -> str:
    return repr(float(value))


def plot_spike_raster_csv(raster: InputRaster, recording: SimulationRecording) -> str:
    """脉冲栅格绘图数据（只列非零项）：t,population,index,count"""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t", "population", "index", "count"])
    populations = [("input", raster.counts), ("output", recording.spikes_out)]
    if recording.spikes_hid is not None:
        populations.insert(1, ("hidden", recording.spikes_hid))
    for t in range(raster.steps):
        for population, counts in populations:
            for idx in np.flatnonzero(counts[t]):
                writer.writerow([t, population, int(idx), int(counts[t, idx])])
    return buf.getvalue()


def plot_membrane_csv(recording: SimulationRecording, float_recording: FloatRecording, qspec: QuantizedSpecification) -> str:
    """膜电位轨迹：t,population,index,int_raw,int_unscaled,float"""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t", "population", "index", "int_raw", "int_unscaled", "float"])
    layers = [
        ("hidden", recording.v_mem_hid, float_recording.v_mem_hid, qspec.hidden_scale()),
        ("output", recording.v_mem_out, float_recording.v_mem_out, qspec.output_scale()),
    ]
    for t in range(recording.steps):
        for population, raw, ref, scale in layers:
            for idx in range(raw.shape[1]):
                writer.writerow([t, population, idx, int(raw[t, idx]), _fmt(raw[t, idx] / scale[idx]), _fmt(ref[t, idx])])
    return buf.getvalue()


def plot_synaptic_csv(recording: SimulationRecording, float_recording: FloatRecording, qspec: QuantizedSpecification) -> str:
    """突触电流轨迹：t,population,index,channel,int_raw,int_unscaled,float"""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t", "population", "index", "channel", "int_raw", "int_unscaled", "float"])
    s_hidden, s_out = qspec.hidden_scale(), qspec.output_scale()
    H, S = recording.i_syn_hid.shape[1], recording.i_syn_hid.shape[2]
    for t in range(recording.steps):
        for idx in range(H):
            for s in range(S):
                raw = recording.i_syn_hid[t, idx, s]
                writer.writerow([t, "hidden", idx, s, int(raw), _fmt(raw / s_hidden[idx]), _fmt(float_recording.i_syn_hid[t, idx, s])])
        for idx in range(recording.i_syn_out.shape[1]):
            raw = recording.i_syn_out[t, idx]
            writer.writerow([t, "output", idx, 0, int(raw), _fmt(raw / s_out[idx]), _fmt(float_recording.i_syn_out[t, idx])])
    return buf.getvalue()


def run_pipeline(network_file: Union[str, Path], options: Optional[PipelineOptions] = None) -> PipelineResult:
    """
    运行完整流水线并把全部产物写入 out_dir

    相同输入与种子得到字节级一致的产物。

    Raises:
        PipelineStageError: 任一阶段失败，stage 为阶段名，cause 为原始异常
            （校验失败时 cause 为 ConfigValidationError 或 MappingError）
    """
    options = options or PipelineOptions()
    out_dir = Path(options.out_dir or Settings.OUT_DIR)
    seed = Settings.SEED if options.seed is None else options.seed
    steps = Settings.STEPS if options.steps is None else options.steps
    rate = Settings.INPUT_RATE if options.input_rate is None else options.input_rate
    method = options.quantize_method or Settings.QUANTIZE_METHOD
    tolerance = Settings.SPIKE_TOLERANCE if options.tolerance is None else options.tolerance

    result = PipelineResult()
    artifacts = result.artifacts

    network = run_stage("build", load_network, network_file, seed=seed)
    dt = options.dt or network.dt or Settings.DT

    spec = run_stage("map", map_graph, network.graph, dt)
    artifacts[ARTIFACT_SPEC] = save_specification(spec, out_dir / ARTIFACT_SPEC)

    qspec = run_stage("quantize", quantize, spec, method)
    artifacts[ARTIFACT_QSPEC] = save_quantized(qspec, out_dir / ARTIFACT_QSPEC)

    config = run_stage("validate", validated_config, qspec)
    artifacts[ARTIFACT_CONFIG] = save_config(config, out_dir / ARTIFACT_CONFIG)

    raster = run_stage("stimulate", poisson_raster, [rate] * spec.C, steps, dt, seed)
    artifacts[ARTIFACT_RASTER] = save_raster(raster, out_dir / ARTIFACT_RASTER)

    recording = run_stage("simulate-int", evolve, config, raster, record=options.record)
    float_recording = run_stage("simulate-float", evolve_float, spec, raster, record=options.record)
    problems = recording.check_invariants()
    if problems:
        raise PipelineStageError("simulate-int", AssertionError("; ".join(problems)))
    artifacts[ARTIFACT_RECORDING_INT] = write_text(out_dir / ARTIFACT_RECORDING_INT, recording.to_csv_text())
    artifacts[ARTIFACT_RECORDING_FLOAT] = write_text(out_dir / ARTIFACT_RECORDING_FLOAT, float_recording.to_csv_text())
    artifacts[ARTIFACT_SUMMARY_INT] = write_text(out_dir / ARTIFACT_SUMMARY_INT, canonical_dumps(recording.summary()))
    artifacts[ARTIFACT_SUMMARY_FLOAT] = write_text(out_dir / ARTIFACT_SUMMARY_FLOAT, canonical_dumps(float_recording.summary()))

    comparison = run_stage("compare", compare_recordings, float_recording, recording, qspec=qspec, tolerance=tolerance)
    artifacts[ARTIFACT_COMPARISON] = write_text(out_dir / ARTIFACT_COMPARISON, canonical_dumps(comparison.to_dict()))
    result.comparison = comparison

    artifacts[ARTIFACT_PLOT_SPIKES] = write_text(out_dir / ARTIFACT_PLOT_SPIKES, plot_spike_raster_csv(raster, recording))
    if recording.recorded:
        artifacts[ARTIFACT_PLOT_VMEM] = write_text(out_dir / ARTIFACT_PLOT_VMEM, plot_membrane_csv(recording, float_recording, qspec))
        artifacts[ARTIFACT_PLOT_ISYN] = write_text(out_dir / ARTIFACT_PLOT_ISYN, plot_synaptic_csv(recording, float_recording, qspec))

    if comparison.within_tolerance is False:
        logger.warning(f"⚠️ 浮点/整数输出脉冲相对差 {comparison.relative_spike_diff:.4f} 超过容忍度 {tolerance}")
    logger.info(f"✅ 流水线完成: {len(artifacts)} 个产物写入 {out_dir}")
    return result
