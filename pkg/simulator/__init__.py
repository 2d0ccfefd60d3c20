"""仿真模块：整数黄金模型、浮点参考仿真与标量参考实现"""
from .recording import InputRaster, SimulationRecording, FloatRecording, RECORDING_COLUMNS, recording_from_csv_text
from .xylo_sim import XyloSim, NeuronStates, bitshift_decay, step, evolve
from .float_sim import evolve_float, decay_factor
from .reference import reference_evolve

__all__ = [
    'InputRaster',
    'SimulationRecording',
    'FloatRecording',
    'RECORDING_COLUMNS',
    'recording_from_csv_text',
    'XyloSim',
    'NeuronStates',
    'bitshift_decay',
    'step',
    'evolve',
    'evolve_float',
    'decay_factor',
    'reference_evolve',
]
