"""流水线驱动与验证模块"""
from .network_loader import LoadedNetwork, NetworkLoader, load_network
from .comparison import ComparisonReport, compare_recordings, unscale_recording
from .verification import VerificationResult, random_config, random_raster, run_case, run_equivalence
from .pipeline import PipelineOptions, PipelineResult, run_pipeline, run_stage, validated_config

__all__ = [
    'LoadedNetwork',
    'NetworkLoader',
    'load_network',
    'ComparisonReport',
    'compare_recordings',
    'unscale_recording',
    'VerificationResult',
    'random_config',
    'random_raster',
    'run_case',
    'run_equivalence',
    'PipelineOptions',
    'PipelineResult',
    'run_pipeline',
    'run_stage',
    'validated_config',
]
