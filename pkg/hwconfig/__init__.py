"""硬件配置模块"""
from .models import HardwareConfig
from .validator import ValidationReport, Violation, validate_config, seal_config, RULES
from .converter import HardwareConfigConverter, config_from_specification
from .data_format import (
    HardwareConfigFormatter,
    serialize_config,
    deserialize_config,
    save_config,
    load_config,
)

__all__ = [
    'HardwareConfig',
    'ValidationReport',
    'Violation',
    'validate_config',
    'seal_config',
    'RULES',
    'HardwareConfigConverter',
    'config_from_specification',
    'HardwareConfigFormatter',
    'serialize_config',
    'deserialize_config',
    'save_config',
    'load_config',
]
