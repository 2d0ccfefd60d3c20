"""工具模块"""
from .logger import setup_logger
from .helpers import (
    round_half_away_from_zero,
    sat16,
    max_abs,
    format_dt,
    canonical_dumps,
    write_text,
    file_sha256,
)
from .formatter import (
    format_validation_message,
    format_design_rule_message,
    format_graph_summary,
    format_comparison_summary,
)

__all__ = [
    'setup_logger',
    'round_half_away_from_zero',
    'sat16',
    'max_abs',
    'format_dt',
    'canonical_dumps',
    'write_text',
    'file_sha256',
    'format_validation_message',
    'format_design_rule_message',
    'format_graph_summary',
    'format_comparison_summary',
]
