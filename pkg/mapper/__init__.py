"""硬件映射模块"""
from .specification import FloatSpecification, save_specification, load_specification, dumps_specification
from .design_rules import DesignRuleReport, RuleViolation, check_design_rules
from .mapper import map_graph

__all__ = [
    'FloatSpecification',
    'save_specification',
    'load_specification',
    'dumps_specification',
    'DesignRuleReport',
    'RuleViolation',
    'check_design_rules',
    'map_graph',
]
