"""计算图中间表示模块"""
from .models import GraphNode, GraphModule, LIFParams, make_linear, make_lif, connect_modules
from .combinators import as_graph_holder, encapsulate, compose_sequential, compose_residual
from .traversal import traverse, audit_graph, finalize_graph, holder_levels, collect_holders
from utils.exceptions import GraphConnectionError as ConnectionError

__all__ = [
    'GraphNode',
    'GraphModule',
    'LIFParams',
    'make_linear',
    'make_lif',
    'connect_modules',
    'as_graph_holder',
    'encapsulate',
    'compose_sequential',
    'compose_residual',
    'traverse',
    'audit_graph',
    'finalize_graph',
    'holder_levels',
    'collect_holders',
    'ConnectionError',
]
