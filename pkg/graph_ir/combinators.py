"""图组合子：GraphHolder 封装、顺序组合、残差组合"""
from typing import Iterable, List, Optional, Tuple

from config.constants import KIND_HOLDER
from graph_ir.models import GraphModule, GraphNode, connect_modules
from utils.exceptions import ConstructionError, EncapsulationError, GraphConnectionError
from utils.logger import setup_logger

logger = setup_logger(__name__)


def _reachable_node_ids(input_nodes: Iterable[GraphNode]) -> set:
    """从输入节点沿 sink_modules 可达的全部节点ID"""
    seen = set()
    stack = list(input_nodes)
    while stack:
        node = stack.pop()
        if node.id in seen:
            continue
        seen.add(node.id)
        for module in node.sink_modules:
            stack.extend(module.output_nodes)
    return seen


def as_graph_holder(
    input_nodes: List[GraphNode],
    output_nodes: List[GraphNode],
    name: str = "holder",
    skip_pairs: Optional[List[Tuple[int, int]]] = None,
    members: Optional[List[GraphModule]] = None,
) -> GraphModule:
    """
    用边界节点封装一个子图（GraphHolder）

    Raises:
        EncapsulationError: 存在从输入节点不可达的输出节点
    """
    reachable = _reachable_node_ids(input_nodes)
    unreachable = [node.id for node in output_nodes if node.id not in reachable]
    if unreachable:
        raise EncapsulationError(f"Holder {name} 的输出节点从输入不可达: {unreachable}")

    holder = GraphModule(
        KIND_HOLDER,
        name,
        input_nodes,
        output_nodes,
        payload=None,
        skip_pairs=skip_pairs,
        members=members,
    )
    for node in holder.input_nodes + holder.output_nodes:
        if holder not in node.holders:
            node.holders.append(holder)
    return holder


def encapsulate(module: GraphModule, name: Optional[str] = None) -> GraphModule:
    """把单个 GraphModule 封装为 GraphHolder"""
    return as_graph_holder(
        module.input_nodes,
        module.output_nodes,
        name=name or f"holder({module.name})",
        members=[module],
    )


def compose_sequential(modules: List[GraphModule], name: str = "sequential") -> GraphModule:
    """
    顺序组合：依次连接相邻模块，结果封装为 Holder

    Raises:
        GraphConnectionError: 第 stage 个模块与前一模块端口数不一致（stage 为列表下标）
    """
    if not modules:
        raise ConstructionError("顺序组合至少需要一个模块")

    # 先整体检查端口数，避免连接到一半才失败
    for stage in range(1, len(modules)):
        prev, current = modules[stage - 1], modules[stage]
        if prev.size_out != current.size_in:
            raise GraphConnectionError(
                f"stage {stage}: {prev.name} 输出 {prev.size_out} ≠ {current.name} 输入 {current.size_in}",
                stage=stage,
            )

    for stage in range(1, len(modules)):
        connect_modules(modules[stage - 1], modules[stage])

    holder = as_graph_holder(
        modules[0].input_nodes,
        modules[-1].output_nodes,
        name=name,
        members=list(modules),
    )
    logger.debug(f"顺序组合完成 {name}: {len(modules)} 个模块, {holder.size_in}→{holder.size_out}")
    return holder


def compose_residual(body: GraphModule, name: str = "residual") -> GraphModule:
    """
    残差组合：Holder 的输入同时送入 body 和跳连路径

    跳连在映射阶段降为别名（alias）；这里只记录配对 (i, i)。

    Raises:
        ConstructionError: body 输入输出端口数不一致
    """
    if body.size_in != body.size_out:
        raise ConstructionError(
            f"残差组合要求输入输出端口数相同: {body.name} 为 {body.size_in}→{body.size_out}"
        )
    pairs = [(idx, idx) for idx in range(body.size_in)]
    holder = as_graph_holder(
        body.input_nodes,
        body.output_nodes,
        name=name,
        skip_pairs=pairs,
        members=[body],
    )
    logger.debug(f"残差组合完成 {name}: {len(pairs)} 个跳连")
    return holder
