"""图遍历、完整性审计与冻结"""
import heapq
from typing import Dict, List, Set, Tuple

from graph_ir.models import GraphModule, GraphNode
from utils.exceptions import CycleError
from utils.logger import setup_logger

logger = setup_logger(__name__)


def _boundary_ids(graph: GraphModule) -> Set[int]:
    """Holder 的输出节点是遍历边界；普通模块无边界"""
    if graph.is_holder:
        return {node.id for node in graph.output_nodes}
    return set()


def collect_modules(graph: GraphModule) -> List[GraphModule]:
    """收集图内全部非 Holder 模块（按创建ID排序）"""
    boundary = _boundary_ids(graph)
    modules: Dict[int, GraphModule] = {}
    seen_nodes: Set[int] = set()
    stack = list(graph.input_nodes)
    while stack:
        node = stack.pop()
        if node.id in seen_nodes:
            continue
        seen_nodes.add(node.id)
        if node.id in boundary:
            continue
        for module in node.sink_modules:
            if module.module_id not in modules:
                modules[module.module_id] = module
                stack.extend(module.output_nodes)
    return [modules[key] for key in sorted(modules)]


def successors(module: GraphModule, members: Dict[int, GraphModule], boundary: Set[int]) -> List[GraphModule]:
    """模块在图内的直接后继（排除自环：循环连接属于参数，不是边）"""
    result = {}
    for node in module.output_nodes:
        if node.id in boundary:
            continue
        for sink in node.sink_modules:
            if sink is not module and sink.module_id in members:
                result[sink.module_id] = sink
    return [result[key] for key in sorted(result)]


def traverse(graph: GraphModule) -> List[Tuple[GraphModule, int]]:
    """
    确定性拓扑遍历

    Returns:
        [(模块, 深度), ...]，按 (深度, 创建ID) 排序；深度为从入口起的最长路径

    Raises:
        CycleError: 不同模块之间存在环
    """
    modules = collect_modules(graph)
    members = {m.module_id: m for m in modules}
    boundary = _boundary_ids(graph)

    succ = {m.module_id: successors(m, members, boundary) for m in modules}
    indegree = {m.module_id: 0 for m in modules}
    for module_id, targets in succ.items():
        for target in targets:
            indegree[target.module_id] += 1

    depth = {m.module_id: 0 for m in modules}
    ready = [m.module_id for m in modules if indegree[m.module_id] == 0]
    heapq.heapify(ready)
    processed = 0
    while ready:
        module_id = heapq.heappop(ready)
        processed += 1
        for target in succ[module_id]:
            depth[target.module_id] = max(depth[target.module_id], depth[module_id] + 1)
            indegree[target.module_id] -= 1
            if indegree[target.module_id] == 0:
                heapq.heappush(ready, target.module_id)

    if processed < len(modules):
        cyclic = [members[key] for key in sorted(indegree) if indegree[key] > 0]
        names = [m.name for m in cyclic]
        raise CycleError(f"图中存在环，涉及模块: {', '.join(names)}", members=cyclic)

    order = sorted(modules, key=lambda m: (depth[m.module_id], m.module_id))
    return [(m, depth[m.module_id]) for m in order]


def predecessors(module: GraphModule) -> List[GraphModule]:
    """模块的直接前驱（排除自身）"""
    result = {}
    for node in module.input_nodes:
        for source in node.source_modules:
            if source is not module:
                result[source.module_id] = source
    return [result[key] for key in sorted(result)]


def collect_holders(graph: GraphModule) -> List[GraphModule]:
    """收集图内节点上登记的全部 Holder（含 graph 自身，按创建ID排序）"""
    holders: Dict[int, GraphModule] = {}
    nodes: List[GraphNode] = list(graph.input_nodes) + list(graph.output_nodes)
    for module in collect_modules(graph):
        nodes.extend(module.input_nodes)
        nodes.extend(module.output_nodes)
    for node in nodes:
        for holder in node.holders:
            holders[holder.module_id] = holder
    if graph.is_holder:
        holders[graph.module_id] = graph
    return [holders[key] for key in sorted(holders)]


def holder_levels(graph: GraphModule) -> int:
    """Holder 嵌套层数（普通模块为 0）"""
    if not graph.is_holder:
        return 0
    return 1 + max((holder_levels(member) for member in graph.members), default=0)


def audit_graph(graph: GraphModule) -> List[str]:
    """
    全图引用完整性审计

    Returns:
        问题描述列表，空列表表示一致
    """
    problems: List[str] = []
    modules = collect_modules(graph)
    nodes: Dict[int, GraphNode] = {}
    for module in modules:
        for node in module.input_nodes:
            nodes[node.id] = node
            if module not in node.sink_modules:
                problems.append(f"{module.name} 的输入节点 {node.id} 未登记该模块为 sink")
        for node in module.output_nodes:
            nodes[node.id] = node
            if module not in node.source_modules:
                problems.append(f"{module.name} 的输出节点 {node.id} 未登记该模块为 source")

    for node in nodes.values():
        for module in node.sink_modules:
            if not any(n is node for n in module.input_nodes):
                problems.append(f"节点 {node.id} 登记的 sink {module.name} 未引用该节点")
        for module in node.source_modules:
            if not any(n is node for n in module.output_nodes):
                problems.append(f"节点 {node.id} 登记的 source {module.name} 未引用该节点")
        for holder in node.holders:
            if not any(n is node for n in holder.input_nodes + holder.output_nodes):
                problems.append(f"节点 {node.id} 登记的 Holder {holder.name} 未引用该节点")

    return problems


def finalize_graph(graph: GraphModule) -> GraphModule:
    """冻结图：构造阶段结束，之后模块与参数数组只读"""
    ordered = traverse(graph)
    for module, _ in ordered:
        module.frozen = True
        payload = module.payload
        if payload is None:
            continue
        if hasattr(payload, "setflags"):
            payload.setflags(write=False)
        else:
            for field in ("tau_mem", "tau_syn", "threshold", "bias", "w_rec"):
                arr = getattr(payload, field)
                if arr is not None:
                    arr.setflags(write=False)
    for holder in collect_holders(graph):
        holder.frozen = True
    logger.debug(f"图 {graph.name} 已冻结，共 {len(ordered)} 个模块")
    return graph
