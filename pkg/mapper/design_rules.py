"""设计规则检查：图能否被映射到 Xylo 硬件"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from config.constants import (
    KIND_LIF,
    KIND_LINEAR,
    MAX_HIDDEN_NEURONS,
    MAX_HIDDEN_SYNAPSES,
    MAX_INPUT_CHANNELS,
    MAX_OUTPUT_NEURONS,
    MAX_OUTPUT_SYNAPSES,
    RULE_ALIAS,
    RULE_ALTERNATION,
    RULE_HIDDEN_NEURONS,
    RULE_INPUT_CHANNELS,
    RULE_OUTPUT_NEURONS,
    RULE_OUTPUT_RECURRENCE,
    RULE_SYNAPSE_CHANNELS,
)
from graph_ir.models import GraphModule, GraphNode
from graph_ir.traversal import collect_holders, predecessors, successors, traverse
from utils.exceptions import CycleError
from utils.logger import setup_logger

logger = setup_logger(__name__)


@dataclass
class RuleViolation:
    rule_id: str
    message: str
    offender: str


@dataclass
class DesignRuleReport:
    violations: List[RuleViolation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, rule_id: str, message: str, offender: str):
        self.violations.append(RuleViolation(rule_id, message, offender))

    def format(self) -> str:
        return "\n".join(f"[{v.rule_id}] {v.offender}: {v.message}" for v in self.violations)


def layer_chain(graph: GraphModule) -> List[GraphModule]:
    """按遍历顺序返回图内的非 Holder 模块"""
    return [module for module, _ in traverse(graph)]


def hidden_offsets(chain: List[GraphModule]) -> Dict[int, int]:
    """隐藏 LIF 层（除最后一层外的 LIF）的神经元起始编号"""
    lifs = [m for m in chain if m.kind == KIND_LIF]
    offsets: Dict[int, int] = {}
    offset = 0
    for lif in lifs[:-1]:
        offsets[lif.module_id] = offset
        offset += lif.size_out
    return offsets


def _hidden_neuron(node: GraphNode, offsets: Dict[int, int]) -> Optional[int]:
    """节点若是某隐藏 LIF 的输出，返回对应的全局隐藏神经元编号"""
    for module in node.source_modules:
        if module.module_id in offsets:
            for idx, out_node in enumerate(module.output_nodes):
                if out_node is node:
                    return offsets[module.module_id] + idx
    return None


def skip_alias_pairs(
    graph: GraphModule, offsets: Dict[int, int]
) -> Tuple[List[Tuple[int, int]], List[Tuple[str, str]]]:
    """
    把残差 Holder 记录的跳连配对解析为 (源隐藏神经元, 目标隐藏神经元)

    Returns:
        (别名配对列表, 问题列表[(Holder名, 描述)])
    """
    pairs: List[Tuple[int, int]] = []
    problems: List[Tuple[str, str]] = []
    for holder in collect_holders(graph):
        for in_idx, out_idx in holder.skip_pairs:
            source = _hidden_neuron(holder.input_nodes[in_idx], offsets)
            target = _hidden_neuron(holder.output_nodes[out_idx], offsets)
            if source is None or target is None:
                problems.append((
                    holder.name,
                    f"跳连 {in_idx}→{out_idx} 的源和目标都必须是隐藏神经元 "
                    f"(Max. alias targets (hidden neurons only))",
                ))
                continue
            if source == target:
                problems.append((holder.name, f"跳连 {in_idx}→{out_idx} 的源与目标是同一个神经元 {source}"))
                continue
            pairs.append((source, target))
    return pairs, problems


def check_design_rules(graph: GraphModule) -> DesignRuleReport:
    """
    检查设计规则（所有问题都写入报告，不抛异常）

    R1 线性层开头且线性层/LIF 层严格交替，单链结构；R2 输入通道 ≤ 16；
    R3 隐藏神经元 ≤ 1000；R4 输出神经元 ≤ 8；R5 突触通道（隐藏 ≤ 2，输出 = 1）；
    R6 每个隐藏神经元至多一个别名；R7 输出层不能带循环权重
    """
    report = DesignRuleReport()
    try:
        chain = layer_chain(graph)
    except CycleError as e:
        report.add(RULE_ALTERNATION, f"图中存在环: {e}", graph.name)
        return report

    if not chain:
        report.add(RULE_ALTERNATION, "图中没有任何计算模块", graph.name)
        return report

    if chain[0].kind != KIND_LINEAR:
        report.add(RULE_ALTERNATION, "图必须以 LinearWeights 开头", chain[0].name)
    else:
        if chain[0].size_in > MAX_INPUT_CHANNELS:
            report.add(
                RULE_INPUT_CHANNELS,
                f"输入通道 {chain[0].size_in} 超过上限 {MAX_INPUT_CHANNELS} (Max. input channels)",
                chain[0].name,
            )

    members = {m.module_id: m for m in chain}
    chain_ok = chain[0].kind == KIND_LINEAR
    for idx, module in enumerate(chain):
        succ = successors(module, members, set())
        pred = [p for p in predecessors(module) if p.module_id in members]
        if len(succ) > 1 or len(pred) > 1:
            report.add(RULE_ALTERNATION, "映射只支持单链结构（不能分叉或汇合）", module.name)
            chain_ok = False
        if idx > 0 and module.kind == chain[idx - 1].kind:
            report.add(RULE_ALTERNATION, f"{chain[idx - 1].name} 与 {module.name} 类型相同，未交替", module.name)
            chain_ok = False
    if chain[-1].kind != KIND_LIF:
        report.add(RULE_ALTERNATION, "图必须以 LIFNeurons 结尾", chain[-1].name)
        chain_ok = False
    lif_layers = [m for m in chain if m.kind == KIND_LIF]
    if len(lif_layers) < 2:
        report.add(RULE_ALTERNATION, "至少需要一个隐藏 LIF 层和一个输出 LIF 层", graph.name)
        chain_ok = False

    if not chain_ok:
        return report

    hidden_layers, output_layer = lif_layers[:-1], lif_layers[-1]
    hidden_total = sum(m.size_out for m in hidden_layers)
    if hidden_total > MAX_HIDDEN_NEURONS:
        report.add(
            RULE_HIDDEN_NEURONS,
            f"隐藏神经元 {hidden_total} 超过上限 {MAX_HIDDEN_NEURONS} (Max. hidden LIF neurons)",
            graph.name,
        )
    if output_layer.size_out > MAX_OUTPUT_NEURONS:
        report.add(
            RULE_OUTPUT_NEURONS,
            f"输出神经元 {output_layer.size_out} 超过上限 {MAX_OUTPUT_NEURONS} (Max. output LIF neurons)",
            output_layer.name,
        )
    for layer in hidden_layers:
        if layer.payload.synapse_channels > MAX_HIDDEN_SYNAPSES:
            report.add(
                RULE_SYNAPSE_CHANNELS,
                f"突触通道 {layer.payload.synapse_channels} 超过上限 {MAX_HIDDEN_SYNAPSES} "
                f"(Max. input synapses per hidden neuron)",
                layer.name,
            )
    if output_layer.payload.synapse_channels != MAX_OUTPUT_SYNAPSES:
        report.add(
            RULE_SYNAPSE_CHANNELS,
            f"输出层突触通道必须为 {MAX_OUTPUT_SYNAPSES}，实际 {output_layer.payload.synapse_channels} "
            f"(Max. input synapses per output neuron)",
            output_layer.name,
        )
    if output_layer.payload.w_rec is not None:
        report.add(RULE_OUTPUT_RECURRENCE, "输出层不能带循环权重", output_layer.name)

    pairs, problems = skip_alias_pairs(graph, hidden_offsets(chain))
    for holder_name, message in problems:
        report.add(RULE_ALIAS, message, holder_name)
    sources: Dict[int, int] = {}
    for source, _ in pairs:
        sources[source] = sources.get(source, 0) + 1
    for source, count in sorted(sources.items()):
        if count > 1:
            report.add(RULE_ALIAS, f"隐藏神经元 {source} 有 {count} 个别名目标，上限为 1", f"neuron {source}")

    if report.ok:
        logger.debug(f"设计规则检查通过: {graph.name}")
    else:
        logger.warning(f"设计规则检查发现 {len(report.violations)} 个问题: {graph.name}")
    return report
