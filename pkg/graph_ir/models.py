"""计算图数据模型（GraphNode / GraphModule / LIFParams）与模块工厂"""
import itertools
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from config.constants import KIND_HOLDER, KIND_LIF, KIND_LINEAR, MAX_HIDDEN_SYNAPSES
from utils.exceptions import ConstructionError, GraphConnectionError
from utils.logger import setup_logger

logger = setup_logger(__name__)

# 全局自增ID（节点ID唯一；模块创建ID用于遍历时的确定性排序）
_node_ids = itertools.count()
_module_ids = itertools.count()


class GraphNode:
    """连接节点：模块之间的"结缔组织" """

    def __init__(self):
        self.id: int = next(_node_ids)
        self.source_modules: List["GraphModule"] = []
        self.sink_modules: List["GraphModule"] = []
        # 以本节点为边界的 Holder（Holder 不出现在 source/sink 列表中）
        self.holders: List["GraphModule"] = []

    def __repr__(self) -> str:
        return f"GraphNode(id={self.id})"


@dataclass
class LIFParams:
    """LIF 神经元层参数

    tau_mem: (n,) 秒
    tau_syn: (n, S) 秒，每个突触通道一列
    threshold: (n,) 无量纲，严格为正
    bias: (n,) 无量纲
    w_rec: 可选 (n, n·S) 层内循环权重；列索引 s·n + i 对应神经元 i 的通道 s
    """
    tau_mem: np.ndarray
    tau_syn: np.ndarray
    threshold: np.ndarray
    bias: np.ndarray
    w_rec: Optional[np.ndarray] = None

    @property
    def size(self) -> int:
        return int(self.tau_mem.shape[0])

    @property
    def synapse_channels(self) -> int:
        return int(self.tau_syn.shape[1])


class GraphModule:
    """计算单元：LinearWeights / LIFNeurons / Holder"""

    def __init__(
        self,
        kind: str,
        name: str,
        input_nodes: List[GraphNode],
        output_nodes: List[GraphNode],
        payload=None,
        skip_pairs: Optional[List[Tuple[int, int]]] = None,
        members: Optional[List["GraphModule"]] = None,
    ):
        self.module_id: int = next(_module_ids)
        self.kind = kind
        self.name = name
        self.input_nodes = list(input_nodes)
        self.output_nodes = list(output_nodes)
        self.payload = payload
        # 仅 Holder 使用：残差跳连配对 (输入索引, 输出索引) 以及构造它的成员模块
        self.skip_pairs: List[Tuple[int, int]] = list(skip_pairs or [])
        self.members: List["GraphModule"] = list(members or [])
        self.frozen = False

    @property
    def is_holder(self) -> bool:
        return self.kind == KIND_HOLDER

    @property
    def size_in(self) -> int:
        return len(self.input_nodes)

    @property
    def size_out(self) -> int:
        return len(self.output_nodes)

    def __repr__(self) -> str:
        return f"{self.kind}(name={self.name!r}, id={self.module_id}, {self.size_in}→{self.size_out})"


def _new_nodes(count: int) -> List[GraphNode]:
    return [GraphNode() for _ in range(count)]


def _wire(module: GraphModule):
    """把模块登记到自身端口节点上"""
    for node in module.input_nodes:
        node.sink_modules.append(module)
    for node in module.output_nodes:
        node.source_modules.append(module)


def make_linear(weights, name: Optional[str] = None) -> GraphModule:
    """
    创建线性权重模块

    Args:
        weights: (输入数 × 输出数) 实数矩阵

    Returns:
        LinearWeights 模块，输入/输出节点数由矩阵形状决定

    Raises:
        ConstructionError: 矩阵为空或不是二维
    """
    matrix = np.array(weights, dtype=np.float64)
    if matrix.ndim != 2 or matrix.size == 0:
        raise ConstructionError(f"线性层权重必须是非空二维矩阵，实际形状: {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise ConstructionError("线性层权重包含非有限值")

    rows, cols = matrix.shape
    module = GraphModule(
        KIND_LINEAR,
        name or f"linear_{rows}x{cols}",
        _new_nodes(rows),
        _new_nodes(cols),
        payload=matrix,
    )
    _wire(module)
    logger.debug(f"创建线性模块 {module}")
    return module


def _as_vector(values, n: int, field: str) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    if arr.ndim == 0:
        arr = np.full(n, float(arr))
    if arr.shape != (n,):
        raise ConstructionError(f"参数 {field} 长度应为 {n}，实际形状: {arr.shape}")
    return arr


def make_lif(params: LIFParams, n: int, synapse_channels: int = 1, name: Optional[str] = None) -> GraphModule:
    """
    创建 LIF 神经元模块

    输入节点数为 n·synapse_channels（通道优先排列：节点 s·n + i 是神经元 i 的通道 s），
    输出节点数为 n。

    Raises:
        ConstructionError: 通道数非法、参数长度不匹配、阈值或时间常数非正
    """
    if synapse_channels not in (1, MAX_HIDDEN_SYNAPSES):
        raise ConstructionError(f"突触通道数必须为 1 或 2，实际: {synapse_channels}")
    if n < 1:
        raise ConstructionError(f"神经元数量必须为正，实际: {n}")

    tau_mem = _as_vector(params.tau_mem, n, "tau_mem")
    threshold = _as_vector(params.threshold, n, "threshold")
    bias = _as_vector(params.bias, n, "bias")

    tau_syn = np.array(params.tau_syn, dtype=np.float64)
    if tau_syn.ndim == 0:
        tau_syn = np.full((n, synapse_channels), float(tau_syn))
    elif tau_syn.ndim == 1:
        if tau_syn.shape != (n,):
            raise ConstructionError(f"参数 tau_syn 长度应为 {n}，实际形状: {tau_syn.shape}")
        tau_syn = np.repeat(tau_syn[:, None], synapse_channels, axis=1)
    if tau_syn.shape != (n, synapse_channels):
        raise ConstructionError(f"参数 tau_syn 形状应为 ({n}, {synapse_channels})，实际: {tau_syn.shape}")

    if np.any(~(tau_mem > 0)) or np.any(~(tau_syn > 0)):
        raise ConstructionError("时间常数 tau_mem / tau_syn 必须严格为正")
    if np.any(~(threshold > 0)):
        raise ConstructionError("阈值 threshold 必须严格为正")
    if not np.all(np.isfinite(bias)):
        raise ConstructionError("偏置 bias 包含非有限值")

    w_rec = None
    if params.w_rec is not None:
        w_rec = np.array(params.w_rec, dtype=np.float64)
        if w_rec.shape != (n, n * synapse_channels):
            raise ConstructionError(
                f"循环权重 w_rec 形状应为 ({n}, {n * synapse_channels})，实际: {w_rec.shape}"
            )

    payload = LIFParams(tau_mem=tau_mem, tau_syn=tau_syn, threshold=threshold, bias=bias, w_rec=w_rec)
    module = GraphModule(
        KIND_LIF,
        name or f"lif_{n}",
        _new_nodes(n * synapse_channels),
        _new_nodes(n),
        payload=payload,
    )
    _wire(module)
    logger.debug(f"创建 LIF 模块 {module}，通道数: {synapse_channels}，循环: {w_rec is not None}")
    return module


def _replace(nodes: List[GraphNode], old: GraphNode, new: GraphNode):
    for idx, node in enumerate(nodes):
        if node is old:
            nodes[idx] = new


def _merge_nodes(keep: GraphNode, drop: GraphNode):
    """把 drop 节点合并进 keep 节点，并修正所有引用"""
    for module in drop.sink_modules:
        _replace(module.input_nodes, drop, keep)
        if module not in keep.sink_modules:
            keep.sink_modules.append(module)
    for module in drop.source_modules:
        _replace(module.output_nodes, drop, keep)
        if module not in keep.source_modules:
            keep.source_modules.append(module)
    for holder in drop.holders:
        _replace(holder.input_nodes, drop, keep)
        _replace(holder.output_nodes, drop, keep)
        if holder not in keep.holders:
            keep.holders.append(holder)
    drop.sink_modules = []
    drop.source_modules = []
    drop.holders = []


def connect_modules(src: GraphModule, dst: GraphModule):
    """
    连接两个模块：src 的输出节点逐一替换 dst 的输入节点（节点合并）

    Raises:
        GraphConnectionError: 端口数不一致
        ConstructionError: 任一模块已冻结
    """
    if src.frozen or dst.frozen:
        raise ConstructionError(f"图已冻结，不能再连接 {src.name} → {dst.name}")
    if src.size_out != dst.size_in:
        raise GraphConnectionError(
            f"无法连接 {src.name} → {dst.name}: 输出端口数 {src.size_out} ≠ 输入端口数 {dst.size_in}"
        )

    for out_node, in_node in zip(list(src.output_nodes), list(dst.input_nodes)):
        if out_node is not in_node:
            _merge_nodes(out_node, in_node)
    logger.debug(f"已连接 {src.name} → {dst.name}（合并 {src.size_out} 个节点）")
