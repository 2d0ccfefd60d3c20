"""把计算图映射为稠密的硬件规格（FloatSpecification）"""
from typing import List, Optional

import numpy as np

from config.constants import KIND_LIF, KIND_LINEAR, MAX_HIDDEN_SYNAPSES
from graph_ir.models import GraphModule
from mapper.design_rules import check_design_rules, hidden_offsets, layer_chain, skip_alias_pairs
from mapper.specification import FloatSpecification
from utils.exceptions import MappingError
from utils.logger import setup_logger

logger = setup_logger(__name__)


def _channel_block(weights: np.ndarray, n: int, s: int) -> np.ndarray:
    """取出 LIF 输入端第 s 个突触通道对应的列块"""
    return weights[:, s * n:(s + 1) * n]


def map_graph(graph: GraphModule, dt: float) -> FloatSpecification:
    """
    映射计算图到 Xylo 硬件规格

    隐藏神经元按遍历顺序编号 0..H-1；第一层线性权重 → w_in，最后一层 → w_out，
    其余线性层作为矩形块放入全局隐藏矩阵 w_rec，层内循环权重放在对角块；
    残差跳连降为别名。

    Raises:
        MappingError: 设计规则不满足（消息中列出超出的规格项）或 dt 非正
    """
    if not dt > 0:
        raise MappingError(f"dt 必须为正，实际: {dt}")

    report = check_design_rules(graph)
    if not report.ok:
        raise MappingError(f"图 {graph.name} 无法映射:\n{report.format()}", violations=report.violations)

    chain = layer_chain(graph)
    linears = [m for m in chain if m.kind == KIND_LINEAR]
    lifs = [m for m in chain if m.kind == KIND_LIF]
    hidden_layers, output_layer = lifs[:-1], lifs[-1]
    offsets = hidden_offsets(chain)

    C = linears[0].size_in
    H = sum(layer.size_out for layer in hidden_layers)
    O = output_layer.size_out
    # 隐藏层始终使用双突触通道布局，单通道网络的第二个切片全零
    S = MAX_HIDDEN_SYNAPSES

    w_in = np.zeros((C, H, S))
    w_rec = np.zeros((H, H, S))
    w_out = np.zeros((H, O))
    tau_mem_hid = np.zeros(H)
    tau_syn_hid = np.zeros((H, S))
    threshold_hid = np.zeros(H)
    bias_hid = np.zeros(H)

    for k, layer in enumerate(hidden_layers):
        params = layer.payload
        n = layer.size_out
        lo = offsets[layer.module_id]
        incoming = linears[k].payload
        for s in range(params.synapse_channels):
            block = _channel_block(incoming, n, s)
            if k == 0:
                w_in[:, lo:lo + n, s] = block
            else:
                prev = hidden_layers[k - 1]
                prev_lo = offsets[prev.module_id]
                w_rec[prev_lo:prev_lo + prev.size_out, lo:lo + n, s] = block
            if params.w_rec is not None:
                w_rec[lo:lo + n, lo:lo + n, s] = _channel_block(params.w_rec, n, s)

        tau_mem_hid[lo:lo + n] = params.tau_mem
        tau_syn_hid[lo:lo + n, :params.synapse_channels] = params.tau_syn
        # 单通道层在双通道布局中补齐第二列（权重全零，时间常数沿用通道 0）
        for s in range(params.synapse_channels, S):
            tau_syn_hid[lo:lo + n, s] = params.tau_syn[:, 0]
        threshold_hid[lo:lo + n] = params.threshold
        bias_hid[lo:lo + n] = params.bias

    last_hidden = hidden_layers[-1]
    last_lo = offsets[last_hidden.module_id]
    w_out[last_lo:last_lo + last_hidden.size_out, :] = linears[-1].payload

    out_params = output_layer.payload
    aliases: List[Optional[int]] = [None] * H
    pairs, _ = skip_alias_pairs(graph, offsets)
    for source, target in pairs:
        aliases[source] = target

    spec = FloatSpecification(
        dt=float(dt),
        C=C,
        H=H,
        O=O,
        S=S,
        w_in=w_in,
        w_rec=w_rec,
        w_out=w_out,
        tau_mem_hid=tau_mem_hid,
        tau_syn_hid=tau_syn_hid,
        threshold_hid=threshold_hid,
        bias_hid=bias_hid,
        tau_mem_out=np.array(out_params.tau_mem, dtype=np.float64),
        tau_syn_out=np.array(out_params.tau_syn[:, 0], dtype=np.float64),
        threshold_out=np.array(out_params.threshold, dtype=np.float64),
        bias_out=np.array(out_params.bias, dtype=np.float64),
        aliases=aliases,
    )
    spec.check()
    logger.info(f"✅ 映射完成 {graph.name}: C={C}, H={H}, O={O}, S={S}, 别名 {len(pairs)} 个")
    return spec
