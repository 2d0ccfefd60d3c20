"""计算图中间表示测试"""
import numpy as np
import pytest

from config.constants import KIND_LIF, KIND_LINEAR
from graph_ir import (
    ConnectionError as GraphConnectionError,
    as_graph_holder,
    audit_graph,
    compose_residual,
    compose_sequential,
    connect_modules,
    encapsulate,
    finalize_graph,
    holder_levels,
    make_lif,
    make_linear,
    traverse,
)
from utils.exceptions import ConstructionError, CycleError, EncapsulationError

from conftest import lif_params


def test_make_linear_arity():
    module = make_linear(np.ones((2, 3)))
    assert module.kind == KIND_LINEAR
    assert module.size_in == 2
    assert module.size_out == 3
    assert all(module in node.sink_modules for node in module.input_nodes)
    assert all(module in node.source_modules for node in module.output_nodes)


def test_make_linear_degenerate_and_empty():
    assert make_linear([[0.0]]).size_out == 1
    with pytest.raises(ConstructionError):
        make_linear(np.zeros((0, 0)))


@pytest.mark.parametrize("channels,expected_inputs", [(1, 4), (2, 8)])
def test_make_lif_arity(channels, expected_inputs):
    module = make_lif(lif_params(4), 4, synapse_channels=channels)
    assert module.kind == KIND_LIF
    assert module.size_in == expected_inputs
    assert module.size_out == 4
    assert module.payload.tau_syn.shape == (4, channels)


@pytest.mark.parametrize("overrides", [
    {"threshold": 0.0},
    {"tau_mem": -0.01},
    {"tau_syn": 0.0},
    {"bias": [0.0, 0.0]},
])
def test_make_lif_rejects_bad_parameters(overrides):
    with pytest.raises(ConstructionError):
        make_lif(lif_params(4, **overrides), 4)


def test_make_lif_rejects_bad_channel_count():
    with pytest.raises(ConstructionError):
        make_lif(lif_params(4), 4, synapse_channels=3)


def test_connect_modules_merges_nodes():
    linear = make_linear(np.ones((2, 3)))
    lif = make_lif(lif_params(3), 3)
    connect_modules(linear, lif)
    for out_node, in_node in zip(linear.output_nodes, lif.input_nodes):
        assert out_node is in_node
        assert linear in out_node.source_modules
        assert lif in out_node.sink_modules
    assert audit_graph(encapsulate(linear)) == []


def test_connect_modules_arity_mismatch_names_modules():
    linear = make_linear(np.ones((2, 3)), name="lin")
    lif = make_lif(lif_params(4), 4, name="neurons")
    with pytest.raises(GraphConnectionError) as exc:
        connect_modules(linear, lif)
    assert "lin" in str(exc.value) and "neurons" in str(exc.value)
    assert "3" in str(exc.value) and "4" in str(exc.value)


def test_chain_is_one_connected_graph():
    modules = [make_linear(np.ones((2, 3))), make_lif(lif_params(3), 3),
               make_linear(np.ones((3, 2))), make_lif(lif_params(2), 2)]
    for src, dst in zip(modules, modules[1:]):
        connect_modules(src, dst)
    order = traverse(modules[0])
    assert [m for m, _ in order] == modules
    assert [depth for _, depth in order] == [0, 1, 2, 3]


def test_holder_transparency():
    linear = make_linear(np.ones((2, 2)))
    holder = encapsulate(linear)
    assert [m for m, _ in traverse(holder)] == [linear]


def test_holder_reports_chain_arity():
    linear = make_linear(np.ones((5, 3)))
    lif = make_lif(lif_params(3), 3)
    connect_modules(linear, lif)
    holder = as_graph_holder(linear.input_nodes, lif.output_nodes)
    assert (holder.size_in, holder.size_out) == (5, 3)


def test_holder_with_unreachable_output_fails():
    a = make_linear(np.ones((2, 2)))
    b = make_linear(np.ones((2, 2)))
    with pytest.raises(EncapsulationError):
        as_graph_holder(a.input_nodes, a.output_nodes + b.output_nodes)


def test_compose_sequential_arity():
    holder = compose_sequential([
        make_linear(np.ones((16, 8))), make_lif(lif_params(8), 8),
        make_linear(np.ones((8, 8))), make_lif(lif_params(8), 8),
    ])
    assert (holder.size_in, holder.size_out) == (16, 8)
    assert len(traverse(holder)) == 4


def test_compose_sequential_single_module():
    linear = make_linear(np.ones((3, 2)))
    holder = compose_sequential([linear])
    assert [m for m, _ in traverse(holder)] == [linear]
    assert (holder.size_in, holder.size_out) == (3, 2)


def test_compose_sequential_reports_stage():
    modules = [make_linear(np.ones((4, 3))), make_lif(lif_params(3), 3), make_linear(np.ones((2, 2)))]
    with pytest.raises(GraphConnectionError) as exc:
        compose_sequential(modules)
    assert exc.value.stage == 2
    assert "stage 2" in str(exc.value)


def test_compose_residual_records_skip_pairs():
    lif = make_lif(lif_params(8, w_rec=np.zeros((8, 8))), 8)
    holder = compose_residual(lif)
    assert (holder.size_in, holder.size_out) == (8, 8)
    assert holder.skip_pairs == [(i, i) for i in range(8)]


def test_compose_residual_rejects_arity_change():
    with pytest.raises(ConstructionError):
        compose_residual(make_linear(np.ones((8, 4))))


def test_nested_residual_levels():
    inner = compose_residual(make_lif(lif_params(4), 4))
    outer = compose_residual(inner)
    assert holder_levels(outer) == 2
    assert len(traverse(outer)) == 1


def test_traverse_diamond_orders_by_creation():
    source = make_linear(np.ones((2, 2)), name="source")
    left = make_linear(np.ones((2, 1)), name="left")
    right = make_linear(np.ones((2, 1)), name="right")
    connect_modules(source, left)
    # right 与 left 共享输入节点
    right.input_nodes = list(source.output_nodes)
    for node in source.output_nodes:
        node.sink_modules.append(right)
    order = traverse(source)
    assert [(m.name, d) for m, d in order] == [("source", 0), ("left", 1), ("right", 1)]


def test_traverse_cycle_detected():
    a = make_linear(np.ones((2, 2)), name="a")
    b = make_linear(np.ones((2, 2)), name="b")
    connect_modules(a, b)
    connect_modules(b, a)
    with pytest.raises(CycleError) as exc:
        traverse(a)
    assert {m.name for m in exc.value.members} == {"a", "b"}


def test_recurrent_payload_is_not_a_cycle():
    lif = make_lif(lif_params(3, w_rec=np.ones((3, 3))), 3)
    assert [m for m, _ in traverse(lif)] == [lif]


def test_traversal_is_deterministic():
    def build():
        return compose_sequential([make_linear(np.ones((3, 2))), make_lif(lif_params(2), 2)])
    first = [(m.kind, m.size_in, d) for m, d in traverse(build())]
    second = [(m.kind, m.size_in, d) for m, d in traverse(build())]
    assert first == second


def test_finalize_freezes_graph():
    linear = make_linear(np.ones((2, 2)))
    lif = make_lif(lif_params(2), 2)
    graph = finalize_graph(compose_sequential([linear, lif]))
    assert linear.frozen and lif.frozen and graph.frozen
    with pytest.raises(ValueError):
        linear.payload[0, 0] = 5.0
    with pytest.raises(ConstructionError):
        connect_modules(lif, make_linear(np.ones((2, 1))))
