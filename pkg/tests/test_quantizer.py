"""后训练量化测试"""
from dataclasses import replace

import numpy as np
import pytest

from config.constants import INT16_MAX, INT16_MIN, MAX_DASH, THRESHOLD_MAX, WEIGHT_Q_MAX
from mapper.specification import FloatSpecification
from quantizer import load_quantized, quantize, quantize_channel, quantize_global, save_quantized, tau_to_dash
from quantizer.models import INT_FIELDS
from utils.exceptions import DomainError

from conftest import build_float_spec


def random_spec(rng, C=4, H=5, O=3, S=2) -> FloatSpecification:
    spec = build_float_spec(
        rng.normal(0, 1, (C, H, S)),
        rng.normal(0, 1, (H, H, S)),
        rng.normal(0, 1, (H, O)),
        threshold_hid=rng.uniform(0.1, 5.0, H),
        threshold_out=rng.uniform(0.1, 5.0, O),
        bias_hid=rng.normal(0, 0.5, H),
        bias_out=rng.normal(0, 0.5, O),
    )
    spec.tau_mem_hid = rng.uniform(1e-3, 1.0, H)
    spec.tau_syn_hid = rng.uniform(1e-3, 1.0, (H, S))
    return spec


def _scaled(spec: FloatSpecification, c: float) -> FloatSpecification:
    return replace(
        spec,
        w_in=spec.w_in * c, w_rec=spec.w_rec * c, w_out=spec.w_out * c,
        threshold_hid=spec.threshold_hid * c, threshold_out=spec.threshold_out * c,
        bias_hid=spec.bias_hid * c, bias_out=spec.bias_out * c,
    )


def _integers(qspec):
    return {name: np.asarray(getattr(qspec, name)).tolist() for name in INT_FIELDS}


@pytest.mark.parametrize("tau,dt,expected", [
    (0.002, 0.001, 1),
    (1000.0, 0.001, 15),
    (0.001, 0.001, 0),
    (0.0005, 0.001, 0),
    (0.004, 0.001, 2),
])
def test_tau_to_dash(tau, dt, expected):
    assert tau_to_dash(tau, dt) == expected


def test_tau_to_dash_vectorized():
    dashes = tau_to_dash(np.array([0.001, 0.008, 100.0]), 0.001)
    assert dashes.tolist() == [0, 3, 15]


@pytest.mark.parametrize("tau,dt", [(0.0, 0.001), (-1.0, 0.001), (0.01, 0.0)])
def test_tau_to_dash_rejects_non_positive(tau, dt):
    with pytest.raises(DomainError):
        tau_to_dash(tau, dt)


def test_global_example():
    qspec = quantize_global(build_float_spec([[0.5]], [[-1.0]], [[1.0]], threshold_hid=[1.0]))
    assert qspec.scales["s_hidden"] == pytest.approx(127.0)
    assert qspec.w_in_q[0, 0, 0] == 64
    assert qspec.w_rec_q[0, 0, 0] == -127
    assert qspec.threshold_hid_q[0] == 127


def test_global_zero_weights():
    qspec = quantize_global(build_float_spec(np.zeros((2, 3)), np.zeros((3, 3)), np.zeros((3, 1)), threshold_hid=[0.2, 1.4, 3.0]))
    assert qspec.scales["s_hidden"] == 1.0
    assert qspec.scales["s_out"] == 1.0
    assert not np.any(qspec.w_in_q) and not np.any(qspec.w_rec_q) and not np.any(qspec.w_out_q)
    # 阈值取整后下限为 1
    assert qspec.threshold_hid_q.tolist() == [1, 1, 3]


def test_global_scale_invariance():
    rng = np.random.default_rng(11)
    spec = random_spec(rng, S=1)
    assert _integers(quantize_global(spec)) == _integers(quantize_global(_scaled(spec, 3.7)))


def test_global_scale_invariance_random():
    rng = np.random.default_rng(2024)
    for trial in range(1000):
        spec = random_spec(rng, S=int(rng.integers(1, 3)))
        c = float(rng.uniform(0.1, 10.0))
        assert _integers(quantize_global(spec)) == _integers(quantize_global(_scaled(spec, c))), (trial, c)


def test_global_idempotent_on_integer_weights():
    w_in = np.array([[127.0, -3.0], [5.0, 0.0]])
    w_rec = np.array([[0.0, 12.0], [-127.0, 1.0]])
    w_out = np.array([[127.0], [-64.0]])
    qspec = quantize_global(build_float_spec(w_in, w_rec, w_out, threshold_hid=[100.0, 200.0], threshold_out=[50.0]))
    np.testing.assert_array_equal(qspec.w_in_q[:, :, 0], w_in)
    np.testing.assert_array_equal(qspec.w_rec_q[:, :, 0], w_rec)
    np.testing.assert_array_equal(qspec.w_out_q, w_out)
    assert qspec.threshold_hid_q.tolist() == [100, 200]


def test_channel_example():
    qspec = quantize_channel(build_float_spec([[0.5], [0.25]], [[0.0]], [[1.0]]))
    assert qspec.scales["s_hidden"] == [pytest.approx(254.0)]
    assert qspec.w_in_q[:, 0, 0].tolist() == [127, 64]


def test_channel_per_neuron_scales():
    qspec = quantize_channel(build_float_spec([[0.5, 0.1]], np.zeros((2, 2)), [[1.0], [1.0]]))
    assert qspec.scales["s_hidden"] == [pytest.approx(254.0), pytest.approx(1270.0)]
    assert qspec.w_in_q[0, :, 0].tolist() == [127, 127]


def test_channel_zero_neuron():
    qspec = quantize_channel(build_float_spec([[0.0, 0.5]], np.zeros((2, 2)), [[1.0], [1.0]], threshold_hid=[2.6, 1.0]))
    assert qspec.scales["s_hidden"][0] == 1.0
    assert qspec.threshold_hid_q[0] == 3


@pytest.mark.parametrize("seed", range(10))
def test_channel_saturation(seed):
    qspec = quantize_channel(random_spec(np.random.default_rng(seed)))
    for n in range(qspec.H):
        incoming = np.concatenate([qspec.w_in_q[:, n, :].ravel(), qspec.w_rec_q[:, n, :].ravel()])
        assert np.max(np.abs(incoming)) == WEIGHT_Q_MAX
    for o in range(qspec.O):
        assert np.max(np.abs(qspec.w_out_q[:, o])) == WEIGHT_Q_MAX


@pytest.mark.parametrize("method", ["global", "channel"])
@pytest.mark.parametrize("seed", range(10))
def test_range_safety(method, seed):
    qspec = quantize(random_spec(np.random.default_rng(seed)), method)
    for name in ("w_in_q", "w_rec_q", "w_out_q"):
        arr = getattr(qspec, name)
        assert arr.min() >= -WEIGHT_Q_MAX and arr.max() <= WEIGHT_Q_MAX
    for name in ("threshold_hid_q", "threshold_out_q"):
        arr = getattr(qspec, name)
        assert arr.min() >= 1 and arr.max() <= THRESHOLD_MAX
    for name in ("bias_hid_q", "bias_out_q"):
        arr = getattr(qspec, name)
        assert arr.min() >= INT16_MIN and arr.max() <= INT16_MAX
    for name in ("dash_mem_hid", "dash_syn_hid", "dash_mem_out", "dash_syn_out"):
        arr = getattr(qspec, name)
        assert arr.min() >= 0 and arr.max() <= MAX_DASH


def test_threshold_overflow_is_reported_and_clamped():
    qspec = quantize_global(build_float_spec([[0.001]], [[0.0]], [[1.0]], threshold_hid=[1.0]))
    assert qspec.threshold_hid_q[0] == THRESHOLD_MAX
    assert len(qspec.overflows) == 1
    overflow = qspec.overflows[0]
    assert (overflow.population, overflow.index, overflow.parameter) == ("hidden", 0, "threshold")
    assert overflow.scaled == pytest.approx(127000.0)


def test_aliases_carried_through():
    spec = build_float_spec(np.ones((1, 2)), np.zeros((2, 2)), np.ones((2, 1)), aliases=[1, None])
    assert quantize_global(spec).aliases == [1, None]


def test_unknown_method_rejected():
    with pytest.raises(DomainError):
        quantize(build_float_spec([[1.0]], [[0.0]], [[1.0]]), "stochastic")


def test_quantized_file_round_trip(tmp_path):
    qspec = quantize_channel(random_spec(np.random.default_rng(5)))
    loaded = load_quantized(save_quantized(qspec, tmp_path / "network.qspec.json"))
    assert _integers(loaded) == _integers(qspec)
    assert loaded.hidden_scale().tolist() == pytest.approx(qspec.hidden_scale().tolist())
