"""硬件配置生成、校验与文件格式测试"""
import json

import numpy as np
import pytest

from config.constants import LIMITS_BY_ID, HARDWARE_LIMITS
from hwconfig import (
    RULES,
    config_from_specification,
    deserialize_config,
    load_config,
    save_config,
    serialize_config,
    validate_config,
)
from quantizer.models import QuantizedSpecification
from utils.exceptions import ParseError
from utils.formatter import format_validation_message

from conftest import build_config


def _state(shape, value):
    return np.full(shape, value, dtype=np.int64)


# 每条规则: (在上限处的配置, 越过上限的配置)
BOUNDARY_CASES = {
    "XY01": (lambda: build_config(C=16, seal=False), lambda: build_config(C=17, seal=False)),
    "XY02": (lambda: build_config(input_spike_clamp=15, seal=False),
             lambda: build_config(input_spike_clamp=16, seal=False)),
    "XY03": (lambda: build_config(H=1000, seal=False), lambda: build_config(H=1001, seal=False)),
    "XY04": (lambda: build_config(hidden_spike_clamp=31, seal=False),
             lambda: build_config(hidden_spike_clamp=32, seal=False)),
    "XY05": (lambda: build_config(S=2, seal=False), lambda: build_config(S=3, seal=False)),
    "XY06": (lambda: build_config(H=2, aliases=[[1], []], seal=False),
             lambda: build_config(H=3, aliases=[[1, 2], [], []], seal=False)),
    "XY07": (lambda: build_config(O=8, seal=False), lambda: build_config(O=9, seal=False)),
    "XY08": (lambda: build_config(output_spike_clamp=1, seal=False),
             lambda: build_config(output_spike_clamp=2, seal=False)),
    "XY09": (lambda: build_config(output_synapses=1, seal=False),
             lambda: build_config(output_synapses=2, seal=False)),
    "XY10": (lambda: build_config(w_in=_state((1, 1, 1), 127), w_out=_state((1, 1), -128), seal=False),
             lambda: build_config(w_in=_state((1, 1, 1), 128), seal=False)),
    "XY11": (lambda: build_config(i_syn_hid_init=_state((1, 1), 32767), seal=False),
             lambda: build_config(i_syn_hid_init=_state((1, 1), 32768), seal=False)),
    "XY12": (lambda: build_config(v_mem_out_init=_state(1, -32768), seal=False),
             lambda: build_config(v_mem_out_init=_state(1, -32769), seal=False)),
    "XY13": (lambda: build_config(threshold_hid=_state(1, 32767), threshold_out=_state(1, 1), seal=False),
             lambda: build_config(threshold_hid=_state(1, 32768), seal=False)),
    "XY14": (lambda: build_config(dash_syn_out=_state(1, 0), seal=False),
             lambda: build_config(dash_syn_out=_state(1, -1), seal=False)),
    "XY15": (lambda: build_config(dash_mem_hid=_state(1, 15), seal=False),
             lambda: build_config(dash_mem_hid=_state(1, 16), seal=False)),
    "XY16": (lambda: build_config(dash_syn_hid=_state((1, 1), 15), seal=False),
             lambda: build_config(dash_syn_hid=_state((1, 1), 16), seal=False)),
    "XY17": (lambda: build_config(bias_hid=_state(1, 32767), bias_out=_state(1, -32768), seal=False),
             lambda: build_config(bias_out=_state(1, 32768), seal=False)),
}


def make_qspec(C=2, H=3, O=2, S=1, **overrides) -> QuantizedSpecification:
    fields = dict(
        dt=1e-3, C=C, H=H, O=O, S=S,
        w_in_q=np.ones((C, H, S), dtype=np.int64),
        w_rec_q=np.zeros((H, H, S), dtype=np.int64),
        w_out_q=np.ones((H, O), dtype=np.int64),
        threshold_hid_q=np.full(H, 10, dtype=np.int64),
        threshold_out_q=np.full(O, 10, dtype=np.int64),
        bias_hid_q=np.zeros(H, dtype=np.int64),
        bias_out_q=np.zeros(O, dtype=np.int64),
        dash_mem_hid=np.full(H, 4, dtype=np.int64),
        dash_syn_hid=np.full((H, S), 2, dtype=np.int64),
        dash_mem_out=np.full(O, 4, dtype=np.int64),
        dash_syn_out=np.full(O, 2, dtype=np.int64),
        aliases=[None] * H,
        scales={"method": "global", "s_hidden": 1.0, "s_out": 1.0},
    )
    fields.update(overrides)
    return QuantizedSpecification(**fields)


def random_config(seed: int):
    rng = np.random.default_rng(seed)
    C, H, O, S = 5, 6, 3, 2
    return build_config(
        C=C, H=H, O=O, S=S,
        w_in=rng.integers(-128, 128, (C, H, S)),
        w_rec=rng.integers(-128, 128, (H, H, S)),
        w_out=rng.integers(-128, 128, (H, O)),
        threshold_hid=rng.integers(1, 32768, H),
        threshold_out=rng.integers(1, 32768, O),
        bias_hid=rng.integers(-32768, 32768, H),
        bias_out=rng.integers(-32768, 32768, O),
        dash_mem_hid=rng.integers(0, 16, H),
        dash_syn_hid=rng.integers(0, 16, (H, S)),
        dash_mem_out=rng.integers(0, 16, O),
        dash_syn_out=rng.integers(0, 16, O),
        aliases=[[3], [], [5], [], [], []],
        v_mem_hid_init=rng.integers(-100, 100, H),
        i_syn_out_init=rng.integers(-100, 100, O),
        dt=0.001,
    )


def test_every_limit_has_exactly_one_rule():
    assert [row.limit_id for row in HARDWARE_LIMITS] == list(RULES)
    assert len(RULES) == 17


def test_boundary_suite_covers_every_rule():
    assert set(BOUNDARY_CASES) == set(RULES)


@pytest.mark.parametrize("limit_id", sorted(BOUNDARY_CASES))
def test_limit_accepted_at_boundary(limit_id):
    at_limit, _ = BOUNDARY_CASES[limit_id]
    report = validate_config(at_limit())
    assert report.ok, report.format()


@pytest.mark.parametrize("limit_id", sorted(BOUNDARY_CASES))
def test_limit_rejected_past_boundary(limit_id):
    _, past_limit = BOUNDARY_CASES[limit_id]
    report = validate_config(past_limit())
    assert not report.ok
    assert limit_id in [v.limit_id for v in report.violations]
    assert LIMITS_BY_ID[limit_id].name in report.format()


def test_dash_16_reports_observed_and_allowed():
    report = validate_config(build_config(dash_mem_hid=_state(1, 16), seal=False))
    row = [v for v in report.violations if v.limit_id == "XY15"][0]
    assert (row.name, row.observed, row.allowed) == ("Max. bit-shift decay value", 16, 15)


def test_alias_on_output_neuron_rejected():
    config = build_config(H=1, aliases=[[], [0]], seal=False)
    report = validate_config(config)
    assert "alias targets (hidden neurons only)" in report.format()


def test_alias_target_out_of_range_rejected():
    report = validate_config(build_config(H=2, aliases=[[2], []], seal=False))
    assert "XY06" in [v.limit_id for v in report.violations]


def test_all_limits_at_boundary_together():
    config = build_config(C=16, H=1000, O=8, S=2, seal=False)
    config.w_in[0, 0, 0] = 127
    config.w_rec[0, 1, 1] = -128
    config.threshold_out[:] = 32767
    config.dash_mem_out[:] = 15
    config.aliases[0] = [999]
    assert validate_config(config).ok


def test_shape_mismatch_is_structural_violation():
    config = build_config(H=2, seal=False)
    config.w_out = np.zeros((3, 1), dtype=np.int64)
    report = validate_config(config)
    assert not report.ok
    assert "shape of w_out" in report.names()


def test_config_from_valid_specification():
    config, is_valid, message = config_from_specification(make_qspec())
    assert is_valid
    assert message == ""
    assert config.sealed
    assert (config.C, config.H, config.O) == (2, 3, 2)


def test_config_from_specification_at_limits():
    _, is_valid, message = config_from_specification(make_qspec(C=16, H=1000, O=8, S=2))
    assert is_valid, message


def test_config_from_specification_too_many_hidden_neurons():
    config, is_valid, message = config_from_specification(make_qspec(H=1001))
    assert not is_valid
    assert not config.sealed
    assert "Max. hidden LIF neurons" in message


def test_config_from_specification_weight_out_of_range():
    qspec = make_qspec()
    qspec.w_rec_q[1, 2, 0] = 200
    _, is_valid, message = config_from_specification(qspec)
    assert not is_valid
    assert "Weight bit-depth" in message


def test_config_from_specification_converts_aliases():
    config, is_valid, _ = config_from_specification(make_qspec(aliases=[2, None, None]))
    assert is_valid
    assert config.aliases == [[2], [], []]
    assert config.alias_targets() == [2, None, None]


def test_validation_message_lists_rows():
    report = validate_config(build_config(C=17, dash_mem_hid=_state(1, 16), seal=False))
    message = format_validation_message(report)
    assert message.startswith("❌")
    assert "Max. input channels" in message
    assert "Max. bit-shift decay value" in message
    assert format_validation_message(validate_config(build_config())).startswith("✅")


@pytest.mark.parametrize("seed", range(5))
def test_serialize_round_trip(seed):
    config = random_config(seed)
    restored = deserialize_config(serialize_config(config))
    assert restored == config
    assert restored.sealed


def test_serialization_is_canonical():
    payload = serialize_config(random_config(1))
    assert payload.endswith(b"\n")
    assert payload == serialize_config(deserialize_config(payload))
    data = json.loads(payload)
    assert list(data) == sorted(data)
    assert data["dt"] == "0.001"
    assert "sealed" not in data


def test_tampered_weight_is_not_sealed():
    data = json.loads(serialize_config(build_config(C=2, H=2)))
    data["w_in"][0][1][0] = 999
    config = deserialize_config(json.dumps(data).encode("utf-8"))
    assert not config.sealed
    report = validate_config(config)
    assert "Weight bit-depth" in report.names()


def test_sealed_flag_in_input_is_ignored():
    data = json.loads(serialize_config(build_config(C=17, seal=False)))
    data["sealed"] = True
    assert not deserialize_config(json.dumps(data).encode("utf-8")).sealed


def test_truncated_payload_raises_parse_error():
    payload = serialize_config(random_config(2))
    with pytest.raises(ParseError) as exc:
        deserialize_config(payload[: len(payload) // 2])
    assert exc.value.location.startswith("line ")


def test_missing_field_raises_parse_error():
    data = json.loads(serialize_config(build_config()))
    del data["threshold_hid"]
    with pytest.raises(ParseError) as exc:
        deserialize_config(json.dumps(data).encode("utf-8"))
    assert exc.value.location == "threshold_hid"


def test_non_object_payload_raises_parse_error():
    with pytest.raises(ParseError):
        deserialize_config(b"[1, 2, 3]")


@pytest.mark.parametrize("key,value", [
    ("w_in", []),
    ("w_out", [[1]]),
    ("threshold_hid", [1, 2, 3]),
    ("H", -1),
    ("S", -2),
    ("aliases", [[1.7], []]),
    ("aliases", [[True], []]),
])
def test_malformed_field_raises_parse_error(key, value):
    data = json.loads(serialize_config(build_config(C=2, H=2)))
    data[key] = value
    with pytest.raises(ParseError) as exc:
        deserialize_config(json.dumps(data).encode("utf-8"))
    assert exc.value.location == key


def test_zero_sized_dims_round_trip():
    config = build_config(C=0, seal=False)
    restored = deserialize_config(serialize_config(config))
    assert restored.w_in.shape == (0, config.H, config.S)


def test_save_and_load_config(tmp_path):
    config = random_config(3)
    path = save_config(config, tmp_path / "network.xcfg.json")
    assert load_config(path) == config


def test_check_config_script(tmp_path, monkeypatch, capsys):
    from scripts import check_config

    good = save_config(random_config(4), tmp_path / "good.xcfg.json")
    monkeypatch.setattr("sys.argv", ["check_config.py", str(good)])
    assert check_config.main() == 0
    assert "✅ 硬件配置校验通过" in capsys.readouterr().out

    data = json.loads(good.read_text(encoding="utf-8"))
    data["threshold_out"][0] = 40000
    bad = tmp_path / "bad.xcfg.json"
    bad.write_text(json.dumps(data), encoding="utf-8")
    monkeypatch.setattr("sys.argv", ["check_config.py", str(bad)])
    assert check_config.main() == 2
    assert "❌" in capsys.readouterr().out
