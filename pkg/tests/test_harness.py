"""流水线、比较报告与命令行测试"""
import json
import logging
from pathlib import Path

import numpy as np
import pytest

from config.constants import (
    ARTIFACT_COMPARISON,
    ARTIFACT_CONFIG,
    ARTIFACT_GRAPH_SUMMARY,
    ARTIFACT_PLOT_ISYN,
    ARTIFACT_PLOT_SPIKES,
    ARTIFACT_PLOT_VMEM,
    ARTIFACT_QSPEC,
    ARTIFACT_RASTER,
    ARTIFACT_RECORDING_FLOAT,
    ARTIFACT_RECORDING_INT,
    ARTIFACT_SPEC,
    ARTIFACT_SUMMARY_FLOAT,
    ARTIFACT_SUMMARY_INT,
    EXIT_INTERNAL_ERROR,
    EXIT_OK,
    EXIT_PARSE_ERROR,
    EXIT_VALIDATION_FAILED,
)
from config.settings import Settings
from harness import (
    PipelineOptions,
    compare_recordings,
    load_network,
    run_pipeline,
    run_stage,
)
from harness.cli import exit_code_for, main
from hwconfig import config_from_specification, load_config, validate_config
from mapper import map_graph
from quantizer import quantize
from scripts.make_golden import GOLDEN_FILE, golden_options
from simulator import evolve, evolve_float, recording_from_csv_text
from stimulus import load_raster, poisson_raster
from utils.exceptions import (
    ConfigValidationError,
    MappingError,
    ParseError,
    PipelineStageError,
    ShapeError,
    UnsealedConfig,
)
from utils.helpers import file_sha256

from conftest import DEMO_NETWORK, build_config

ALL_ARTIFACTS = {
    ARTIFACT_SPEC,
    ARTIFACT_QSPEC,
    ARTIFACT_CONFIG,
    ARTIFACT_RASTER,
    ARTIFACT_RECORDING_INT,
    ARTIFACT_RECORDING_FLOAT,
    ARTIFACT_SUMMARY_INT,
    ARTIFACT_SUMMARY_FLOAT,
    ARTIFACT_COMPARISON,
    ARTIFACT_PLOT_SPIKES,
    ARTIFACT_PLOT_VMEM,
    ARTIFACT_PLOT_ISYN,
}


def _write_network(path: Path, inputs: int) -> Path:
    layers = [
        {"type": "linear", "rows": inputs, "cols": 3, "weights": {"init": "uniform", "low": -1, "high": 1}},
        {"type": "lif", "n": 3, "tau_mem": 0.02, "tau_syn": 0.004, "threshold": 1.0, "bias": 0.0},
        {"type": "linear", "rows": 3, "cols": 2, "weights": [[1.0, 0.5], [0.2, -0.3], [0.0, 1.0]]},
        {"type": "lif", "n": 2, "tau_mem": 0.02, "tau_syn": 0.004, "threshold": 1.0, "bias": 0.0},
    ]
    path.write_text(json.dumps({"name": path.stem, "layers": layers}), encoding="utf-8")
    return path


def _demo_recording(steps=30):
    network = load_network(DEMO_NETWORK)
    spec = map_graph(network.graph, network.dt)
    qspec = quantize(spec)
    config, is_valid, message = config_from_specification(qspec)
    assert is_valid, message
    raster = poisson_raster([50.0] * spec.C, steps, network.dt, seed=0)
    return spec, qspec, config, raster


# ---------------------------------------------------------------------------
# 网络描述文件
# ---------------------------------------------------------------------------

def test_demo_network_shape():
    network = load_network(DEMO_NETWORK)
    assert (network.graph.size_in, network.graph.size_out) == (16, 4)
    assert network.dt == 0.001
    spec = map_graph(network.graph, network.dt)
    assert (spec.C, spec.H, spec.O) == (16, 16, 4)
    assert spec.aliases == list(range(8, 16)) + [None] * 8


def test_network_loading_is_deterministic():
    first = map_graph(load_network(DEMO_NETWORK).graph, 0.001)
    second = map_graph(load_network(DEMO_NETWORK).graph, 0.001)
    np.testing.assert_array_equal(first.w_in, second.w_in)
    np.testing.assert_array_equal(first.w_rec, second.w_rec)


def test_network_file_accepts_bare_layer_list(tmp_path):
    path = tmp_path / "bare.json"
    path.write_text(json.dumps([
        {"type": "linear", "rows": 2, "cols": 2, "weights": [[1, 0], [0, 1]]},
        {"type": "lif", "n": 2, "tau_mem": 0.02, "tau_syn": [0.004, 0.008], "threshold": 1.0, "bias": 0.0},
    ]), encoding="utf-8")
    network = load_network(path)
    assert network.name == "bare"
    assert network.dt is None


@pytest.mark.parametrize("payload,location", [
    ('{"layers": [', None),
    ('{"layers": []}', "layers"),
    ('{"layers": [{"type": "conv"}]}', "layers[0].type"),
    ('{"layers": [{"type": "linear", "rows": 2, "cols": 2}]}', "layers[0].weights"),
    ('{"layers": [{"type": "linear", "rows": 2, "cols": 2, "weights": [[1, 2]]}]}', "layers[0].weights"),
])
def test_network_parse_errors(tmp_path, payload, location):
    path = tmp_path / "bad.json"
    path.write_text(payload, encoding="utf-8")
    with pytest.raises(ParseError) as exc:
        load_network(path)
    if location is not None:
        assert exc.value.location == location


# ---------------------------------------------------------------------------
# 比较报告
# ---------------------------------------------------------------------------

def test_compare_is_reflexive():
    _, _, config, raster = _demo_recording()
    recording = evolve(config, raster)
    report = compare_recordings(recording, recording)
    assert report.exact_match
    assert report.first_divergence_step is None
    assert report.relative_spike_diff == 0.0
    assert all(value == 0.0 for value in report.max_abs_diff.values())


def test_compare_reports_first_divergence():
    config = build_config(w_in=np.full((1, 1, 1), 3), threshold_hid=np.array([1000]))
    raster = np.ones((12, 1), dtype=np.int64)
    a = evolve(config, raster)
    b = evolve(config, raster)
    b.v_mem_hid[7, 0] += 1
    report = compare_recordings(a, b)
    assert not report.exact_match
    assert report.first_divergence_step == 7
    assert report.max_abs_diff["v_mem_hid"] == 1.0


def test_compare_shape_mismatch():
    config = build_config()
    with pytest.raises(ShapeError):
        compare_recordings(evolve(config, np.zeros((5, 1))), evolve(config, np.zeros((6, 1))))


def test_compare_uses_common_traces():
    config = build_config(bias_hid=np.array([100]), w_out=np.full((1, 1), 127))
    raster = np.zeros((10, 1), dtype=np.int64)
    report = compare_recordings(evolve(config, raster, record=False), evolve(config, raster))
    assert report.exact_match
    assert report.max_abs_diff == {}


def test_float_vs_int_report_is_finite():
    spec, qspec, config, raster = _demo_recording(steps=50)
    report = compare_recordings(evolve_float(spec, raster), evolve(config, raster), qspec=qspec, tolerance=0.25)
    assert report.is_finite()
    assert report.within_tolerance in (True, False)
    assert set(report.max_abs_diff) == {"v_mem_hid", "i_syn_hid", "v_mem_out", "i_syn_out"}


def test_demo_float_and_int_outputs_agree(tmp_path):
    options = golden_options(str(tmp_path))
    result = run_pipeline(DEMO_NETWORK, options)
    assert result.comparison.within_tolerance is True
    assert result.comparison.relative_spike_diff <= options.tolerance
    # 输出层每步最多 1 个脉冲，未饱和时总数明显低于上限
    for name in (ARTIFACT_RECORDING_INT, ARTIFACT_RECORDING_FLOAT):
        recording = recording_from_csv_text((tmp_path / name).read_text(encoding="utf-8"))
        total = int(recording.spikes_out.sum())
        assert 0 < total < 0.8 * recording.spikes_out.size, name
        assert recording.spikes_out.max() <= 1


def test_quantization_methods_differ_on_demo():
    spec = map_graph(load_network(DEMO_NETWORK).graph, 0.001)
    global_q, channel_q = quantize(spec, "global"), quantize(spec, "channel")
    assert not np.array_equal(global_q.w_in_q, channel_q.w_in_q)
    for qspec in (global_q, channel_q):
        _, is_valid, message = config_from_specification(qspec)
        assert is_valid, message


# ---------------------------------------------------------------------------
# 流水线
# ---------------------------------------------------------------------------

def test_pipeline_writes_all_artifacts(tmp_path):
    result = run_pipeline(DEMO_NETWORK, golden_options(str(tmp_path)))
    assert set(result.artifacts) == ALL_ARTIFACTS
    for path in result.artifacts.values():
        assert path.exists() and path.stat().st_size > 0
    assert result.comparison.is_finite()
    comparison = json.loads((tmp_path / ARTIFACT_COMPARISON).read_text(encoding="utf-8"))
    assert comparison["within_tolerance"] is True


def test_pipeline_is_byte_deterministic(tmp_path):
    first = run_pipeline(DEMO_NETWORK, golden_options(str(tmp_path / "a")))
    second = run_pipeline(DEMO_NETWORK, golden_options(str(tmp_path / "b")))
    for name in ALL_ARTIFACTS:
        assert first.artifacts[name].read_bytes() == second.artifacts[name].read_bytes(), name


def test_pipeline_matches_golden_hashes(tmp_path):
    assert GOLDEN_FILE.exists(), "缺少黄金哈希文件，请先运行 python3 scripts/make_golden.py"
    expected = json.loads(GOLDEN_FILE.read_text(encoding="utf-8"))
    result = run_pipeline(DEMO_NETWORK, golden_options(str(tmp_path)))
    actual = {name: file_sha256(path) for name, path in result.artifacts.items()}
    assert actual == expected


def test_pipeline_stages_are_isolated(tmp_path):
    run_pipeline(DEMO_NETWORK, golden_options(str(tmp_path)))
    config = load_config(tmp_path / ARTIFACT_CONFIG)
    raster = load_raster(tmp_path / ARTIFACT_RASTER, channels=config.C)
    recording = evolve(config, raster)
    assert recording.to_csv_text() == (tmp_path / ARTIFACT_RECORDING_INT).read_text(encoding="utf-8")


def test_pipeline_without_recording(tmp_path):
    options = golden_options(str(tmp_path))
    options.record = False
    result = run_pipeline(DEMO_NETWORK, options)
    assert ARTIFACT_PLOT_VMEM not in result.artifacts
    assert ARTIFACT_PLOT_ISYN not in result.artifacts
    header, first = (tmp_path / ARTIFACT_RECORDING_INT).read_text(encoding="utf-8").splitlines()[:2]
    assert first.split(",")[1] == "output"


def test_pipeline_reports_failing_stage(tmp_path):
    network = _write_network(tmp_path / "wide.json", inputs=17)
    with pytest.raises(PipelineStageError) as exc:
        run_pipeline(network, PipelineOptions(out_dir=str(tmp_path / "out"), steps=5))
    assert exc.value.stage == "map"
    assert isinstance(exc.value.cause, MappingError)
    assert "Max. input channels" in str(exc.value)


def test_run_stage_wraps_errors():
    def _fail():
        raise ValueError("boom")
    with pytest.raises(PipelineStageError) as exc:
        run_stage("demo", _fail)
    assert exc.value.stage == "demo"
    assert "[demo]" in str(exc.value)


@pytest.mark.parametrize("error,code", [
    (MappingError("x"), EXIT_VALIDATION_FAILED),
    (ConfigValidationError("x"), EXIT_VALIDATION_FAILED),
    (UnsealedConfig("x"), EXIT_VALIDATION_FAILED),
    (ParseError("x", location="a:1"), EXIT_PARSE_ERROR),
    (ShapeError("x"), EXIT_PARSE_ERROR),
    (PipelineStageError("build", ParseError("x")), EXIT_PARSE_ERROR),
    (PipelineStageError("validate", ConfigValidationError("x")), EXIT_VALIDATION_FAILED),
    (RuntimeError("x"), EXIT_INTERNAL_ERROR),
])
def test_exit_code_mapping(error, code):
    assert exit_code_for(error) == code


# ---------------------------------------------------------------------------
# 命令行
# ---------------------------------------------------------------------------

def test_cli_run_demo(tmp_path, capsys):
    code = main(["--out-dir", str(tmp_path), "run", str(DEMO_NETWORK), "--steps", "40", "--seed", "3"])
    assert code == EXIT_OK
    for name in ALL_ARTIFACTS:
        assert (tmp_path / name).exists()
    assert "输出脉冲相对差" in capsys.readouterr().out


def test_cli_rejects_too_many_inputs(tmp_path):
    network = _write_network(tmp_path / "wide.json", inputs=17)
    assert main(["--out-dir", str(tmp_path / "out"), "run", str(network), "--steps", "5"]) == EXIT_VALIDATION_FAILED


def test_cli_rejects_malformed_network(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"layers": [', encoding="utf-8")
    assert main(["--out-dir", str(tmp_path / "out"), "run", str(path)]) == EXIT_PARSE_ERROR


def test_cli_build_writes_graph_summary(tmp_path, capsys):
    assert main(["build", str(DEMO_NETWORK), "--out-dir", str(tmp_path)]) == EXIT_OK
    summary = (tmp_path / ARTIFACT_GRAPH_SUMMARY).read_text(encoding="utf-8")
    assert "depth  module" in summary
    assert "hidden_block" in summary
    assert summary == capsys.readouterr().out


def test_cli_stage_by_stage(tmp_path):
    out = str(tmp_path)
    assert main(["map", str(DEMO_NETWORK), "--out-dir", out]) == EXIT_OK
    assert main(["quantize", str(tmp_path / ARTIFACT_SPEC), "--method", "channel", "--out-dir", out]) == EXIT_OK
    assert main(["validate", str(tmp_path / ARTIFACT_QSPEC), "--out-dir", out]) == EXIT_OK
    assert main(["validate", str(tmp_path / ARTIFACT_CONFIG), "--out-dir", out]) == EXIT_OK
    rates = ",".join(["40"] * 16)
    assert main(["stimulate", "--rates", rates, "--steps", "30", "--seed", "5", "--out-dir", out]) == EXIT_OK
    assert main(["simulate", str(tmp_path / ARTIFACT_CONFIG), str(tmp_path / ARTIFACT_RASTER), "--out-dir", out]) == EXIT_OK
    assert main(["simulate", str(tmp_path / ARTIFACT_SPEC), str(tmp_path / ARTIFACT_RASTER),
                 "--backend", "float", "--out-dir", out]) == EXIT_OK
    assert main(["compare", str(tmp_path / ARTIFACT_RECORDING_FLOAT), str(tmp_path / ARTIFACT_RECORDING_INT),
                 "--qspec", str(tmp_path / ARTIFACT_QSPEC), "--out-dir", out]) == EXIT_OK
    report = json.loads((tmp_path / ARTIFACT_COMPARISON).read_text(encoding="utf-8"))
    assert set(report["max_abs_diff"]) == {"v_mem_hid", "i_syn_hid", "v_mem_out", "i_syn_out"}


def test_cli_validate_tampered_config(tmp_path):
    data = json.loads((_save_demo_config(tmp_path)).read_text(encoding="utf-8"))
    data["dash_mem_hid"][0] = 16
    path = tmp_path / "tampered.xcfg.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    assert not validate_config(load_config(path)).ok
    assert main(["validate", str(path), "--out-dir", str(tmp_path)]) == EXIT_VALIDATION_FAILED


def _save_demo_config(tmp_path) -> Path:
    assert main(["map", str(DEMO_NETWORK), "--out-dir", str(tmp_path)]) == EXIT_OK
    assert main(["quantize", str(tmp_path / ARTIFACT_SPEC), "--out-dir", str(tmp_path)]) == EXIT_OK
    assert main(["validate", str(tmp_path / ARTIFACT_QSPEC), "--out-dir", str(tmp_path)]) == EXIT_OK
    return tmp_path / ARTIFACT_CONFIG


def test_cli_verify_small_batch(tmp_path, capsys):
    code = main(["verify", "--count", "4", "--steps", "20", "--jobs", "2", "--seed", "1", "--out-dir", str(tmp_path)])
    assert code == EXIT_OK
    assert "4/4" in capsys.readouterr().out


def test_settings_validate(monkeypatch):
    assert Settings.validate()
    monkeypatch.setattr(Settings, "DT", 0.0)
    with pytest.raises(ValueError):
        Settings.validate()
    monkeypatch.setattr(Settings, "DT", 0.001)
    monkeypatch.setattr(Settings, "QUANTIZE_METHOD", "stochastic")
    with pytest.raises(ValueError):
        Settings.validate()


def test_settings_load_from_env(monkeypatch, tmp_path):
    monkeypatch.setenv("XYLO_STEPS", "77")
    monkeypatch.setenv("XYLO_QUANTIZE_METHOD", "channel")
    monkeypatch.setattr(Settings, "STEPS", 200)
    monkeypatch.setattr(Settings, "QUANTIZE_METHOD", "global")
    Settings.load_from_env(env_file=str(tmp_path / "missing.env"), force=True)
    assert Settings.STEPS == 77
    assert Settings.QUANTIZE_METHOD == "channel"


def test_module_loggers_share_root_handlers():
    from utils.logger import ROOT_LOGGER_NAME, setup_logger

    module_logger = setup_logger("harness.pipeline")
    assert module_logger.name == f"{ROOT_LOGGER_NAME}.harness.pipeline"
    assert not module_logger.handlers
    assert len(logging.getLogger(ROOT_LOGGER_NAME).handlers) == 2
    assert setup_logger(f"{ROOT_LOGGER_NAME}.stimulus") is logging.getLogger(f"{ROOT_LOGGER_NAME}.stimulus")


def test_cli_verbosity_flags(tmp_path):
    from utils import logger as log_module

    args = ["verify", "--count", "1", "--steps", "5", "--out-dir", str(tmp_path)]
    assert main(["-q"] + args) == EXIT_OK
    assert log_module._console_handler.level == logging.WARNING
    assert main(args) == EXIT_OK
    assert log_module._console_handler.level == logging.INFO
