"""命令行入口：逐阶段子命令与完整流水线"""
import sys
from pathlib import Path

# 添加项目根目录到 Python 路径
project_root = Path(__file__).parent.parent
if str(project_root) not in sys.path:
    sys.path.insert(0, str(project_root))

import argparse
import logging
from typing import List, Optional

from config.constants import (
    ARTIFACT_COMPARISON,
    ARTIFACT_CONFIG,
    ARTIFACT_GRAPH_SUMMARY,
    ARTIFACT_QSPEC,
    ARTIFACT_RASTER,
    ARTIFACT_RECORDING_FLOAT,
    ARTIFACT_RECORDING_INT,
    ARTIFACT_SPEC,
    ARTIFACT_SUMMARY_FLOAT,
    ARTIFACT_SUMMARY_INT,
    BACKEND_FLOAT,
    BACKEND_INT,
    CONFIG_SUFFIX,
    EXIT_INTERNAL_ERROR,
    EXIT_OK,
    EXIT_PARSE_ERROR,
    EXIT_VALIDATION_FAILED,
    QUANTIZE_METHODS,
)
from config.settings import Settings
from harness.comparison import compare_recordings
from harness.network_loader import load_network
from harness.pipeline import PipelineOptions, run_pipeline, validated_config
from harness.verification import run_equivalence
from hwconfig.data_format import load_config, save_config
from hwconfig.validator import validate_config
from mapper.mapper import map_graph
from mapper.specification import load_specification, save_specification
from quantizer.models import load_quantized, save_quantized
from quantizer.quantize_methods import quantize
from simulator.float_sim import evolve_float
from simulator.recording import recording_from_csv_text
from simulator.xylo_sim import evolve
from stimulus.poisson import load_raster, poisson_raster, save_raster
from utils.exceptions import (
    ConfigValidationError,
    ConstructionError,
    DomainError,
    EncapsulationError,
    GraphConnectionError,
    MappingError,
    ParseError,
    PipelineStageError,
    ShapeError,
    UnsealedConfig,
)
from utils.formatter import (
    format_comparison_summary,
    format_graph_summary,
    format_validation_message,
)
from utils.helpers import canonical_dumps, write_text
from utils.logger import set_console_level, setup_logger

logger = setup_logger(__name__)

# 输入被拒绝（文件或参数不合法）
INPUT_ERRORS = (ParseError, ConstructionError, GraphConnectionError, EncapsulationError, DomainError, ShapeError)
# 网络或配置超出硬件能力
VALIDATION_ERRORS = (MappingError, ConfigValidationError, UnsealedConfig)


def exit_code_for(error: Exception) -> int:
    """异常 → 退出码（阶段异常按其原因判断）"""
    if isinstance(error, PipelineStageError):
        error = error.cause
    if isinstance(error, VALIDATION_ERRORS):
        return EXIT_VALIDATION_FAILED
    if isinstance(error, INPUT_ERRORS):
        return EXIT_PARSE_ERROR
    return EXIT_INTERNAL_ERROR


def _parse_rates(text: str) -> List[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"发放率必须是逗号分隔的数值: {text!r}")


def build_parser() -> argparse.ArgumentParser:
    # 全局参数既可写在子命令前也可写在子命令后；子命令中默认 SUPPRESS，避免覆盖前面的值
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dt", type=float, default=argparse.SUPPRESS, help="时间步长（秒）")
    common.add_argument("--out-dir", dest="out_dir", default=argparse.SUPPRESS, help="产物目录")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="随机种子")

    parser = argparse.ArgumentParser(prog="xylo-toolchain", description="Xylo 类 SNN 工具链")
    parser.add_argument("--dt", type=float, default=None, help="时间步长（秒）")
    parser.add_argument("--out-dir", dest="out_dir", default=None, help="产物目录")
    parser.add_argument("--seed", type=int, default=None, help="随机种子")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="控制台输出 DEBUG 日志")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="控制台只输出警告与错误")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", parents=[common], help="解析网络描述并输出图摘要")
    p.add_argument("network")

    p = sub.add_parser("map", parents=[common], help="映射为浮点规格")
    p.add_argument("network")

    p = sub.add_parser("quantize", parents=[common], help="量化浮点规格")
    p.add_argument("spec")
    p.add_argument("--method", choices=QUANTIZE_METHODS, default=None)

    p = sub.add_parser("validate", parents=[common], help=f"校验量化规格或 {CONFIG_SUFFIX} 配置")
    p.add_argument("source")

    p = sub.add_parser("stimulate", parents=[common], help="生成泊松输入栅格")
    p.add_argument("--rates", type=_parse_rates, required=True, help="每通道发放率（Hz），逗号分隔")
    p.add_argument("--steps", type=int, default=None)

    p = sub.add_parser("simulate", parents=[common], help="仿真（int 读配置，float 读浮点规格）")
    p.add_argument("model")
    p.add_argument("raster")
    p.add_argument("--backend", choices=(BACKEND_INT, BACKEND_FLOAT), default=BACKEND_INT)
    p.add_argument("--no-record", dest="record", action="store_false")

    p = sub.add_parser("compare", parents=[common], help="比较两份记录 CSV")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--qspec", default=None, help="量化规格，用于把整数记录反缩放")

    p = sub.add_parser("run", parents=[common], help="运行完整流水线")
    p.add_argument("network")
    p.add_argument("--quantize", dest="method", choices=QUANTIZE_METHODS, default=None)
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--rate", type=float, default=None, help="每通道发放率（Hz）")
    p.add_argument("--no-record", dest="record", action="store_false")

    p = sub.add_parser("verify", parents=[common], help="整数仿真器与参考实现的一致性验证")
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--jobs", type=int, default=1)
    return parser


def _out(args) -> Path:
    return Path(args.out_dir or Settings.OUT_DIR)


def _seed(args) -> int:
    return Settings.SEED if args.seed is None else args.seed


def cmd_build(args) -> int:
    network = load_network(args.network, seed=_seed(args))
    summary = format_graph_summary(network.graph)
    write_text(_out(args) / ARTIFACT_GRAPH_SUMMARY, summary)
    print(summary, end="")
    return EXIT_OK


def cmd_map(args) -> int:
    network = load_network(args.network, seed=_seed(args))
    spec = map_graph(network.graph, args.dt or network.dt or Settings.DT)
    path = save_specification(spec, _out(args) / ARTIFACT_SPEC)
    print(path)
    return EXIT_OK


def cmd_quantize(args) -> int:
    spec = load_specification(args.spec)
    qspec = quantize(spec, args.method or Settings.QUANTIZE_METHOD)
    path = save_quantized(qspec, _out(args) / ARTIFACT_QSPEC)
    print(path)
    return EXIT_OK


def cmd_validate(args) -> int:
    if args.source.endswith(CONFIG_SUFFIX):
        report = validate_config(load_config(args.source))
        print(format_validation_message(report))
        return EXIT_OK if report.ok else EXIT_VALIDATION_FAILED
    config = validated_config(load_quantized(args.source))
    path = save_config(config, _out(args) / ARTIFACT_CONFIG)
    print(path)
    return EXIT_OK


def cmd_stimulate(args) -> int:
    steps = Settings.STEPS if args.steps is None else args.steps
    raster = poisson_raster(args.rates, steps, args.dt or Settings.DT, _seed(args))
    path = save_raster(raster, _out(args) / ARTIFACT_RASTER)
    print(path)
    return EXIT_OK


def cmd_simulate(args) -> int:
    out = _out(args)
    if args.backend == BACKEND_INT:
        config = load_config(args.model)
        recording = evolve(config, load_raster(args.raster, channels=config.C), record=args.record)
        csv_name, summary_name = ARTIFACT_RECORDING_INT, ARTIFACT_SUMMARY_INT
    else:
        spec = load_specification(args.model)
        recording = evolve_float(spec, load_raster(args.raster, channels=spec.C), record=args.record)
        csv_name, summary_name = ARTIFACT_RECORDING_FLOAT, ARTIFACT_SUMMARY_FLOAT
    write_text(out / csv_name, recording.to_csv_text())
    write_text(out / summary_name, canonical_dumps(recording.summary()))
    print(out / csv_name)
    return EXIT_OK


def cmd_compare(args) -> int:
    a = recording_from_csv_text(Path(args.a).read_text(encoding="utf-8"), location=args.a)
    b = recording_from_csv_text(Path(args.b).read_text(encoding="utf-8"), location=args.b)
    qspec = load_quantized(args.qspec) if args.qspec else None
    report = compare_recordings(a, b, qspec=qspec, tolerance=Settings.SPIKE_TOLERANCE)
    write_text(_out(args) / ARTIFACT_COMPARISON, canonical_dumps(report.to_dict()))
    print(format_comparison_summary(report))
    return EXIT_OK


def cmd_run(args) -> int:
    options = PipelineOptions(
        out_dir=args.out_dir,
        dt=args.dt,
        seed=args.seed,
        steps=args.steps,
        input_rate=args.rate,
        quantize_method=args.method,
        record=args.record,
    )
    result = run_pipeline(args.network, options)
    for name in sorted(result.artifacts):
        print(result.artifacts[name])
    print(format_comparison_summary(result.comparison))
    return EXIT_OK


def cmd_verify(args) -> int:
    result = run_equivalence(_seed(args), count=args.count, steps=args.steps, jobs=args.jobs)
    print(f"{result.total - len(result.failures)}/{result.total} 个配置一致")
    for case in result.failures:
        print(f"   • 用例 {case.index}: 首次分歧步 {case.first_divergence_step}, 不变量问题 {case.invariant_problems}")
    return EXIT_OK if result.ok else EXIT_INTERNAL_ERROR


COMMANDS = {
    "build": cmd_build,
    "map": cmd_map,
    "quantize": cmd_quantize,
    "validate": cmd_validate,
    "stimulate": cmd_stimulate,
    "simulate": cmd_simulate,
    "compare": cmd_compare,
    "run": cmd_run,
    "verify": cmd_verify,
}


def main(argv: Optional[List[str]] = None) -> int:
    """命令行主函数，返回退出码"""
    args = build_parser().parse_args(argv)
    set_console_level(logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO)
    try:
        Settings.load_from_env()
        Settings.validate()
    except ValueError as e:
        logger.error(f"❌ 配置无效: {e}")
        print(f"❌ 配置无效: {e}", file=sys.stderr)
        return EXIT_PARSE_ERROR

    try:
        return COMMANDS[args.command](args)
    except Exception as e:
        code = exit_code_for(e)
        if code == EXIT_INTERNAL_ERROR:
            logger.error(f"❌ {args.command} 执行失败: {e}", exc_info=True)
        else:
            logger.error(f"❌ {args.command} 执行失败: {e}")
        print(f"❌ {e}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
