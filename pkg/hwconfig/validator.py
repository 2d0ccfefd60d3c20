"""硬件配置校验器：规格表每一行对应一条规则"""
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Tuple

import numpy as np

from config.constants import (
    DASH_BITS,
    INT16_MAX,
    INT16_MIN,
    LIMITS_BY_ID,
    LONGEST_TAU_STEPS,
    MAX_ALIAS_TARGETS,
    MAX_DASH,
    MAX_HIDDEN_NEURONS,
    MAX_HIDDEN_SPIKES,
    MAX_HIDDEN_SYNAPSES,
    MAX_INPUT_CHANNELS,
    MAX_INPUT_SPIKES,
    MAX_OUTPUT_NEURONS,
    MAX_OUTPUT_SPIKES,
    MAX_OUTPUT_SYNAPSES,
    THRESHOLD_MAX,
    THRESHOLD_MIN,
    WEIGHT_HW_MAX,
    WEIGHT_HW_MIN,
)
from hwconfig.models import ARRAY_FIELDS, STATE_FIELDS, HardwareConfig

# 结构性检查（数组形状与声明维度一致），不属于规格表
STRUCTURE_RULE_ID = "STRUCT"


@dataclass
class Violation:
    limit_id: str
    name: str
    observed: object
    allowed: object

    def format(self) -> str:
        return f"[{self.limit_id}] {self.name}: observed {self.observed}, allowed {self.allowed}"


@dataclass
class ValidationReport:
    violations: List[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def names(self) -> List[str]:
        return [v.name for v in self.violations]

    def format(self) -> str:
        return "\n".join(v.format() for v in self.violations)


# 规则检查函数返回 (observed, allowed) 列表，空列表表示通过
RuleCheck = Callable[[HardwareConfig], List[Tuple[object, object]]]


def _values(arr) -> np.ndarray:
    return np.asarray(arr, dtype=np.int64).ravel() if arr is not None else np.zeros(0, dtype=np.int64)


def _out_of_range(arrays, low: int, high: int) -> List[Tuple[object, object]]:
    """返回第一个越界值（优先最极端的）"""
    values = np.concatenate([_values(a) for a in arrays]) if arrays else np.zeros(0, dtype=np.int64)
    bad = values[(values < low) | (values > high)]
    if bad.size == 0:
        return []
    worst = int(bad[np.argmax(np.abs(bad))])
    return [(worst, f"[{low}, {high}]")]


def _at_most(observed: int, limit: int, low: int = 0) -> List[Tuple[object, object]]:
    if low <= observed <= limit:
        return []
    return [(observed, limit)]


def _check_aliases(config: HardwareConfig) -> List[Tuple[object, object]]:
    problems = []
    for idx, entry in enumerate(config.aliases):
        if idx >= config.H and entry:
            problems.append((f"alias on non-hidden neuron {idx}", "hidden neurons only"))
            continue
        if len(entry) > MAX_ALIAS_TARGETS:
            problems.append((len(entry), MAX_ALIAS_TARGETS))
        for target in entry:
            if not 0 <= int(target) < config.H:
                problems.append((f"target {target}", f"[0, {config.H})"))
    return problems


def _check_longest_tau(config: HardwareConfig) -> List[Tuple[object, object]]:
    if not config.dt > 0:
        return [(f"dt={config.dt}", "dt > 0")]
    dashes = np.concatenate([_values(config.dash_mem_hid), _values(config.dash_syn_hid),
                             _values(config.dash_mem_out), _values(config.dash_syn_out)])
    if dashes.size == 0:
        return []
    longest = 2 ** int(max(dashes.max(), 0))
    if longest > LONGEST_TAU_STEPS:
        return [(f"{longest}·dt", f"{LONGEST_TAU_STEPS}·dt")]
    return []


def _dashes(config: HardwareConfig):
    return [config.dash_mem_hid, config.dash_syn_hid, config.dash_mem_out, config.dash_syn_out]


def _check_max_dash(config: HardwareConfig) -> List[Tuple[object, object]]:
    values = np.concatenate([_values(d) for d in _dashes(config)])
    if values.size and int(values.max()) > MAX_DASH:
        return [(int(values.max()), MAX_DASH)]
    return []


RULES: Dict[str, RuleCheck] = {
    "XY01": lambda c: _at_most(c.C, MAX_INPUT_CHANNELS, low=1),
    "XY02": lambda c: _at_most(c.input_spike_clamp, MAX_INPUT_SPIKES),
    "XY03": lambda c: _at_most(c.H, MAX_HIDDEN_NEURONS, low=1),
    "XY04": lambda c: _at_most(c.hidden_spike_clamp, MAX_HIDDEN_SPIKES),
    "XY05": lambda c: _at_most(c.S, MAX_HIDDEN_SYNAPSES, low=1),
    "XY06": _check_aliases,
    "XY07": lambda c: _at_most(c.O, MAX_OUTPUT_NEURONS, low=1),
    "XY08": lambda c: _at_most(c.output_spike_clamp, MAX_OUTPUT_SPIKES),
    "XY09": lambda c: _at_most(c.output_synapses, MAX_OUTPUT_SYNAPSES, low=1),
    "XY10": lambda c: _out_of_range([c.w_in, c.w_rec, c.w_out], WEIGHT_HW_MIN, WEIGHT_HW_MAX),
    "XY11": lambda c: _out_of_range([c.i_syn_hid_init, c.i_syn_out_init], INT16_MIN, INT16_MAX),
    "XY12": lambda c: _out_of_range([c.v_mem_hid_init, c.v_mem_out_init], INT16_MIN, INT16_MAX),
    "XY13": lambda c: _out_of_range([c.threshold_hid, c.threshold_out], THRESHOLD_MIN, THRESHOLD_MAX),
    "XY14": lambda c: _out_of_range(_dashes(c), 0, 2 ** DASH_BITS - 1),
    "XY15": _check_max_dash,
    "XY16": _check_longest_tau,
    "XY17": lambda c: _out_of_range([c.bias_hid, c.bias_out], INT16_MIN, INT16_MAX),
}


def _check_structure(config: HardwareConfig) -> List[Violation]:
    violations = []
    for name in ARRAY_FIELDS:
        actual = np.shape(getattr(config, name))
        expected = config.expected_shape(name)
        if actual != expected:
            violations.append(Violation(STRUCTURE_RULE_ID, f"shape of {name}", actual, expected))
    for name in STATE_FIELDS:
        value = getattr(config, name)
        if value is not None and np.shape(value) != config.expected_shape(name):
            violations.append(Violation(STRUCTURE_RULE_ID, f"shape of {name}", np.shape(value), config.expected_shape(name)))
    if len(config.aliases) < config.H:
        violations.append(Violation(STRUCTURE_RULE_ID, "length of aliases", len(config.aliases), config.H))
    return violations


def validate_config(config: HardwareConfig) -> ValidationReport:
    """
    校验硬件配置（不抛异常，问题全部写入报告）

    Returns:
        ValidationReport，每条违例包含 (规则ID, 规格名称, 观测值, 允许值)
    """
    report = ValidationReport()
    for limit_id, check in RULES.items():
        row = LIMITS_BY_ID[limit_id]
        for observed, allowed in check(config):
            report.violations.append(Violation(limit_id, row.name, observed, allowed))
    report.violations.extend(_check_structure(config))
    return report


def seal_config(config: HardwareConfig) -> ValidationReport:
    """校验并重新计算封印标志"""
    report = validate_config(config)
    config.sealed = report.ok
    return report
