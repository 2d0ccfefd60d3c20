"""黄金模型一致性验证：随机配置 × 随机栅格，整数仿真器与标量参考实现逐值比较"""
import asyncio
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from config.constants import MAX_DASH, MAX_HIDDEN_SYNAPSES, MAX_INPUT_CHANNELS, MAX_INPUT_SPIKES
from harness.comparison import compare_recordings
from hwconfig.models import HardwareConfig
from hwconfig.validator import seal_config
from simulator.reference import reference_evolve
from simulator.xylo_sim import evolve
from utils.exceptions import ConfigValidationError
from utils.logger import setup_logger

logger = setup_logger(__name__)

MAX_RANDOM_HIDDEN = 16
MAX_RANDOM_OUTPUT = 2


def random_config(rng: np.random.Generator, with_aliases: bool) -> HardwareConfig:
    """
    生成一个随机的合法（已封印）配置：H ≤ 16, O ≤ 2, S ∈ {1, 2}

    Raises:
        ConfigValidationError: 生成结果未通过校验（不应发生）
    """
    C = int(rng.integers(1, MAX_INPUT_CHANNELS + 1))
    H = int(rng.integers(1, MAX_RANDOM_HIDDEN + 1))
    O = int(rng.integers(1, MAX_RANDOM_OUTPUT + 1))
    S = int(rng.integers(1, MAX_HIDDEN_SYNAPSES + 1))

    aliases: List[List[int]] = [[] for _ in range(H)]
    if with_aliases and H > 1:
        for src in range(H):
            if rng.random() < 0.4:
                target = int(rng.integers(0, H - 1))
                aliases[src] = [target if target < src else target + 1]

    config = HardwareConfig(
        dt=1e-3,
        C=C,
        H=H,
        O=O,
        S=S,
        w_in=rng.integers(-128, 128, size=(C, H, S)),
        w_rec=rng.integers(-128, 128, size=(H, H, S)),
        w_out=rng.integers(-128, 128, size=(H, O)),
        threshold_hid=rng.integers(1, 2000, size=H),
        threshold_out=rng.integers(1, 2000, size=O),
        bias_hid=rng.integers(-100, 101, size=H),
        bias_out=rng.integers(-100, 101, size=O),
        dash_mem_hid=rng.integers(0, MAX_DASH + 1, size=H),
        dash_syn_hid=rng.integers(0, MAX_DASH + 1, size=(H, S)),
        dash_mem_out=rng.integers(0, MAX_DASH + 1, size=O),
        dash_syn_out=rng.integers(0, MAX_DASH + 1, size=O),
        aliases=aliases,
    )
    # 少数配置带随机初始状态，覆盖饱和边界附近
    if rng.random() < 0.25:
        config.v_mem_hid_init = rng.integers(-32768, 32768, size=H)
        config.i_syn_hid_init = rng.integers(-32768, 32768, size=(H, S))
        config.v_mem_out_init = rng.integers(-32768, 32768, size=O)
        config.i_syn_out_init = rng.integers(-32768, 32768, size=O)

    report = seal_config(config)
    if not report.ok:
        raise ConfigValidationError(f"随机配置未通过校验:\n{report.format()}", report.violations)
    return config


def random_raster(rng: np.random.Generator, steps: int, channels: int) -> np.ndarray:
    """稀疏随机栅格，偶尔出现满计数"""
    counts = rng.integers(0, 3, size=(steps, channels))
    counts = np.where(rng.random((steps, channels)) < 0.05, MAX_INPUT_SPIKES, counts)
    return counts * (rng.random((steps, channels)) < 0.5)


@dataclass
class CaseResult:
    index: int
    with_aliases: bool
    exact_match: bool
    first_divergence_step: Optional[int]
    invariant_problems: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.exact_match and not self.invariant_problems


@dataclass
class VerificationResult:
    cases: List[CaseResult] = field(default_factory=list)

    @property
    def total(self) -> int:
        return len(self.cases)

    @property
    def failures(self) -> List[CaseResult]:
        return [case for case in self.cases if not case.ok]

    @property
    def ok(self) -> bool:
        return not self.failures


def _case_inputs(seed: int, index: int, steps: int) -> Tuple[HardwareConfig, np.ndarray, bool]:
    # 每个用例独立的随机流，与并行度无关
    rng = np.random.default_rng([seed, index])
    with_aliases = index % 2 == 1
    config = random_config(rng, with_aliases)
    return config, random_raster(rng, steps, config.C), with_aliases


def run_case(seed: int, index: int, steps: int) -> CaseResult:
    """运行单个一致性用例"""
    config, raster, with_aliases = _case_inputs(seed, index, steps)
    recording = evolve(config, raster, record=True)
    oracle = reference_evolve(config, raster)
    report = compare_recordings(recording, oracle)
    problems = recording.check_invariants()
    if not report.exact_match:
        logger.error(f"❌ 用例 {index} 与参考实现不一致，首次分歧步: {report.first_divergence_step}")
    return CaseResult(index, with_aliases, report.exact_match, report.first_divergence_step, problems)


async def _run_batch_async(seed: int, count: int, steps: int, jobs: int) -> List[CaseResult]:
    semaphore = asyncio.Semaphore(max(1, jobs))

    async def _one(index: int) -> CaseResult:
        async with semaphore:
            return await asyncio.to_thread(run_case, seed, index, steps)

    return list(await asyncio.gather(*(_one(index) for index in range(count))))


def run_equivalence(seed: int, count: int = 100, steps: int = 100, jobs: int = 1) -> VerificationResult:
    """
    批量一致性验证

    Args:
        seed: 随机种子（用例 i 使用 (seed, i) 派生的随机流）
        count: 随机配置数
        steps: 每个栅格的时间步数
        jobs: 并行线程数（每个用例完全隔离）
    """
    if jobs <= 1:
        cases = [run_case(seed, index, steps) for index in range(count)]
    else:
        cases = asyncio.run(_run_batch_async(seed, count, steps, jobs))

    result = VerificationResult(cases=cases)
    if result.ok:
        logger.info(f"✅ 一致性验证通过: {count} 个配置 × {steps} 步")
    else:
        logger.error(f"❌ 一致性验证失败: {len(result.failures)}/{count} 个配置不一致")
    return result
