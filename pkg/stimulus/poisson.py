"""确定性泊松脉冲序列生成与栅格 CSV 读写"""
import csv
import io
import math
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from config.constants import MAX_INPUT_SPIKES
from simulator.recording import InputRaster
from utils.exceptions import DomainError, ParseError
from utils.helpers import write_text
from utils.logger import setup_logger

logger = setup_logger(__name__)

MASK64 = (1 << 64) - 1

# 超过该期望值的泊松抽样必然被钳位，直接取上限
POISSON_DIRECT_LIMIT = 30.0

RASTER_COLUMNS = ["t", "channel", "count"]


class SplitMix64:
    """SplitMix64 伪随机数发生器（单一持有者，每个任务各建一个）"""

    GOLDEN_GAMMA = 0x9E3779B97F4A7C15

    def __init__(self, seed: int):
        self.state = int(seed) & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + self.GOLDEN_GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def next_float(self) -> float:
        """[0, 1) 均匀分布，53 位精度"""
        return (self.next_u64() >> 11) * (2.0 ** -53)


def poisson_count(rng: SplitMix64, lam: float, limit: int = MAX_INPUT_SPIKES) -> int:
    """
    Knuth 乘法法抽取泊松计数，结果钳位到 limit

    lam 为 0 或大于 30 时不消耗随机数；计数达到 limit 后提前停止。
    """
    if lam <= 0.0:
        return 0
    if lam > POISSON_DIRECT_LIMIT:
        return limit
    floor = math.exp(-lam)
    k = 0
    p = 1.0
    while True:
        k += 1
        p *= rng.next_float()
        if p <= floor:
            return k - 1
        if k - 1 >= limit:
            return limit


def poisson_raster(rates: Sequence[float], steps: int, dt: float, seed: int) -> InputRaster:
    """
    按每通道发放率（事件/秒）生成泊松输入栅格

    随机数按 (t, c) 行优先顺序消耗，给定 seed 完全确定。

    Raises:
        DomainError: 发放率为负或非有限值、steps 为负、dt 非正
    """
    rates = np.asarray(rates, dtype=np.float64).ravel()
    if rates.size and (np.any(~np.isfinite(rates)) or np.any(rates < 0)):
        raise DomainError("发放率必须是非负有限值")
    if steps < 0:
        raise DomainError(f"steps 不能为负数，实际: {steps}")
    if not dt > 0:
        raise DomainError(f"dt 必须为正，实际: {dt}")

    lams = [float(r) * dt for r in rates]
    rng = SplitMix64(seed)
    counts = np.zeros((steps, rates.size), dtype=np.int64)
    for t in range(steps):
        for c, lam in enumerate(lams):
            counts[t, c] = poisson_count(rng, lam)

    logger.info(f"✅ 泊松栅格生成完成: {steps} 步 × {rates.size} 通道, seed={seed}, 事件总数 {int(counts.sum())}")
    return InputRaster(counts)


def raster_to_csv_text(raster: InputRaster) -> str:
    """稠密 CSV：t,channel,count"""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RASTER_COLUMNS)
    for t in range(raster.steps):
        for c in range(raster.channels):
            writer.writerow([t, c, int(raster.counts[t, c])])
    return buf.getvalue()


def save_raster(raster: InputRaster, path: Union[str, Path]) -> Path:
    path = write_text(path, raster_to_csv_text(raster))
    logger.info(f"✅ 输入栅格已写入 {path}")
    return path


def load_raster(path: Union[str, Path], channels: Optional[int] = None) -> InputRaster:
    """
    读取栅格 CSV（缺失的 (t, channel) 项按 0 处理）

    Args:
        channels: 期望通道数；为 None 时取文件中最大通道号 + 1

    Raises:
        ParseError: 表头错误、字段非整数或计数越界，location 为 "文件:行号"
    """
    path = Path(path)
    entries = []
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != RASTER_COLUMNS:
            raise ParseError(f"栅格 CSV 表头应为 {','.join(RASTER_COLUMNS)}", location=f"{path}:1")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise ParseError(f"应有 3 列，实际 {len(row)} 列", location=f"{path}:{lineno}")
            try:
                t, c, count = (int(x) for x in row)
            except ValueError:
                raise ParseError(f"字段必须是整数: {row}", location=f"{path}:{lineno}")
            if t < 0 or c < 0 or not 0 <= count <= MAX_INPUT_SPIKES:
                raise ParseError(f"取值越界: {row}", location=f"{path}:{lineno}")
            entries.append((t, c, count))

    steps = max((e[0] for e in entries), default=-1) + 1
    width = max((e[1] for e in entries), default=-1) + 1
    if channels is None:
        channels = width
    elif width > channels:
        raise ParseError(f"通道号 {width - 1} 超出期望通道数 {channels}", location=str(path))
    counts = np.zeros((steps, channels), dtype=np.int64)
    for t, c, count in entries:
        counts[t, c] = count
    return InputRaster(counts)
