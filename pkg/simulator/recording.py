"""仿真输入与记录：InputRaster、SimulationRecording、FloatRecording 及 CSV/JSON 导出"""
import csv
import io
from abc import ABC, abstractmethod
from dataclasses import dataclass, fields
from typing import Dict, List, Optional

import numpy as np

from config.constants import INT16_MAX, INT16_MIN, MAX_HIDDEN_SPIKES, MAX_INPUT_SPIKES, MAX_OUTPUT_SPIKES
from utils.exceptions import DomainError, ParseError, ShapeError

# 记录 CSV 的列
RECORDING_COLUMNS = ["t", "kind", "index", "channel", "v_mem", "i_syn", "spikes"]

# 状态轨迹字段（record=False 时为 None）
TRACE_FIELDS = ("v_mem_hid", "i_syn_hid", "spikes_hid", "v_mem_out", "i_syn_out")


class InputRaster:
    """稠密输入脉冲计数（steps × C），每项 0..15"""

    def __init__(self, counts):
        arr = np.asarray(counts)
        if arr.ndim != 2:
            raise ShapeError(f"输入栅格必须是二维 (steps × C)，实际维度: {arr.ndim}")
        if arr.size and not np.issubdtype(arr.dtype, np.integer):
            if np.any(arr != np.round(arr)):
                raise DomainError("输入栅格必须是整数计数")
        arr = arr.astype(np.int64)
        if arr.size and (arr.min() < 0 or arr.max() > MAX_INPUT_SPIKES):
            raise DomainError(f"输入栅格计数必须在 [0, {MAX_INPUT_SPIKES}] 内")
        self.counts = arr

    @property
    def steps(self) -> int:
        return self.counts.shape[0]

    @property
    def channels(self) -> int:
        return self.counts.shape[1]

    @classmethod
    def zeros(cls, steps: int, channels: int) -> "InputRaster":
        return cls(np.zeros((steps, channels), dtype=np.int64))

    def __add__(self, other: "InputRaster") -> "InputRaster":
        return InputRaster(self.counts + other.counts)

    def __eq__(self, other) -> bool:
        if not isinstance(other, InputRaster):
            return NotImplemented
        return self.counts.shape == other.counts.shape and bool(np.array_equal(self.counts, other.counts))

    def __repr__(self) -> str:
        return f"InputRaster(steps={self.steps}, channels={self.channels})"


@dataclass(eq=False)
class _Recording(ABC):
    """记录公共部分：按时间步存储隐藏层与输出层状态"""
    spikes_out: np.ndarray
    v_mem_hid: Optional[np.ndarray] = None
    i_syn_hid: Optional[np.ndarray] = None
    spikes_hid: Optional[np.ndarray] = None
    v_mem_out: Optional[np.ndarray] = None
    i_syn_out: Optional[np.ndarray] = None

    @property
    def recorded(self) -> bool:
        return self.v_mem_hid is not None

    @property
    def steps(self) -> int:
        return self.spikes_out.shape[0]

    def shapes(self) -> Dict[str, tuple]:
        return {f.name: np.shape(getattr(self, f.name)) for f in fields(self) if getattr(self, f.name) is not None}

    def traces(self) -> Dict[str, np.ndarray]:
        return {f.name: getattr(self, f.name) for f in fields(self) if getattr(self, f.name) is not None}

    @staticmethod
    @abstractmethod
    def _cell(value) -> str:
        """单元格格式：整数记录输出整数字面量，浮点记录输出 repr"""

    def _rows(self):
        T = self.steps
        O = self.spikes_out.shape[1]
        for t in range(T):
            if self.recorded:
                H, S = self.i_syn_hid.shape[1], self.i_syn_hid.shape[2]
                for i in range(H):
                    for s in range(S):
                        yield [t, "hidden", i, s, self._cell(self.v_mem_hid[t, i]),
                               self._cell(self.i_syn_hid[t, i, s]), int(self.spikes_hid[t, i])]
            for o in range(O):
                if self.recorded:
                    yield [t, "output", o, 0, self._cell(self.v_mem_out[t, o]),
                           self._cell(self.i_syn_out[t, o]), int(self.spikes_out[t, o])]
                else:
                    yield [t, "output", o, 0, "", "", int(self.spikes_out[t, o])]

    def to_csv_text(self) -> str:
        """导出 CSV：t,kind,index,channel,v_mem,i_syn,spikes（隐藏层每个突触通道一行）"""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(RECORDING_COLUMNS)
        writer.writerows(self._rows())
        return buf.getvalue()

    def summary(self) -> Dict:
        """每个神经元的脉冲总数与首次发放时间步（未发放为 None）"""
        def _per_neuron(spikes: np.ndarray) -> Dict:
            totals = spikes.sum(axis=0).astype(np.int64)
            first: List[Optional[int]] = []
            for col in spikes.T:
                hits = np.flatnonzero(col)
                first.append(int(hits[0]) if hits.size else None)
            return {"total_spikes": totals.tolist(), "first_spike_step": first}

        data = {"steps": self.steps, "output": _per_neuron(self.spikes_out)}
        if self.spikes_hid is not None:
            data["hidden"] = _per_neuron(self.spikes_hid)
        return data


@dataclass(eq=False)
class SimulationRecording(_Recording):
    """整数仿真记录：状态为 16 位整数，隐藏脉冲 ≤ 31，输出脉冲 ≤ 1"""

    @staticmethod
    def _cell(value) -> str:
        return str(int(value))

    def check_invariants(self) -> List[str]:
        """检查钳位不变量，返回问题描述（空列表表示通过）"""
        problems = []
        for name in ("v_mem_hid", "i_syn_hid", "v_mem_out", "i_syn_out"):
            arr = getattr(self, name)
            if arr is not None and arr.size and (arr.min() < INT16_MIN or arr.max() > INT16_MAX):
                problems.append(f"{name} 超出 16 位范围")
        if self.spikes_hid is not None and self.spikes_hid.size and not 0 <= self.spikes_hid.min() <= self.spikes_hid.max() <= MAX_HIDDEN_SPIKES:
            problems.append(f"隐藏脉冲超出 [0, {MAX_HIDDEN_SPIKES}]")
        if self.spikes_out.size and not 0 <= self.spikes_out.min() <= self.spikes_out.max() <= MAX_OUTPUT_SPIKES:
            problems.append(f"输出脉冲超出 [0, {MAX_OUTPUT_SPIKES}]")
        return problems

    def __eq__(self, other) -> bool:
        if not isinstance(other, SimulationRecording):
            return NotImplemented
        mine, theirs = self.traces(), other.traces()
        return mine.keys() == theirs.keys() and all(np.array_equal(mine[k], theirs[k]) for k in mine)


@dataclass(eq=False)
class FloatRecording(_Recording):
    """浮点仿真记录：布局与 SimulationRecording 相同，状态为实数"""

    @staticmethod
    def _cell(value) -> str:
        return repr(float(value))

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(arr)) for arr in self.traces().values())


def _is_int_literal(text: str) -> bool:
    return text.lstrip("-").isdigit()


def recording_from_csv_text(text: str, location: str = "recording") -> _Recording:
    """
    从记录 CSV 还原 SimulationRecording 或 FloatRecording

    所有状态单元格都是整数字面量时视为整数记录（浮点单元格总带小数点或指数）。

    Raises:
        ParseError: 表头或字段格式错误
    """
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != RECORDING_COLUMNS:
        raise ParseError(f"记录 CSV 表头应为 {','.join(RECORDING_COLUMNS)}", location=f"{location}:1")

    parsed = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(RECORDING_COLUMNS) or row[1] not in ("hidden", "output"):
            raise ParseError(f"记录行格式错误: {row}", location=f"{location}:{lineno}")
        try:
            t, index, channel, spikes = int(row[0]), int(row[2]), int(row[3]), int(row[6])
        except ValueError:
            raise ParseError(f"记录行下标必须是整数: {row}", location=f"{location}:{lineno}")
        if min(t, index, channel) < 0:
            raise ParseError(f"记录行下标不能为负数: {row}", location=f"{location}:{lineno}")
        parsed.append((lineno, t, row[1], index, channel, row[4], row[5], spikes))

    cells = [p[5] for p in parsed] + [p[6] for p in parsed]
    recorded = any(cell != "" for cell in cells)
    is_int = all(_is_int_literal(cell) for cell in cells if cell != "")
    dtype = np.int64 if is_int else np.float64

    T = max((p[1] for p in parsed), default=-1) + 1
    hidden = [p for p in parsed if p[2] == "hidden"]
    output = [p for p in parsed if p[2] == "output"]
    H = max((p[3] for p in hidden), default=-1) + 1
    S = max((p[4] for p in hidden), default=-1) + 1
    O = max((p[3] for p in output), default=-1) + 1

    def _num(cell: str, lineno: int):
        try:
            return int(cell) if is_int else float(cell)
        except ValueError:
            raise ParseError(f"状态值格式错误: {cell!r}", location=f"{location}:{lineno}")

    spikes_out = np.zeros((T, O), dtype=np.int64)
    kwargs = {}
    if recorded:
        kwargs = {
            "v_mem_hid": np.zeros((T, H), dtype=dtype),
            "i_syn_hid": np.zeros((T, H, S), dtype=dtype),
            "spikes_hid": np.zeros((T, H), dtype=np.int64),
            "v_mem_out": np.zeros((T, O), dtype=dtype),
            "i_syn_out": np.zeros((T, O), dtype=dtype),
        }
    for lineno, t, kind, index, channel, v_mem, i_syn, spikes in parsed:
        if kind == "output":
            spikes_out[t, index] = spikes
            if recorded:
                kwargs["v_mem_out"][t, index] = _num(v_mem, lineno)
                kwargs["i_syn_out"][t, index] = _num(i_syn, lineno)
        elif recorded:
            kwargs["v_mem_hid"][t, index] = _num(v_mem, lineno)
            kwargs["i_syn_hid"][t, index, channel] = _num(i_syn, lineno)
            kwargs["spikes_hid"][t, index] = spikes

    cls = SimulationRecording if is_int else FloatRecording
    return cls(spikes_out=spikes_out, **kwargs)
