"""辅助函数"""
import hashlib
import json
from pathlib import Path
from typing import Any, Union

import numpy as np

from config.constants import INT16_MAX, INT16_MIN


def round_half_away_from_zero(values) -> np.ndarray:
    """四舍五入（.5 远离零），兼容标量和数组，返回 int64 数组"""
    arr = np.asarray(values, dtype=np.float64)
    return (np.sign(arr) * np.floor(np.abs(arr) + 0.5)).astype(np.int64)


def sat16(values) -> np.ndarray:
    """饱和到有符号 16 位范围"""
    return np.clip(np.asarray(values, dtype=np.int64), INT16_MIN, INT16_MAX)


def max_abs(*arrays) -> float:
    """多个数组的最大绝对值（全空时为 0）"""
    result = 0.0
    for arr in arrays:
        arr = np.asarray(arr, dtype=np.float64)
        if arr.size:
            result = max(result, float(np.max(np.abs(arr))))
    return result


def format_dt(dt: float) -> str:
    """dt 序列化为十进制字符串（repr 保证 float 往返精确）"""
    return repr(float(dt))


def to_jsonable(value: Any) -> Any:
    """numpy 类型转换为 JSON 可序列化的 Python 原生类型"""
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    return value


def canonical_dumps(data: Any) -> str:
    """规范 JSON：键排序、紧凑分隔符、末尾换行"""
    return json.dumps(to_jsonable(data), sort_keys=True, separators=(",", ":"), ensure_ascii=False) + "\n"


def write_text(path: Union[str, Path], text: str) -> Path:
    """写文本文件（统一 utf-8 与 \\n 换行，保证产物字节级确定）"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)
    return path


def file_sha256(path: Union[str, Path]) -> str:
    """计算文件 SHA-256"""
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()
