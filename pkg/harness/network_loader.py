"""网络描述文件（JSON）解析：构建并冻结计算图

文件格式（顶层可以直接是层列表，也可以是带元数据的对象）::

    {
      "name": "demo",
      "dt": 0.001,            # 可选，命令行 --dt 优先
      "seed": 7,              # 可选，未单独指定 seed 的均匀初始化使用
      "layers": [
        {"type": "linear", "rows": 16, "cols": 8,
         "weights": [[...]]},                                   # 或 {"init": "uniform", "low": -1, "high": 1, "seed": 3}
        {"type": "lif", "n": 8, "channels": 1,
         "tau_mem": 0.02, "tau_syn": 0.005, "threshold": 1.0, "bias": 0.0,
         "w_rec": [[...]]},                                     # 可选，同样接受 init 对象
        {"type": "residual", "body": [...]}
      ]
    }

标量参数广播到整层。未单独指定 seed 的随机初始化按文件中的出现顺序（深度优先）消耗随机数。
"""
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Union

import numpy as np

from config.constants import LAYER_LIF, LAYER_LINEAR, LAYER_RESIDUAL
from graph_ir.combinators import compose_residual, compose_sequential
from graph_ir.models import GraphModule, LIFParams, make_lif, make_linear
from graph_ir.traversal import finalize_graph
from utils.exceptions import ConstructionError, ParseError
from utils.logger import setup_logger

logger = setup_logger(__name__)

INIT_UNIFORM = "uniform"


@dataclass
class LoadedNetwork:
    graph: GraphModule
    name: str
    dt: Optional[float]


class NetworkLoader:
    """网络描述解析器"""

    def __init__(self, seed: int = 0):
        self.rng = np.random.default_rng(seed)

    @staticmethod
    def _field(layer: Dict, key: str, location: str):
        if key not in layer:
            raise ParseError(f"缺少字段 {key}", location=f"{location}.{key}")
        return layer[key]

    @staticmethod
    def _int(layer: Dict, key: str, location: str, default: Optional[int] = None) -> int:
        value = layer.get(key, default) if default is not None else NetworkLoader._field(layer, key, location)
        if isinstance(value, bool) or not isinstance(value, int):
            raise ParseError(f"{key} 必须是整数，实际: {value!r}", location=f"{location}.{key}")
        return value

    def _matrix(self, value, shape: tuple, location: str) -> np.ndarray:
        """显式矩阵或 {"init": "uniform", "low", "high", "seed"} 初始化对象"""
        if isinstance(value, dict):
            if value.get("init", INIT_UNIFORM) != INIT_UNIFORM:
                raise ParseError(f"不支持的初始化方式: {value.get('init')!r}", location=f"{location}.init")
            try:
                low, high = float(value.get("low", -1.0)), float(value.get("high", 1.0))
            except (TypeError, ValueError):
                raise ParseError("low / high 必须是数值", location=location)
            rng = np.random.default_rng(int(value["seed"])) if "seed" in value else self.rng
            return rng.uniform(low, high, size=shape)
        try:
            matrix = np.array(value, dtype=np.float64)
        except (TypeError, ValueError):
            raise ParseError("权重必须是数值矩阵", location=location)
        if matrix.shape != shape:
            raise ParseError(f"权重形状应为 {shape}，实际 {matrix.shape}", location=location)
        return matrix

    def _linear(self, layer: Dict, location: str) -> GraphModule:
        rows = self._int(layer, "rows", location)
        cols = self._int(layer, "cols", location)
        weights = self._matrix(self._field(layer, "weights", location), (rows, cols), f"{location}.weights")
        return make_linear(weights, name=layer.get("name"))

    def _lif(self, layer: Dict, location: str) -> GraphModule:
        n = self._int(layer, "n", location)
        channels = self._int(layer, "channels", location, default=1)
        w_rec = None
        if layer.get("w_rec") is not None:
            w_rec = self._matrix(layer["w_rec"], (n, n * channels), f"{location}.w_rec")

        params = LIFParams(
            tau_mem=self._field(layer, "tau_mem", location),
            tau_syn=self._field(layer, "tau_syn", location),
            threshold=layer.get("threshold", 1.0),
            bias=layer.get("bias", 0.0),
            w_rec=w_rec,
        )
        return make_lif(params, n, synapse_channels=channels, name=layer.get("name"))

    def build_layers(self, layers: List, location: str) -> List[GraphModule]:
        if not isinstance(layers, list) or not layers:
            raise ParseError("层列表必须非空", location=location)
        modules = []
        for idx, layer in enumerate(layers):
            here = f"{location}[{idx}]"
            if not isinstance(layer, dict):
                raise ParseError("层描述必须是 JSON 对象", location=here)
            kind = self._field(layer, "type", here)
            try:
                if kind == LAYER_LINEAR:
                    modules.append(self._linear(layer, here))
                elif kind == LAYER_LIF:
                    modules.append(self._lif(layer, here))
                elif kind == LAYER_RESIDUAL:
                    name = layer.get("name", "residual")
                    inner = self.build_layers(self._field(layer, "body", here), f"{here}.body")
                    body = inner[0] if len(inner) == 1 else compose_sequential(inner, name=f"{name}_body")
                    modules.append(compose_residual(body, name=name))
                else:
                    raise ParseError(f"未知层类型: {kind!r}", location=f"{here}.type")
            except ConstructionError as e:
                raise ConstructionError(f"{here}: {e}") from e
        return modules


def load_network(path: Union[str, Path], seed: int = 0) -> LoadedNetwork:
    """
    读取网络描述文件并构建冻结的计算图

    Args:
        path: JSON 文件路径
        seed: 文件未指定 seed 时使用的初始化种子

    Raises:
        ParseError: JSON 语法错误或字段缺失/类型错误
        ConstructionError: 层参数非法
        GraphConnectionError: 相邻层端口数不一致
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ParseError(f"网络描述 JSON 解析失败: {e.msg}", location=f"{path}:{e.lineno}:{e.colno}")
    if isinstance(data, list):
        data = {"layers": data}
    if not isinstance(data, dict):
        raise ParseError("网络描述顶层必须是层列表或 JSON 对象", location=str(path))

    name = str(data.get("name", path.stem))
    dt = data.get("dt")
    if dt is not None and (isinstance(dt, bool) or not isinstance(dt, (int, float))):
        raise ParseError(f"dt 必须是数值，实际: {dt!r}", location="dt")

    loader = NetworkLoader(seed=int(data.get("seed", seed)))
    modules = loader.build_layers(data.get("layers"), "layers")
    graph = finalize_graph(compose_sequential(modules, name=name))
    logger.info(f"✅ 网络 {name} 构建完成: {graph.size_in} 输入 → {graph.size_out} 输出")
    return LoadedNetwork(graph=graph, name=name, dt=None if dt is None else float(dt))
