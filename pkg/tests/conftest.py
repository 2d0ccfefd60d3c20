"""测试公共配置与夹具"""
import sys
from pathlib import Path

# 添加项目根目录到路径
project_root = Path(__file__).parent.parent
if str(project_root) not in sys.path:
    sys.path.insert(0, str(project_root))

import numpy as np

from graph_ir import LIFParams, compose_residual, compose_sequential, finalize_graph, make_lif, make_linear
from hwconfig.models import HardwareConfig
from hwconfig.validator import seal_config
from mapper.specification import FloatSpecification

DEMO_NETWORK = project_root / "networks" / "demo.json"


def build_config(C=1, H=1, O=1, S=1, seal=True, **overrides) -> HardwareConfig:
    """最小合法配置：权重全零，阈值 100，dash 1，可用关键字覆盖任意字段"""
    fields = dict(
        dt=1e-3,
        C=C,
        H=H,
        O=O,
        S=S,
        w_in=np.zeros((C, H, S), dtype=np.int64),
        w_rec=np.zeros((H, H, S), dtype=np.int64),
        w_out=np.zeros((H, O), dtype=np.int64),
        threshold_hid=np.full(H, 100, dtype=np.int64),
        threshold_out=np.full(O, 100, dtype=np.int64),
        bias_hid=np.zeros(H, dtype=np.int64),
        bias_out=np.zeros(O, dtype=np.int64),
        dash_mem_hid=np.ones(H, dtype=np.int64),
        dash_syn_hid=np.ones((H, S), dtype=np.int64),
        dash_mem_out=np.ones(O, dtype=np.int64),
        dash_syn_out=np.ones(O, dtype=np.int64),
        aliases=[[] for _ in range(H)],
    )
    fields.update(overrides)
    config = HardwareConfig(**fields)
    if seal:
        report = seal_config(config)
        assert report.ok, report.format()
    return config


def build_float_spec(w_in, w_rec, w_out, threshold_hid=None, threshold_out=None, bias_hid=None, bias_out=None,
                     tau=0.004, dt=1e-3, aliases=None) -> FloatSpecification:
    """直接构造浮点规格；二维 w_in / w_rec 视为单突触通道，所有时间常数取 tau"""
    w_in = np.asarray(w_in, dtype=np.float64)
    w_rec = np.asarray(w_rec, dtype=np.float64)
    w_out = np.asarray(w_out, dtype=np.float64)
    if w_in.ndim == 2:
        w_in = w_in[:, :, None]
    if w_rec.ndim == 2:
        w_rec = w_rec[:, :, None]
    C, H, S = w_in.shape
    O = w_out.shape[1]

    def _vector(value, n, default):
        return np.full(n, default, dtype=np.float64) if value is None else np.asarray(value, dtype=np.float64)

    return FloatSpecification(
        dt=dt, C=C, H=H, O=O, S=S,
        w_in=w_in, w_rec=w_rec, w_out=w_out,
        tau_mem_hid=np.full(H, tau), tau_syn_hid=np.full((H, S), tau),
        threshold_hid=_vector(threshold_hid, H, 1.0),
        bias_hid=_vector(bias_hid, H, 0.0),
        tau_mem_out=np.full(O, tau), tau_syn_out=np.full(O, tau),
        threshold_out=_vector(threshold_out, O, 1.0),
        bias_out=_vector(bias_out, O, 0.0),
        aliases=aliases or [None] * H,
    )


def lif_params(n, tau_mem=0.02, tau_syn=0.004, threshold=1.0, bias=0.0, w_rec=None) -> LIFParams:
    return LIFParams(tau_mem=tau_mem, tau_syn=tau_syn, threshold=threshold, bias=bias, w_rec=w_rec)


def build_two_layer_graph(C=4, H=3, O=2, seed=0, residual=False):
    """linear C×H → lif H → [residual(linear H×H → lif H)] → linear H×O → lif O"""
    rng = np.random.default_rng(seed)
    modules = [make_linear(rng.uniform(-1, 1, (C, H))), make_lif(lif_params(H), H)]
    if residual:
        body = compose_sequential([make_linear(rng.uniform(-1, 1, (H, H))), make_lif(lif_params(H), H)])
        modules.append(compose_residual(body))
    modules += [make_linear(rng.uniform(-1, 1, (H, O))), make_lif(lif_params(O), O)]
    return finalize_graph(compose_sequential(modules, name="two_layer"))
