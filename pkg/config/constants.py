"""常量定义（Xylo-Audio 2 硬件规格与工具链约定）"""
from collections import namedtuple

# 硬件规格表中的一行：限制ID、规格名称、数值
LimitRow = namedtuple("LimitRow", ["limit_id", "name", "value"])

# ============================================================================
# 硬件规格（Key Specifications of the Xylo Audio 2）
# ============================================================================
MAX_INPUT_CHANNELS = 16
MAX_INPUT_SPIKES = 15
MAX_HIDDEN_NEURONS = 1000
MAX_HIDDEN_SPIKES = 31
MAX_HIDDEN_SYNAPSES = 2
MAX_ALIAS_TARGETS = 1
MAX_OUTPUT_NEURONS = 8
MAX_OUTPUT_SPIKES = 1
MAX_OUTPUT_SYNAPSES = 1
WEIGHT_BITS = 8
SYNAPTIC_STATE_BITS = 16
MEMBRANE_STATE_BITS = 16
THRESHOLD_BITS = 16
DASH_BITS = 4
MAX_DASH = 15
LONGEST_TAU_STEPS = 32768
BIAS_BITS = 16

# 有符号 16 位状态范围
INT16_MIN = -(2 ** 15)
INT16_MAX = 2 ** 15 - 1

# 量化后的对称权重范围（不使用 -128）
WEIGHT_Q_MAX = 2 ** (WEIGHT_BITS - 1) - 1
# 硬件接受的权重范围（手写配置可以使用 -128）
WEIGHT_HW_MIN = -(2 ** (WEIGHT_BITS - 1))
WEIGHT_HW_MAX = WEIGHT_Q_MAX

THRESHOLD_MIN = 1
THRESHOLD_MAX = 2 ** (THRESHOLD_BITS - 1) - 1

# 规格表各行对应的校验规则（每行恰好一条规则）
HARDWARE_LIMITS = (
    LimitRow("XY01", "Max. input channels", MAX_INPUT_CHANNELS),
    LimitRow("XY02", "Max. input spikes per time step", MAX_INPUT_SPIKES),
    LimitRow("XY03", "Max. hidden LIF neurons", MAX_HIDDEN_NEURONS),
    LimitRow("XY04", "Max. hidden neuron spikes per time step", MAX_HIDDEN_SPIKES),
    LimitRow("XY05", "Max. input synapses per hidden neuron", MAX_HIDDEN_SYNAPSES),
    LimitRow("XY06", "Max. alias targets (hidden neurons only)", MAX_ALIAS_TARGETS),
    LimitRow("XY07", "Max. output LIF neurons", MAX_OUTPUT_NEURONS),
    LimitRow("XY08", "Max. output neuron spikes per time step", MAX_OUTPUT_SPIKES),
    LimitRow("XY09", "Max. input synapses per output neuron", MAX_OUTPUT_SYNAPSES),
    LimitRow("XY10", "Weight bit-depth", WEIGHT_BITS),
    LimitRow("XY11", "Synaptic state bit-depth", SYNAPTIC_STATE_BITS),
    LimitRow("XY12", "Membrane state bit-depth", MEMBRANE_STATE_BITS),
    LimitRow("XY13", "Threshold bit-depth", THRESHOLD_BITS),
    LimitRow("XY14", "Bit-shift decay parameter bit-depth", DASH_BITS),
    LimitRow("XY15", "Max. bit-shift decay value", MAX_DASH),
    LimitRow("XY16", "Longest effective time-constant", LONGEST_TAU_STEPS),
    LimitRow("XY17", "Bias bit-depth", BIAS_BITS),
)
LIMITS_BY_ID = {row.limit_id: row for row in HARDWARE_LIMITS}

# ============================================================================
# 设计规则（映射前检查）
# ============================================================================
RULE_ALTERNATION = "R1"
RULE_INPUT_CHANNELS = "R2"
RULE_HIDDEN_NEURONS = "R3"
RULE_OUTPUT_NEURONS = "R4"
RULE_SYNAPSE_CHANNELS = "R5"
RULE_ALIAS = "R6"
RULE_OUTPUT_RECURRENCE = "R7"

# ============================================================================
# 模块类型
# ============================================================================
KIND_LINEAR = "LinearWeights"
KIND_LIF = "LIFNeurons"
KIND_HOLDER = "Holder"

# 量化方法
QUANTIZE_GLOBAL = "global"
QUANTIZE_CHANNEL = "channel"
QUANTIZE_METHODS = (QUANTIZE_GLOBAL, QUANTIZE_CHANNEL)

# 仿真后端
BACKEND_INT = "int"
BACKEND_FLOAT = "float"

# ============================================================================
# CLI 退出码
# ============================================================================
EXIT_OK = 0
EXIT_VALIDATION_FAILED = 2
EXIT_PARSE_ERROR = 3
EXIT_INTERNAL_ERROR = 4

# 硬件配置文件扩展名
CONFIG_SUFFIX = ".xcfg.json"

# 流水线产物文件名
ARTIFACT_SPEC = "network.spec.json"
ARTIFACT_QSPEC = "network.qspec.json"
ARTIFACT_CONFIG = "network" + CONFIG_SUFFIX
ARTIFACT_RASTER = "raster.csv"
ARTIFACT_RECORDING_INT = "recording_int.csv"
ARTIFACT_RECORDING_FLOAT = "recording_float.csv"
ARTIFACT_SUMMARY_INT = "summary_int.json"
ARTIFACT_SUMMARY_FLOAT = "summary_float.json"
ARTIFACT_COMPARISON = "comparison.json"
ARTIFACT_PLOT_SPIKES = "plot_spike_raster.csv"
ARTIFACT_PLOT_VMEM = "plot_membrane_traces.csv"
ARTIFACT_PLOT_ISYN = "plot_synaptic_traces.csv"
ARTIFACT_GRAPH_SUMMARY = "graph_summary.txt"

# 网络描述文件中的层类型
LAYER_LINEAR = "linear"
LAYER_LIF = "lif"
LAYER_RESIDUAL = "residual"
