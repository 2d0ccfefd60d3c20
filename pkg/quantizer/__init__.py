"""量化模块"""
from .models import QuantizedSpecification, ScaleOverflow, save_quantized, load_quantized
from .quantize_methods import tau_to_dash, quantize_global, quantize_channel, quantize

__all__ = [
    'QuantizedSpecification',
    'ScaleOverflow',
    'save_quantized',
    'load_quantized',
    'tau_to_dash',
    'quantize_global',
    'quantize_channel',
    'quantize',
]
