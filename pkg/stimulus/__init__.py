"""输入刺激模块"""
from .poisson import (
    SplitMix64,
    poisson_count,
    poisson_raster,
    raster_to_csv_text,
    save_raster,
    load_raster,
)

__all__ = [
    'SplitMix64',
    'poisson_count',
    'poisson_raster',
    'raster_to_csv_text',
    'save_raster',
    'load_raster',
]
