"""配置模块"""
from .settings import Settings
from .constants import *

__all__ = ['Settings']

