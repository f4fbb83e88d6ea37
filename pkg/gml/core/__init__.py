"""
核心配置包

包含库配置和异常定义。
"""

from .config import Settings, get_settings, settings
from .exceptions import (
    ConfigurationError,
    ConvergenceError,
    DivergenceError,
    DomainError,
    GmlError,
    IndexSetError,
    PreconditionError,
    RangeError,
    RankError,
    SamplerError,
    ShapeError,
    UnsupportedDimensionError,
)

__all__ = [
    # 配置
    "Settings",
    "settings",
    "get_settings",
    # 异常类
    "GmlError",
    "DomainError",
    "ConvergenceError",
    "DivergenceError",
    "RangeError",
    "PreconditionError",
    "ShapeError",
    "RankError",
    "IndexSetError",
    "UnsupportedDimensionError",
    "SamplerError",
    "ConfigurationError",
]
