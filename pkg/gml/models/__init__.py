"""
数据模型包

包含所有的Pydantic数据模型、数值结果容器和枚举类型。
"""

from enum import Enum


class NumericMethod(str, Enum):
    """数值结果的计算方法"""
    SERIES = "series"
    QUADRATURE = "quadrature"
    CLOSED_FORM = "closed_form"


class OutputFormat(str, Enum):
    """命令行输出格式"""
    CSV = "csv"
    JSON = "json"


class ValidationSuite(str, Enum):
    """校验套件"""
    CONSTANTS = "constants"
    MOMENTS = "moments"
    CF = "cf"
    MARGINALS = "marginals"
    ALL = "all"


class CliCommand(str, Enum):
    """命令行子命令"""
    CONSTANTS = "constants"
    PDF_GRID = "pdf-grid"
    SAMPLE = "sample"
    MOMENTS = "moments"
    CF = "cf"
    VALIDATE = "validate"


# 导入所有数据模型
from .numeric import NumericValue, QuadratureSpec
from .params import GeneratorParams, PhiStarArgs
from .report import CheckResult, ValidationReport
from .requests import (
    CfRequest,
    CliConfig,
    DistributionConfig,
    PdfRequest,
    SampleRequest,
)
from .sample import SampleBatch

# 公开导出的模型和枚举
__all__ = [
    # 枚举类型
    "NumericMethod",
    "OutputFormat",
    "ValidationSuite",
    "CliCommand",
    # 数值结果
    "NumericValue",
    "QuadratureSpec",
    # 参数模型
    "GeneratorParams",
    "PhiStarArgs",
    # 校验报告
    "CheckResult",
    "ValidationReport",
    # 抽样批次
    "SampleBatch",
    # 命令与请求
    "DistributionConfig",
    "CliConfig",
    "PdfRequest",
    "CfRequest",
    "SampleRequest",
]
