"""
命令行配置与HTTP请求模型

Σ 以行优先展开的列表给出并在解析时检查对称性，或使用字面量 "identity"。
"""

from typing import List, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, Field, model_validator

from . import CliCommand, OutputFormat, ValidationSuite
from .params import GeneratorParams

SYMMETRY_TOLERANCE = 1e-12


class DistributionConfig(BaseModel):
    """一个GML分布的完整参数集"""

    n: int = Field(default=2, description="维数", ge=1)
    a: float = Field(default=1.0, description="Logistic项尺度", gt=0.0)
    b: float = Field(default=1.0, description="指数衰减率", gt=0.0)
    r: float = Field(default=2.0, description="Logistic项幂次", ge=0.0)
    mu: Optional[List[float]] = Field(default=None, description="位置向量，缺省为0")
    sigma: Union[Literal["identity"], List[float]] = Field(
        default="identity", description="行优先展开的离差矩阵或 identity"
    )

    model_config = {
        "json_schema_extra": {
            "example": {
                "n": 2,
                "a": 1.0,
                "b": 1.0,
                "r": 2.0,
                "mu": [0.0, 0.0],
                "sigma": [1.0, 0.3, 0.3, 2.0],
            }
        }
    }

    @model_validator(mode="after")
    def check_shapes(self) -> "DistributionConfig":
        """位置向量长度与Σ形状、对称性检查"""
        if self.mu is not None and len(self.mu) != self.n:
            raise ValueError(f"mu 长度必须为 n={self.n}，实际为 {len(self.mu)}")
        if self.sigma != "identity":
            if len(self.sigma) != self.n * self.n:
                raise ValueError(
                    f"sigma 必须包含 n*n={self.n * self.n} 个元素，"
                    f"实际为 {len(self.sigma)}"
                )
            matrix = np.asarray(self.sigma, dtype=float).reshape(self.n, self.n)
            if not np.allclose(matrix, matrix.T, rtol=0.0, atol=SYMMETRY_TOLERANCE):
                raise ValueError("sigma 必须对称")
        return self

    @property
    def params(self) -> GeneratorParams:
        return GeneratorParams(a=self.a, b=self.b, r=self.r)

    def mu_vector(self) -> np.ndarray:
        if self.mu is None:
            return np.zeros(self.n)
        return np.asarray(self.mu, dtype=float)

    def sigma_matrix(self) -> np.ndarray:
        if self.sigma == "identity":
            return np.eye(self.n)
        return np.asarray(self.sigma, dtype=float).reshape(self.n, self.n)

    def metadata(self) -> dict:
        """输出文件表头记录的参数集"""
        return {
            "n": self.n,
            "a": self.a,
            "b": self.b,
            "r": self.r,
            "mu": self.mu_vector().tolist(),
            "sigma": self.sigma_matrix().ravel().tolist(),
        }


class CliConfig(DistributionConfig):
    """
    命令行配置

    解析后的取值在任何计算开始前满足参数与分布的不变量。
    """

    command: CliCommand = Field(..., description="子命令")
    count: int = Field(default=1000, description="抽样数量", ge=0)
    seed: Optional[int] = Field(default=None, description="随机种子", ge=0)
    grid_range: float = Field(default=4.0, description="网格半宽", gt=0.0)
    resolution: int = Field(default=101, description="每轴网格点数", ge=2, le=4001)
    preset: Optional[Literal["figures"]] = Field(default=None, description="网格预设")
    n_max: int = Field(default=18, description="常数表最大维数")
    suite: ValidationSuite = Field(default=ValidationSuite.ALL, description="校验套件")
    from_sample: Optional[str] = Field(default=None, description="待复核的抽样文件")
    t: Optional[List[float]] = Field(default=None, description="特征函数自变量")
    method: Literal["auto", "series", "quadrature"] = Field(
        default="auto", description="特征函数计算路径"
    )
    output_format: OutputFormat = Field(default=OutputFormat.CSV, description="输出格式")
    out: Optional[str] = Field(default=None, description="输出路径，缺省为标准输出")


class PdfRequest(DistributionConfig):
    """密度求值请求"""

    points: List[List[float]] = Field(..., description="求值点，每个长度为 n", min_length=1)


class CfRequest(DistributionConfig):
    """特征函数求值请求"""

    t: List[List[float]] = Field(..., description="自变量向量，每个长度为 n", min_length=1)
    method: Literal["auto", "series", "quadrature"] = Field(
        default="auto", description="计算路径"
    )


class SampleRequest(DistributionConfig):
    """抽样请求"""

    count: int = Field(default=1000, description="抽样数量", ge=0, le=100_000)
    seed: int = Field(default=0, description="随机种子", ge=0)
