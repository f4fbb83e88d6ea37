"""
数值结果与求积参数模型
"""

import cmath
import math
from dataclasses import dataclass
from typing import Union

from pydantic import BaseModel, ConfigDict, Field

from ..core.config import get_settings
from ..core.exceptions import DomainError
from . import NumericMethod


class QuadratureSpec(BaseModel):
    """
    求积与级数求和的精度参数

    未显式给出的字段取自配置（GML_QUAD_TOL 等环境变量）。
    """

    model_config = ConfigDict(frozen=True)

    relative_tolerance: float = Field(
        default_factory=lambda: get_settings().quad_tol,
        description="相对容差",
        gt=0.0,
    )
    absolute_tolerance: float = Field(
        default_factory=lambda: get_settings().quad_abs_tol,
        description="绝对容差下限",
        gt=0.0,
    )
    max_refinement_levels: int = Field(
        default_factory=lambda: get_settings().quad_max_levels,
        description="最大加密层数",
        ge=1,
    )

    @classmethod
    def from_settings(cls) -> "QuadratureSpec":
        """按当前配置构造默认精度参数"""
        return cls()

    def tolerance_for(self, magnitude: float) -> float:
        """给定结果量级时的接受阈值 max(rel·|I|, abs)"""
        return max(self.relative_tolerance * magnitude, self.absolute_tolerance)


@dataclass(frozen=True)
class NumericValue:
    """
    带误差估计的数值结果

    Attributes:
        value: 实数或复数结果，保证有限
        error_estimate: 非负误差估计（相邻加密层之差或级数尾项）
        method: 计算方法
    """

    value: Union[float, complex]
    error_estimate: float
    method: NumericMethod

    def __post_init__(self) -> None:
        finite = (
            cmath.isfinite(self.value)
            if isinstance(self.value, complex)
            else math.isfinite(self.value)
        )
        if not finite:
            raise DomainError("value", self.value, "数值结果必须有限")
        if not (self.error_estimate >= 0.0):
            raise DomainError("error_estimate", self.error_estimate, "误差估计必须非负")

    def __float__(self) -> float:
        return float(self.value.real if isinstance(self.value, complex) else self.value)
