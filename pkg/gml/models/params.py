"""
生成函数参数与Lerch型函数参数模型
"""

from dataclasses import dataclass
from typing import Union

from pydantic import BaseModel, ConfigDict, Field

from ..core.exceptions import DomainError


class GeneratorParams(BaseModel):
    """
    密度生成函数 g(u) = exp(-b·u) / (1 + exp(-a·u))^r 的参数

    r = 0 时退化为多元正态（b = 1/2 即标准正态的生成函数）。
    冻结模型，可作为缓存键。
    """

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    a: float = Field(..., description="Logistic项的尺度参数", gt=0.0)
    b: float = Field(..., description="指数衰减率", gt=0.0)
    r: float = Field(..., description="Logistic项的幂次，0为正态情形", ge=0.0)

    @classmethod
    def classic(cls) -> "GeneratorParams":
        """经典椭圆对称Logistic分布 (a=b=1, r=2)"""
        return cls(a=1.0, b=1.0, r=2.0)

    @classmethod
    def normal(cls, a: float = 1.0) -> "GeneratorParams":
        """多元正态情形 (b=1/2, r=0)，a 不影响分布"""
        return cls(a=a, b=0.5, r=0.0)

    @property
    def ratio(self) -> float:
        """b/a，即 Φ* 的第三个参数"""
        return self.b / self.a

    @property
    def is_normal(self) -> bool:
        return self.r == 0.0


@dataclass(frozen=True)
class PhiStarArgs:
    """
    广义Hurwitz-Lerch Zeta函数 Φ*_μ(z, s, a) 的参数

    Attributes:
        z: 实数，取值 [-1, 1)
        s: 阶参数，s > 0
        a: 实数或复数，Re(a) > 0
        mu_order: 下标 μ ≥ 0
    """

    z: float
    s: float
    a: Union[float, complex]
    mu_order: float

    def __post_init__(self) -> None:
        if not (-1.0 <= self.z < 1.0):
            raise DomainError("z", self.z, "要求 -1 <= z < 1")
        if not (self.s > 0.0):
            raise DomainError("s", self.s, "要求 s > 0")
        if not (complex(self.a).real > 0.0):
            raise DomainError("a", self.a, "要求 Re(a) > 0")
        if not (self.mu_order >= 0.0):
            raise DomainError("mu_order", self.mu_order, "要求 μ >= 0")

    @property
    def is_complex(self) -> bool:
        return isinstance(self.a, complex) and self.a.imag != 0.0
