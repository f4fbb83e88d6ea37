"""
校验报告模型

单项检查的通过判据：|expected - observed| <= max(tolerance, 3·standard_error)。
复数量按实部、虚部拆成两项检查。
"""

from typing import List, Optional

from pydantic import BaseModel, Field, computed_field

STANDARD_ERROR_BAND = 3.0


class CheckResult(BaseModel):
    """单项检查结果"""

    name: str = Field(..., description="检查名称")
    expected: float = Field(..., description="理论值（闭式或独立数值路径）")
    observed: float = Field(..., description="观测值")
    tolerance: float = Field(..., description="确定性容差", ge=0.0)
    standard_error: Optional[float] = Field(
        default=None, description="蒙特卡洛标准误", ge=0.0
    )

    @computed_field
    @property
    def passed(self) -> bool:
        """是否通过；NaN观测值视为失败"""
        band = self.tolerance
        if self.standard_error is not None:
            band = max(band, STANDARD_ERROR_BAND * self.standard_error)
        return bool(abs(self.expected - self.observed) <= band)

    @property
    def deviation(self) -> float:
        return abs(self.expected - self.observed)


class ValidationReport(BaseModel):
    """
    校验报告

    由 (seed, 参数) 唯一确定：相同种子的两份报告相等，序列化结果逐字节相同。
    elapsed 为墙钟时间，只写日志，不参与比较与序列化。
    """

    suite: str = Field(..., description="套件或检查名称")
    checks: List[CheckResult] = Field(default_factory=list, description="检查列表")
    seed: int = Field(default=0, description="随机种子")
    elapsed: float = Field(default=0.0, description="耗时（秒）", ge=0.0, exclude=True)

    @computed_field
    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ValidationReport):
            return NotImplemented
        return self.model_dump() == other.model_dump()

    @property
    def failed_checks(self) -> List[CheckResult]:
        return [check for check in self.checks if not check.passed]

    def add(
        self,
        name: str,
        expected: float,
        observed: float,
        tolerance: float,
        standard_error: Optional[float] = None,
    ) -> CheckResult:
        """追加一项检查并返回它"""
        check = CheckResult(
            name=name,
            expected=float(expected),
            observed=float(observed),
            tolerance=float(tolerance),
            standard_error=None if standard_error is None else float(standard_error),
        )
        self.checks.append(check)
        return check

    def extend(self, other: "ValidationReport", prefix: str = "") -> None:
        """合并另一份报告的检查"""
        for check in other.checks:
            self.checks.append(
                check.model_copy(update={"name": f"{prefix}{check.name}"})
            )
