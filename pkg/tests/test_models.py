"""
测试数据模型
"""
import math

import numpy as np
import pytest
from pydantic import ValidationError

from gml.core.config import Settings
from gml.core.exceptions import DomainError, ShapeError
from gml.models import (
    CheckResult,
    CliCommand,
    CliConfig,
    DistributionConfig,
    GeneratorParams,
    NumericMethod,
    NumericValue,
    QuadratureSpec,
    SampleBatch,
    ValidationReport,
)


class TestGeneratorParams:
    """测试生成函数参数"""

    def test_presets(self):
        """测试经典与正态预设"""
        classic = GeneratorParams.classic()
        assert (classic.a, classic.b, classic.r) == (1.0, 1.0, 2.0)
        assert not classic.is_normal
        assert GeneratorParams.normal().is_normal
        assert GeneratorParams(a=2.0, b=1.0, r=1.0).ratio == 0.5

    def test_frozen_and_hashable(self):
        """测试冻结模型可作为缓存键"""
        params = GeneratorParams.classic()
        with pytest.raises(ValidationError):
            params.a = 2.0
        assert hash(params) == hash(GeneratorParams(a=1.0, b=1.0, r=2.0))

    @pytest.mark.parametrize(
        "fields",
        [
            {"a": 0.0, "b": 1.0, "r": 1.0},
            {"a": 1.0, "b": -1.0, "r": 1.0},
            {"a": 1.0, "b": 1.0, "r": -0.5},
            {"a": math.inf, "b": 1.0, "r": 1.0},
        ],
    )
    def test_invalid(self, fields):
        """测试参数约束"""
        with pytest.raises(ValidationError):
            GeneratorParams(**fields)


class TestNumericValue:
    """测试数值结果容器"""

    def test_float_conversion(self):
        """测试转换为浮点数"""
        assert float(NumericValue(1.5, 0.0, NumericMethod.SERIES)) == 1.5
        assert float(NumericValue(2.0 + 1.0j, 1e-12, NumericMethod.QUADRATURE)) == 2.0

    def test_non_finite(self):
        """测试非有限值被拒绝"""
        with pytest.raises(DomainError):
            NumericValue(math.nan, 0.0, NumericMethod.SERIES)
        with pytest.raises(DomainError):
            NumericValue(1.0, -1.0, NumericMethod.SERIES)


class TestQuadratureSpec:
    """测试求积参数"""

    def test_defaults_from_settings(self):
        """测试缺省值取自配置"""
        spec = QuadratureSpec()
        assert spec.relative_tolerance == 1e-12
        assert spec.max_refinement_levels == 12

    def test_tolerance_for(self):
        """测试接受阈值"""
        spec = QuadratureSpec(relative_tolerance=1e-8, absolute_tolerance=1e-14)
        assert spec.tolerance_for(10.0) == pytest.approx(1e-7)
        assert spec.tolerance_for(0.0) == 1e-14

    def test_invalid(self):
        """测试非法容差"""
        with pytest.raises(ValidationError):
            QuadratureSpec(relative_tolerance=0.0)

    def test_settings_environment(self, monkeypatch):
        """测试 GML_ 前缀环境变量覆盖配置"""
        monkeypatch.setenv("GML_QUAD_TOL", "1e-10")
        monkeypatch.setenv("GML_LOG_LEVEL", "debug")
        settings = Settings()
        assert settings.quad_tol == 1e-10
        assert settings.log_level == "DEBUG"


class TestValidationReport:
    """测试校验报告"""

    def test_standard_error_band(self):
        """测试通过判据取容差与3倍标准误的较大者"""
        assert CheckResult(
            name="x", expected=1.0, observed=1.02, tolerance=0.0, standard_error=0.01
        ).passed
        assert not CheckResult(
            name="x", expected=1.0, observed=1.04, tolerance=0.0, standard_error=0.01
        ).passed
        assert CheckResult(name="x", expected=1.0, observed=1.04, tolerance=0.05).passed

    def test_nan_fails(self):
        """测试NaN观测值视为失败"""
        assert not CheckResult(name="x", expected=1.0, observed=math.nan, tolerance=1.0).passed

    def test_report_aggregation(self):
        """测试报告的合并与序列化"""
        report = ValidationReport(suite="unit", seed=4)
        report.add("ok", 1.0, 1.0, 0.0)
        other = ValidationReport(suite="inner")
        other.add("bad", 0.0, 1.0, 0.5)
        report.extend(other, "inner.")
        assert not report.passed
        assert [check.name for check in report.failed_checks] == ["inner.bad"]
        dumped = report.model_dump()
        assert dumped["passed"] is False
        assert dumped["checks"][0]["passed"] is True

    def test_elapsed_not_compared(self):
        """测试耗时不参与比较与序列化"""
        first = ValidationReport(suite="unit", seed=4, elapsed=0.5)
        second = ValidationReport(suite="unit", seed=4, elapsed=2.0)
        first.add("ok", 1.0, 1.0, 0.0)
        second.add("ok", 1.0, 1.0, 0.0)
        assert first == second
        assert first.model_dump_json() == second.model_dump_json()
        second.add("extra", 0.0, 0.0, 0.0)
        assert first != second

    def test_empty_report_passes(self):
        """测试空报告"""
        assert ValidationReport(suite="empty").passed


class TestSampleBatch:
    """测试抽样批次"""

    def test_read_only(self):
        """测试样本只读"""
        batch = SampleBatch(draws=np.zeros((2, 3)), seed=1, count=2)
        assert batch.dim == 3
        with pytest.raises(ValueError):
            batch.draws[0, 0] = 1.0

    def test_shape_checks(self):
        """测试形状与行数"""
        with pytest.raises(ShapeError):
            SampleBatch(draws=np.zeros(3), seed=1, count=3)
        with pytest.raises(ShapeError):
            SampleBatch(draws=np.zeros((2, 2)), seed=1, count=3)
        with pytest.raises(DomainError):
            SampleBatch(draws=np.full((1, 2), np.inf), seed=1, count=1)


class TestDistributionConfig:
    """测试分布参数集"""

    def test_identity_default(self):
        """测试缺省参数"""
        config = DistributionConfig()
        np.testing.assert_array_equal(config.sigma_matrix(), np.eye(2))
        np.testing.assert_array_equal(config.mu_vector(), [0.0, 0.0])
        assert config.params == GeneratorParams.classic()

    def test_row_major_sigma(self):
        """测试行优先展开"""
        config = DistributionConfig(n=2, sigma=[1.0, 0.3, 0.3, 2.0])
        assert config.sigma_matrix()[1, 1] == 2.0
        assert config.metadata()["sigma"] == [1.0, 0.3, 0.3, 2.0]

    @pytest.mark.parametrize(
        "fields",
        [
            {"n": 2, "mu": [0.0]},
            {"n": 2, "sigma": [1.0, 0.0, 0.0]},
            {"n": 2, "sigma": [1.0, 0.5, 0.4, 1.0]},
            {"n": 0},
            {"a": -1.0},
        ],
    )
    def test_invalid(self, fields):
        """测试形状与约束检查"""
        with pytest.raises(ValidationError):
            DistributionConfig(**fields)

    def test_cli_config(self):
        """测试命令行配置"""
        config = CliConfig(command="pdf-grid", resolution=11)
        assert config.command is CliCommand.PDF_GRID
        assert config.method == "auto"
        with pytest.raises(ValidationError):
            CliConfig(command="pdf-grid", resolution=1)
