"""
测试GML分布对象：密度、矩、抽样与特征函数
"""
import logging
import math

import numpy as np
import pytest
from scipy import special, stats

from gml.core.exceptions import ConvergenceError, DomainError, RangeError, ShapeError
from gml.models import DistributionConfig, GeneratorParams
from gml.services.distribution import GmlDistribution, cf_1d, omega_n

CLASSIC = GeneratorParams.classic()
NORMAL = GeneratorParams.normal()
SIGMA_2D = np.array([[1.0, 0.3], [0.3, 2.0]])


@pytest.fixture
def classic_planar():
    return GmlDistribution(np.zeros(2), np.eye(2), CLASSIC)


@pytest.fixture
def correlated_normal():
    sigma = np.array([[2.0, 0.3, 0.1], [0.3, 1.0, -0.2], [0.1, -0.2, 1.5]])
    return GmlDistribution([0.5, -1.0, 2.0], sigma, NORMAL)


class TestConstruction:
    """测试构造与参数检查"""

    def test_attributes(self, classic_planar):
        """测试基本属性"""
        assert classic_planar.dim == 2
        assert classic_planar.d_n == pytest.approx(2.0 / math.pi, rel=1e-12)
        assert classic_planar.log_det == pytest.approx(0.0, abs=1e-15)
        np.testing.assert_allclose(classic_planar.factor @ classic_planar.factor.T, np.eye(2))

    def test_read_only(self, classic_planar):
        """测试参数数组不可写"""
        with pytest.raises(ValueError):
            classic_planar.mu[0] = 1.0

    def test_shape_mismatch(self):
        """测试形状不匹配"""
        with pytest.raises(ShapeError):
            GmlDistribution([0.0, 0.0], np.eye(3), CLASSIC)

    def test_asymmetric_sigma(self):
        """测试不对称的离差矩阵"""
        with pytest.raises(DomainError):
            GmlDistribution([0.0, 0.0], [[1.0, 0.5], [0.4, 1.0]], CLASSIC)

    def test_indefinite_sigma(self):
        """测试非正定的离差矩阵"""
        with pytest.raises(DomainError):
            GmlDistribution([0.0, 0.0], [[1.0, 2.0], [2.0, 1.0]], CLASSIC)

    def test_from_config(self):
        """测试由配置构造"""
        config = DistributionConfig(n=2, mu=[1.0, 2.0], sigma=[1.0, 0.3, 0.3, 2.0])
        dist = GmlDistribution.from_config(config)
        np.testing.assert_array_equal(dist.mu, [1.0, 2.0])
        np.testing.assert_array_equal(dist.sigma, SIGMA_2D)
        assert dist.params == CLASSIC


class TestDensity:
    """测试密度"""

    def test_centre_value(self, classic_planar):
        """测试 n=2 经典情形 f(0) = 1/(2π)"""
        assert classic_planar.pdf([0.0, 0.0]) == pytest.approx(1.0 / (2.0 * math.pi), rel=1e-12)

    def test_normal_matches_scipy(self, correlated_normal):
        """测试正态情形与 scipy 一致"""
        reference = stats.multivariate_normal(correlated_normal.mu, correlated_normal.sigma)
        points = np.random.default_rng(0).normal(size=(20, 3)) * 2.0
        np.testing.assert_allclose(correlated_normal.pdf(points), reference.pdf(points), rtol=1e-12)
        np.testing.assert_allclose(
            correlated_normal.log_pdf(points), reference.logpdf(points), rtol=1e-12
        )

    def test_log_pdf_far_tail(self, classic_planar):
        """测试远尾处 log_pdf 有限而 pdf 下溢"""
        point = [100.0, 0.0]
        assert classic_planar.pdf(point) == 0.0
        assert math.isfinite(classic_planar.log_pdf(point))
        assert classic_planar.log_pdf(point) == pytest.approx(
            math.log(2.0 / math.pi) - 1e4, rel=1e-12
        )

    def test_symmetry(self):
        """测试关于 μ 的中心对称"""
        dist = GmlDistribution([1.0, -1.0], SIGMA_2D, CLASSIC)
        delta = np.array([[0.4, 1.3], [-2.0, 0.1], [3.0, 3.0]])
        np.testing.assert_allclose(dist.pdf(dist.mu + delta), dist.pdf(dist.mu - delta), rtol=1e-14)

    def test_monotone_in_mahalanobis(self):
        """测试密度随二次型单调递减"""
        dist = GmlDistribution([0.0, 0.0], SIGMA_2D, CLASSIC)
        points = np.outer(np.linspace(0.0, 6.0, 50), [1.0, 1.0])
        q = dist.mahalanobis(points)
        assert np.all(np.diff(q) > 0.0)
        assert np.all(np.diff(dist.pdf(points)) < 0.0)

    def test_single_point_and_batch(self, classic_planar):
        """测试单点返回标量、批量返回数组"""
        assert isinstance(classic_planar.pdf([0.0, 1.0]), float)
        values = classic_planar.pdf(np.zeros((4, 2)))
        assert values.shape == (4,)

    def test_univariate_points(self):
        """测试 n=1 时一维数组视为多个点"""
        dist = GmlDistribution([0.0], [[1.0]], CLASSIC)
        values = dist.pdf(np.array([-1.0, 0.0, 1.0]))
        assert values.shape == (3,)
        assert values[0] == pytest.approx(values[2], rel=1e-15)

    def test_wrong_point_length(self, classic_planar):
        """测试点的长度不是 n"""
        with pytest.raises(ShapeError):
            classic_planar.pdf([0.0, 0.0, 0.0])


class TestMoments:
    """测试均值、协方差与乘积矩"""

    def test_classic_covariance(self):
        """测试 n=2 经典情形 Cov = ln2·Σ"""
        dist = GmlDistribution([1.0, 2.0], SIGMA_2D, CLASSIC)
        np.testing.assert_array_equal(dist.mean(), [1.0, 2.0])
        assert dist.cov_scale() == pytest.approx(math.log(2.0), rel=1e-11)
        np.testing.assert_allclose(dist.cov(), math.log(2.0) * SIGMA_2D, rtol=1e-11)

    def test_normal_covariance(self, correlated_normal):
        """测试正态情形 Cov = Σ"""
        np.testing.assert_allclose(correlated_normal.cov(), correlated_normal.sigma, rtol=1e-13)

    def test_product_moments_normal(self, correlated_normal):
        """测试正态情形标准化分量的矩"""
        assert correlated_normal.product_moment([1, 0, 0]) == pytest.approx(1.0, rel=1e-13)
        assert correlated_normal.product_moment([2, 0, 0]) == pytest.approx(3.0, rel=1e-13)
        assert correlated_normal.product_moment([1, 1, 0]) == pytest.approx(1.0, rel=1e-13)
        assert correlated_normal.product_moment([0, 0, 0]) == 1.0

    def test_product_moment_matches_cov_scale(self, classic_planar):
        """测试二阶乘积矩等于协方差因子"""
        assert classic_planar.product_moment([1, 0]) == pytest.approx(
            classic_planar.cov_scale(), rel=1e-11
        )

    def test_product_moment_invalid(self, classic_planar):
        """测试非法阶数"""
        with pytest.raises(ShapeError):
            classic_planar.product_moment([1])
        with pytest.raises(DomainError):
            classic_planar.product_moment([-1, 0])


class TestSampling:
    """测试精确抽样"""

    def test_deterministic(self):
        """测试相同种子得到相同样本"""
        dist = GmlDistribution([0.0, 1.0], SIGMA_2D, CLASSIC)
        first = dist.sample(2000, seed=5)
        second = dist.sample(2000, seed=5)
        np.testing.assert_array_equal(first.draws, second.draws)
        assert first.seed == 5
        assert first.count == 2000
        assert not np.array_equal(first.draws, dist.sample(2000, seed=6).draws)

    def test_independent_of_workers(self):
        """测试结果与线程数无关"""
        dist = GmlDistribution([0.0, 1.0], SIGMA_2D, CLASSIC)
        serial = dist.sample(250_000, seed=9)
        parallel = dist.sample(250_000, seed=9, workers=4)
        np.testing.assert_array_equal(serial.draws, parallel.draws)

    def test_zero_count(self, classic_planar):
        """测试抽样0个"""
        batch = classic_planar.sample(0, seed=1)
        assert batch.draws.shape == (0, 2)
        assert batch.dim == 2

    def test_invalid_arguments(self, classic_planar):
        """测试非法的数量与种子"""
        with pytest.raises(DomainError):
            classic_planar.sample(-1, seed=1)
        with pytest.raises(DomainError):
            classic_planar.sample(10, seed=-1)

    def test_sample_moments(self):
        """测试样本均值与协方差落在4个标准误之内"""
        dist = GmlDistribution([1.0, -2.0], SIGMA_2D, CLASSIC)
        draws = dist.sample(200_000, seed=42).draws
        count = draws.shape[0]
        mean_error = np.std(draws, axis=0) / math.sqrt(count)
        assert np.all(np.abs(draws.mean(axis=0) - dist.mean()) < 4.0 * mean_error)
        centered = draws - dist.mean()
        products = centered[:, 0] * centered[:, 1]
        cov_error = np.std(products) / math.sqrt(count)
        assert abs(products.mean() - dist.cov()[0, 1]) < 4.0 * cov_error

    @pytest.mark.slow
    def test_large_sample_variance(self):
        """测试 10^6 个样本的方差"""
        dist = GmlDistribution(np.zeros(3), np.eye(3), CLASSIC)
        draws = dist.sample(1_000_000, seed=2024).draws
        squares = draws[:, 0] ** 2
        error = np.std(squares) / math.sqrt(squares.size)
        assert abs(squares.mean() - dist.cov()[0, 0]) < 4.0 * error


class TestOmega:
    """测试单位球面均匀分布的特征函数 Ω_n"""

    @pytest.mark.parametrize("y", [0.5, 4.0, 20.0, 80.0, 900.0])
    def test_closed_forms(self, y):
        """测试 n=1、2、3 的闭式"""
        root = math.sqrt(y)
        assert omega_n(1, y) == pytest.approx(math.cos(root), abs=1e-12)
        assert omega_n(2, y) == pytest.approx(special.j0(root), abs=1e-12)
        assert omega_n(3, y) == pytest.approx(math.sin(root) / root, abs=1e-12)

    def test_at_zero(self):
        """测试 Ω_n(0) = 1"""
        for n in (1, 2, 5, 10):
            assert omega_n(n, 0.0) == 1.0
            assert omega_n(n, 0.0, method="bessel") == 1.0

    @pytest.mark.parametrize("n", [2, 4, 7])
    @pytest.mark.parametrize("y", [1.0, 10.0, 30.0])
    def test_method_agreement(self, n, y):
        """测试级数、Bessel与求积三条路径一致"""
        series = omega_n(n, y, method="series")
        assert omega_n(n, y, method="bessel") == pytest.approx(series, abs=1e-12)
        assert omega_n(n, y, method="quadrature") == pytest.approx(series, abs=1e-11)

    def test_array_shape(self):
        """测试数组输入保持形状"""
        values = omega_n(3, np.array([[0.0, 1.0], [50.0, 100.0]]))
        assert values.shape == (2, 2)

    def test_invalid(self):
        """测试非法输入"""
        with pytest.raises(DomainError):
            omega_n(2, -1.0)
        with pytest.raises(DomainError):
            omega_n(0, 1.0)
        with pytest.raises(DomainError):
            omega_n(2, 1.0, method="taylor")


class TestCharacteristicFunction:
    """测试特征函数"""

    @pytest.mark.parametrize("t", [0.0, 0.3, 1.0, 2.5])
    def test_univariate_normal(self, t):
        """测试一维正态情形"""
        mu, sigma = 0.5, 1.3
        expected = complex(math.cos(t * mu), math.sin(t * mu)) * math.exp(-0.5 * (t * sigma) ** 2)
        value = cf_1d(t, mu, sigma, NORMAL)
        assert abs(value - expected) < 1e-10

    @pytest.mark.parametrize("t", [0.4, 1.5])
    def test_univariate_matches_distribution(self, t):
        """测试 cf_1d 与一维分布对象的求积路径一致"""
        dist = GmlDistribution([0.2], [[2.25]], CLASSIC)
        assert abs(cf_1d(t, 0.2, 1.5, CLASSIC) - dist.cf_quadrature([t])) < 1e-9

    def test_univariate_limits(self):
        """测试 cf_1d 的参数检查"""
        with pytest.raises(RangeError):
            cf_1d(2000.0, 0.0, 1.0, CLASSIC)
        with pytest.raises(DomainError):
            cf_1d(1.0, 0.0, 0.0, CLASSIC)

    @pytest.mark.parametrize("t", [(0.3, -0.2), (1.0, 0.5), (0.0, 0.0)])
    @pytest.mark.parametrize("method", ["auto", "series", "quadrature"])
    def test_normal_closed_form(self, t, method):
        """测试正态情形 ψ(t) = exp(it'μ - t'Σt/2)"""
        mu = np.array([0.5, -1.0])
        dist = GmlDistribution(mu, SIGMA_2D, NORMAL)
        vector = np.asarray(t)
        expected = np.exp(1j * (vector @ mu) - 0.5 * (vector @ SIGMA_2D @ vector))
        assert abs(dist.cf(t, method) - expected) < 1e-10

    @pytest.mark.parametrize("t", [(0.5, 0.4), (1.5, -1.0), (3.0, 2.0)])
    def test_two_paths_agree(self, t):
        """测试级数与求积两条路径一致"""
        dist = GmlDistribution([0.5, -0.5], SIGMA_2D, CLASSIC)
        assert abs(dist.cf_series(t) - dist.cf_quadrature(t)) < 1e-8

    def test_real_for_centred(self, classic_planar):
        """测试 μ = 0 时特征函数为实数且有界"""
        value = classic_planar.cf([0.7, 0.2])
        assert value.imag == 0.0
        assert 0.0 < value.real < 1.0

    def test_alternating_signs_matter(self):
        """测试去掉交错符号的级数与真值明显不同"""
        dist = GmlDistribution([0.0, 0.0], SIGMA_2D, CLASSIC)
        t = (1.0, 0.5)
        assert abs(dist.cf_series(t, alternating=False) - dist.cf(t)) > 0.1

    def test_auto_falls_back_to_quadrature(self, caplog):
        """测试级数超出抵消预算时自动改用求积"""
        dist = GmlDistribution([0.0, 0.0], np.eye(2), NORMAL)
        t = (5.0, 5.0)
        with pytest.raises(ConvergenceError):
            dist.cf_series(t)
        with caplog.at_level(logging.WARNING):
            value = dist.cf(t)
        assert abs(value - math.exp(-25.0)) < 1e-9
        assert any("求积" in record.getMessage() for record in caplog.records)

    def test_shape_and_method_errors(self, classic_planar):
        """测试自变量长度与未知方法"""
        with pytest.raises(ShapeError):
            classic_planar.cf([1.0])
        with pytest.raises(DomainError):
            classic_planar.cf([1.0, 0.0], method="fft")
