"""
测试特殊函数
"""
import math

import mpmath
import numpy as np
import pytest

from gml.core.exceptions import DomainError, RangeError
from gml.models import NumericMethod, PhiStarArgs
from gml.services.specfun import (
    dirichlet_eta,
    phi_star,
    phi_star_array,
    phi_star_minus_one,
    phi_star_value,
    riemann_zeta,
    zeta_even,
    zeta_odd_integral,
)


class TestRiemannZeta:
    """测试 Riemann ζ"""

    @pytest.mark.parametrize("s", [0.5, 1.5, 2.0, 3.0, 5.0, 7.5])
    def test_against_mpmath(self, s):
        """测试与 mpmath 一致"""
        assert riemann_zeta(s) == pytest.approx(float(mpmath.zeta(s)), rel=1e-11)

    def test_known_values(self):
        """测试已知数值"""
        assert riemann_zeta(2.0) == pytest.approx(math.pi**2 / 6.0, rel=1e-12)
        assert riemann_zeta(0.5) == pytest.approx(-1.4603545088095868, rel=1e-10)
        assert riemann_zeta(3.0) == pytest.approx(1.2020569031595942, rel=1e-11)

    def test_eta(self):
        """测试 η(1) = ln2"""
        assert dirichlet_eta(1.0).value == pytest.approx(math.log(2.0), rel=1e-12)

    def test_domain(self):
        """测试定义域"""
        with pytest.raises(DomainError):
            riemann_zeta(1.0)
        with pytest.raises(DomainError):
            riemann_zeta(1.0 + 1e-8)
        with pytest.raises(DomainError):
            riemann_zeta(-1.0)


class TestZetaEven:
    """测试偶数点闭式"""

    def test_basel(self):
        """测试 ζ(2) 与 ζ(4)"""
        assert zeta_even(2) == pytest.approx(math.pi**2 / 6.0, rel=1e-15)
        assert zeta_even(4) == pytest.approx(math.pi**4 / 90.0, rel=1e-15)

    @pytest.mark.parametrize("two_n", [6, 12, 20, 30, 40])
    def test_against_mpmath(self, two_n):
        """测试与 mpmath 一致"""
        assert zeta_even(two_n) == pytest.approx(float(mpmath.zeta(two_n)), rel=1e-14)

    def test_invalid(self):
        """测试非法输入"""
        with pytest.raises(DomainError):
            zeta_even(3)
        with pytest.raises(DomainError):
            zeta_even(0)
        with pytest.raises(RangeError):
            zeta_even(42)


class TestZetaOdd:
    """测试奇数点 Bernoulli 积分形式"""

    @pytest.mark.parametrize("k", [3, 5, 7, 9])
    def test_against_mpmath(self, k):
        """测试与 mpmath 一致"""
        assert zeta_odd_integral(k) == pytest.approx(float(mpmath.zeta(k)), rel=1e-10)

    def test_known_value(self):
        """测试 ζ(5)"""
        assert zeta_odd_integral(5) == pytest.approx(1.0369277551433699, rel=1e-10)

    def test_invalid(self):
        """测试非法输入"""
        with pytest.raises(DomainError):
            zeta_odd_integral(4)
        with pytest.raises(DomainError):
            zeta_odd_integral(1)
        with pytest.raises(RangeError):
            zeta_odd_integral(23)


class TestPhiStar:
    """测试广义 Hurwitz-Lerch Zeta"""

    def test_closed_values(self):
        """测试 Φ*_2(-1, s, 1) 的闭式"""
        assert phi_star_minus_one(1.0, 1.0, 2.0) == pytest.approx(0.5, abs=1e-12)
        assert phi_star_minus_one(2.0, 1.0, 2.0) == pytest.approx(math.log(2.0), rel=1e-11)
        assert phi_star_minus_one(3.0, 1.0, 2.0) == pytest.approx(math.pi**2 / 12.0, rel=1e-11)

    @pytest.mark.parametrize("n", [6, 8, 10, 12])
    def test_zeta_identity(self, n):
        """测试 Φ*_2(-1, n/2, 1) = 2^{-n/2}(2^{n/2}-4)ζ(n/2-1)"""
        half = n / 2
        expected = 2.0**-half * (2.0**half - 4.0) * float(mpmath.zeta(half - 1.0))
        assert phi_star_minus_one(half, 1.0, 2.0) == pytest.approx(expected, rel=1e-9)

    @pytest.mark.parametrize("s", [0.5, 2.0, 3.5])
    def test_zeta_from_lerch_constant(self, s):
        """测试 ζ(s) = Φ*_2(-1, s+1, 1) / (1 - 2^{1-s})"""
        value = phi_star_minus_one(s + 1.0, 1.0, 2.0) / (1.0 - 2.0 ** (1.0 - s))
        assert value == pytest.approx(riemann_zeta(s), rel=1e-10)

    def test_order_zero_closed_form(self):
        """测试 μ = 0 时为 a^{-s}"""
        result = phi_star_value(PhiStarArgs(z=-0.5, s=2.5, a=3.0, mu_order=0.0))
        assert result.method == NumericMethod.CLOSED_FORM
        assert result.value == pytest.approx(3.0**-2.5, rel=1e-15)

    @pytest.mark.parametrize(
        "z,s,a", [(-0.5, 2.0, 1.5), (0.5, 1.5, 0.75), (-1.0, 3.0, 2.0), (0.9, 2.5, 1.0)]
    )
    def test_lerch_reduction(self, z, s, a):
        """测试 μ = 1 时退化为 Lerch Φ"""
        expected = float(mpmath.lerchphi(z, s, a))
        value = phi_star(PhiStarArgs(z=z, s=s, a=a, mu_order=1.0))
        assert value == pytest.approx(expected, rel=1e-10)

    def test_complex_parameter(self):
        """测试复数 a"""
        a = 1.0 + 0.5j
        expected = complex(mpmath.lerchphi(-1, 2.0, a))
        value = phi_star(PhiStarArgs(z=-1.0, s=2.0, a=a, mu_order=1.0))
        assert isinstance(value, complex)
        assert abs(value - expected) <= 1e-9 * abs(expected)

    @pytest.mark.parametrize(
        "z,s,a,mu",
        [(-0.9, 1.5, 1.0, 2.0), (0.5, 2.0, 0.5, 1.5), (-0.3, 0.5, 2.0, 3.0), (0.8, 3.0, 1.2, 0.5)],
    )
    def test_series_quadrature_agreement(self, z, s, a, mu):
        """测试级数与求积两条路径一致"""
        args = PhiStarArgs(z=z, s=s, a=a, mu_order=mu)
        series = phi_star(args, NumericMethod.SERIES)
        quadrature = phi_star(args, NumericMethod.QUADRATURE)
        assert series == pytest.approx(quadrature, rel=1e-9)

    @pytest.mark.parametrize("mu", [0.0, 1.0, 2.0, 3.5])
    def test_series_quadrature_random_grid(self, mu):
        """测试随机参数上两条路径一致"""
        rng = np.random.default_rng(int(10 * mu) + 1)
        for _ in range(8):
            z = float(rng.uniform(-0.8, 0.8))
            s = float(rng.uniform(0.5, 4.0))
            a = float(rng.uniform(0.5, 3.0))
            args = PhiStarArgs(z=z, s=s, a=a, mu_order=mu)
            series = phi_star(args, NumericMethod.SERIES)
            quadrature = phi_star(args, NumericMethod.QUADRATURE)
            assert series == pytest.approx(quadrature, rel=1e-9)

    @pytest.mark.parametrize("mu", [1.0, 2.0, 3.5])
    def test_monotone_in_s(self, mu):
        """测试 a = 1 时对 s 的单调性：z > 0 递减，z = -1 递增"""
        grid = np.linspace(0.5, 10.0, 20)
        positive = [phi_star(PhiStarArgs(z=0.5, s=s, a=1.0, mu_order=mu)) for s in grid]
        alternating = [phi_star(PhiStarArgs(z=-1.0, s=s, a=1.0, mu_order=mu)) for s in grid]
        assert np.all(np.diff(positive) < 0.0)
        assert np.all(np.diff(alternating) > 0.0)
        # 两者都趋于首项 a^{-s} = 1
        assert positive[-1] == pytest.approx(1.0, abs=0.01)
        assert alternating[-1] == pytest.approx(1.0, abs=0.01)

    @pytest.mark.parametrize("a", [1.0 + 0.5j, 2.0 - 1.0j, 0.5 + 1.5j])
    @pytest.mark.parametrize("s", [1.5, 3.0])
    def test_conjugate_symmetry(self, a, s):
        """测试 Φ*(z, s, ā) = conj Φ*(z, s, a)"""
        value = phi_star(PhiStarArgs(z=-1.0, s=s, a=a, mu_order=2.0))
        mirrored = phi_star(PhiStarArgs(z=-1.0, s=s, a=a.conjugate(), mu_order=2.0))
        assert abs(mirrored - value.conjugate()) <= 1e-12 * abs(value)

    @pytest.mark.parametrize("z", [-1.0, -0.4, 0.6])
    def test_real_parameter_is_real(self, z):
        """测试实数 a 时结果为实数"""
        value = phi_star(PhiStarArgs(z=z, s=2.0, a=1.5, mu_order=2.0))
        assert isinstance(value, float)
        assert np.imag(value) == 0.0

    def test_series_radius(self):
        """测试级数路径的收敛半径限制"""
        with pytest.raises(DomainError):
            phi_star(PhiStarArgs(z=-1.0, s=2.0, a=1.0, mu_order=2.0), NumericMethod.SERIES)

    def test_invalid_arguments(self):
        """测试参数检查"""
        with pytest.raises(DomainError):
            PhiStarArgs(z=1.0, s=2.0, a=1.0, mu_order=1.0)
        with pytest.raises(DomainError):
            PhiStarArgs(z=0.5, s=0.0, a=1.0, mu_order=1.0)
        with pytest.raises(DomainError):
            PhiStarArgs(z=0.5, s=1.0, a=-1.0, mu_order=1.0)

    def test_array_matches_scalar(self):
        """测试向量化版本与逐点计算一致"""
        z = np.array([-1.0, -0.7, -0.2, 0.0, 0.4])
        values = phi_star_array(z, 1.5, 1.0, 2.0)
        expected = [phi_star(PhiStarArgs(z=float(v), s=1.5, a=1.0, mu_order=2.0)) for v in z]
        np.testing.assert_allclose(values, expected, rtol=1e-10)
