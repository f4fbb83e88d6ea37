"""
特殊函数

实参 s > 0 的 Riemann ζ 函数（交错 η 级数）、偶数点的 Bernoulli 闭式、
奇数点的 Bernoulli 多项式积分形式，以及广义 Hurwitz-Lerch Zeta 函数

    Φ*_μ(z, s, a) = (1/Γ(s)) ∫₀^∞ t^{s-1} e^{-at} (1 - z e^{-t})^{-μ} dt

z ∈ [-1, 1)，a 为实数或 Re(a) > 0 的复数。
"""

import logging
import math
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Union

import numpy as np
from scipy.special import gammaln

from ..core.exceptions import ConvergenceError, DomainError, RangeError
from ..models import NumericMethod, NumericValue, PhiStarArgs, QuadratureSpec
from .numerics import (
    alternating_series_sum,
    bernoulli_numbers_exact,
    bernoulli_polynomial,
    integrate_finite,
    integrate_semi_infinite,
    integrate_semi_infinite_array,
)

logger = logging.getLogger(__name__)

ZETA_POLE_EXCLUSION = 1e-6
ZETA_EVEN_MAX = 40
ZETA_ODD_MAX = 21
SERIES_RADIUS = 0.95
SERIES_MAX_TERMS = 20_000
Z_BLOCK = 512

Scalar = Union[float, complex]


# ============================================================================
# Riemann ζ
# ============================================================================


def dirichlet_eta(s: float, spec: Optional[QuadratureSpec] = None) -> NumericValue:
    """η(s) = Σ (-1)^{j-1} j^{-s}，Euler变换求和"""
    if not (s > 0.0):
        raise DomainError("s", s, "η 级数要求 s > 0")
    return alternating_series_sum(
        lambda j: (-1.0) ** (j - 1) * float(j) ** (-s), spec, label=f"eta({s})"
    )


def riemann_zeta(s: float, spec: Optional[QuadratureSpec] = None) -> float:
    """
    Riemann ζ(s)，s > 0 且 s ≠ 1

    ζ(s) = η(s) / (1 - 2^{1-s})

    Raises:
        DomainError: s <= 0 或 |s - 1| < 1e-6
    """
    if not (s > 0.0):
        raise DomainError("s", s, "要求 s > 0")
    if abs(s - 1.0) < ZETA_POLE_EXCLUSION:
        raise DomainError("s", s, "s = 1 是极点")
    eta = dirichlet_eta(s, spec).value
    return eta / -math.expm1((1.0 - s) * math.log(2.0))


def zeta_even(two_n: int) -> float:
    """
    偶数点 ζ(2n) = (-1)^{n+1} 2^{2n-1} π^{2n} B_{2n} / (2n)!

    有理因子精确计算后再乘 π^{2n}。

    Raises:
        DomainError: 奇数或非正输入
        RangeError: 超过 40
    """
    if two_n <= 0 or two_n % 2 != 0:
        raise DomainError("two_n", two_n, "要求正偶数")
    if two_n > ZETA_EVEN_MAX:
        raise RangeError("two_n", two_n, ZETA_EVEN_MAX)
    n = two_n // 2
    bernoulli = bernoulli_numbers_exact(two_n)[two_n]
    rational = (-1) ** (n + 1) * Fraction(2) ** (two_n - 1) * bernoulli
    rational /= math.factorial(two_n)
    return float(rational) * math.pi**two_n


def zeta_odd_integral(
    two_n_plus_1: int, spec: Optional[QuadratureSpec] = None
) -> float:
    """
    奇数点 ζ(2n+1) 的 Bernoulli 多项式积分形式

    ζ(2n+1) = (-1)^{n+1} (2π)^{2n+1} / (2(2n+1)!) ∫₀¹ B_{2n+1}(u) cot(πu) du

    被积函数关于 u = 1/2 对称，只在 (0, 1/2) 上求积，避开 u = 1 处
    cot 的抵消。
    """
    k = two_n_plus_1
    if k % 2 == 0:
        raise DomainError("two_n_plus_1", k, "要求奇数")
    if k < 3:
        raise DomainError("two_n_plus_1", k, "要求 >= 3")
    if k > ZETA_ODD_MAX:
        raise RangeError("two_n_plus_1", k, ZETA_ODD_MAX)
    n = (k - 1) // 2
    half = integrate_finite(
        lambda u: bernoulli_polynomial(k, u) / np.tan(np.pi * u), 0.0, 0.5, spec
    )
    factor = (-1) ** (n + 1) * (2.0 * math.pi) ** k / (2.0 * math.factorial(k))
    return factor * 2.0 * half.value


# ============================================================================
# 广义 Hurwitz-Lerch Zeta
# ============================================================================


def _peak_scale(s: float, a: Scalar) -> float:
    return max(s - 1.0, 1.0) / complex(a).real


@lru_cache(maxsize=8192)
def _phi_star_quadrature(
    z: float,
    s: float,
    a: Scalar,
    mu: float,
    spec: QuadratureSpec,
) -> NumericValue:
    log_gamma = float(gammaln(s))

    def integrand(t: np.ndarray) -> np.ndarray:
        log_value = (s - 1.0) * np.log(t) - a * t - log_gamma
        log_value = log_value - mu * np.log1p(-z * np.exp(-t))
        return np.exp(log_value)

    return integrate_semi_infinite(integrand, s - 1.0, spec, scale=_peak_scale(s, a))


def _phi_star_series(
    z: float, s: float, a: float, mu: float, spec: QuadratureSpec
) -> NumericValue:
    """Σ_{n>=0} [Γ(μ+n)/(Γ(μ) n!)] z^n (n+a)^{-s}，系数按 c_n = c_{n-1}(μ+n-1)/n 递推"""
    coefficient = 1.0
    terms = [a ** (-s)]
    running = terms[0]
    magnitude = abs(terms[0])
    for n in range(1, SERIES_MAX_TERMS):
        coefficient *= (mu + n - 1.0) / n * z
        term = coefficient * (n + a) ** (-s)
        terms.append(term)
        running += term
        magnitude += abs(term)
        if n > mu + 1.0 and abs(term) <= 0.25 * np.finfo(float).eps * abs(running):
            total = math.fsum(terms)
            tail = abs(term) * abs(z) / (1.0 - abs(z))
            error = tail + len(terms) * np.finfo(float).eps * magnitude
            logger.debug("Φ* 级数使用%d项", len(terms))
            return NumericValue(total, error, NumericMethod.SERIES)
    total = math.fsum(terms)
    raise ConvergenceError("phi_star series", total, abs(terms[-1]), SERIES_MAX_TERMS)


def phi_star_value(
    args: PhiStarArgs,
    method: NumericMethod = NumericMethod.QUADRATURE,
    spec: Optional[QuadratureSpec] = None,
) -> NumericValue:
    """
    Φ*_μ(z, s, a) 及其误差估计

    μ = 0 或 z = 0 时直接返回闭式 a^{-s}。主路径为积分表示的求积；
    级数路径仅用于 |z| < 0.95 的实参数交叉校验。

    Args:
        args: 参数（构造时已完成定义域检查）
        method: QUADRATURE 或 SERIES
        spec: 精度参数

    Raises:
        DomainError: 级数路径遇到复数 a 或 |z| >= 0.95
        ConvergenceError: 求积或级数未收敛
    """
    spec = spec or QuadratureSpec()
    a = args.a if args.is_complex else float(complex(args.a).real)
    if args.mu_order == 0.0 or args.z == 0.0:
        return NumericValue(a ** (-args.s), 0.0, NumericMethod.CLOSED_FORM)

    if method is NumericMethod.SERIES:
        if args.is_complex:
            raise DomainError("a", args.a, "复数 a 只支持求积路径")
        if abs(args.z) >= SERIES_RADIUS:
            raise DomainError("z", args.z, f"级数路径要求 |z| < {SERIES_RADIUS}")
        return _phi_star_series(args.z, args.s, a, args.mu_order, spec)
    if method is NumericMethod.CLOSED_FORM:
        raise DomainError("method", method.value, "闭式仅在 μ = 0 或 z = 0 时可用")
    return _phi_star_quadrature(args.z, args.s, a, args.mu_order, spec)


def phi_star(
    args: PhiStarArgs,
    method: NumericMethod = NumericMethod.QUADRATURE,
    spec: Optional[QuadratureSpec] = None,
) -> Scalar:
    """Φ*_μ(z, s, a) 的值；复数 a 时返回复数"""
    return phi_star_value(args, method, spec).value


def phi_star_minus_one(
    s: float, a: float, mu: float, spec: Optional[QuadratureSpec] = None
) -> float:
    """Φ*_μ(-1, s, a)，归一化常数与矩公式中反复出现的情形"""
    return float(phi_star(PhiStarArgs(z=-1.0, s=s, a=a, mu_order=mu), spec=spec))


def phi_star_array(
    z: np.ndarray,
    s: float,
    a: float,
    mu: float,
    spec: Optional[QuadratureSpec] = None,
) -> np.ndarray:
    """
    对一组 z 同时求 Φ*_μ(z, s, a)（实参数 a）

    同一组求积节点上向量化求值，z 按块处理以限制内存。
    """
    z = np.asarray(z, dtype=float)
    if np.any(z < -1.0) or np.any(z >= 1.0):
        raise DomainError("z", "array", "要求 -1 <= z < 1")
    if not (s > 0.0 and a > 0.0 and mu >= 0.0):
        raise DomainError("(s, a, mu)", (s, a, mu), "要求 s > 0, a > 0, μ >= 0")
    flat = z.ravel()
    if mu == 0.0 or flat.size == 0:
        return np.full(z.shape, a ** (-s))

    spec = spec or QuadratureSpec()
    log_gamma = float(gammaln(s))
    result = np.empty(flat.size)
    for start in range(0, flat.size, Z_BLOCK):
        block = flat[start : start + Z_BLOCK]

        def integrand(t: np.ndarray, block=block) -> np.ndarray:
            base = (s - 1.0) * np.log(t) - a * t - log_gamma
            shift = np.log1p(-np.outer(np.exp(-t), block))
            return np.exp(base[:, None] - mu * shift)

        values, _ = integrate_semi_infinite_array(
            integrand, s - 1.0, spec, scale=_peak_scale(s, a)
        )
        result[start : start + block.size] = values
    return result.reshape(z.shape)
