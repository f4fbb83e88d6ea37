"""
共享数值核心

双指数求积（有限区间 tanh-sinh，半无穷区间 exp-sinh）、Euler变换加速的
交错级数求和、单调函数的括号求根，以及 Bernoulli 数与 Bernoulli 多项式。

所有函数均为输入的纯函数，可在任意线程中并发调用。
"""

import logging
import math
from fractions import Fraction
from functools import lru_cache
from typing import Callable, List, Optional, Tuple, Union

import numpy as np
from scipy.optimize import brentq

from ..core.config import get_settings
from ..core.exceptions import (
    ConvergenceError,
    DivergenceError,
    DomainError,
    PreconditionError,
    RangeError,
)
from ..models import NumericMethod, NumericValue, QuadratureSpec

logger = logging.getLogger(__name__)

Integrand = Callable[[np.ndarray], np.ndarray]
ArrayOrFloat = Union[float, np.ndarray]

HALF_PI = 0.5 * math.pi

# 步长变量 s 的截断窗口（初始步长的整数倍）
FINITE_WINDOW = (-4.0, 4.0)
SEMI_INFINITE_WINDOW = (-4.5, 4.0)
INITIAL_STEP = 0.5
MIN_LEVELS = 3

# exp(709) 附近溢出；权重还要乘以 cosh(s)
LOG_NODE_MAX = 700.0
LOG_NODE_MIN = -745.0

BERNOULLI_MAX_ORDER = 64


# ============================================================================
# 双指数求积
# ============================================================================


def _finite_nodes(lo: float, hi: float) -> Callable[[np.ndarray], Tuple]:
    """tanh-sinh 节点：到较近端点的距离以互补形式计算，避免端点处的抵消"""
    half = 0.5 * (hi - lo)

    def nodes(s: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        u = HALF_PI * np.sinh(s)
        e = np.exp(-2.0 * np.abs(u))
        distance = half * 2.0 * e / (1.0 + e)
        x = np.where(s < 0.0, lo + distance, hi - distance)
        weight = half * HALF_PI * np.cosh(s) * 4.0 * e / (1.0 + e) ** 2
        valid = (distance > 0.0) & (x > lo) & (x < hi)
        return x, np.where(valid, weight, 0.0)

    return nodes


def _semi_infinite_nodes(power: float, scale: float) -> Callable[[np.ndarray], Tuple]:
    """exp-sinh 节点 t = scale·exp(power·π/2·sinh s)"""
    log_scale = math.log(scale)

    def nodes(s: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        log_t = log_scale + power * HALF_PI * np.sinh(s)
        valid = (log_t > LOG_NODE_MIN) & (log_t < LOG_NODE_MAX)
        t = np.exp(np.where(valid, log_t, 0.0))
        weight = power * t * HALF_PI * np.cosh(s)
        return t, np.where(valid & (t > 0.0), weight, 0.0)

    return nodes


def _weighted_sum(nodes, f: Integrand, s: np.ndarray, label: str):
    x, weight = nodes(s)
    mask = weight > 0.0
    if not np.any(mask):
        return 0.0
    values = np.asarray(f(x[mask]))
    if values.shape[:1] != (int(mask.sum()),):
        raise DomainError(label, values.shape, "被积函数须对每个节点返回一个值（或一行）")
    if np.any(np.isnan(values)):
        raise DomainError(label, "NaN", "被积函数在积分区间内返回NaN")
    if np.any(np.isinf(values)):
        raise DomainError(label, "Inf", "被积函数在积分区间内返回无穷")
    return np.tensordot(weight[mask], values, axes=(0, 0))


def _de_quadrature(
    nodes,
    f: Integrand,
    window: Tuple[float, float],
    spec: QuadratureSpec,
    label: str,
) -> Tuple[np.ndarray, float, int]:
    """
    逐层折半的梯形求和

    每层只在新增的奇数节点上求值，误差估计取相邻两层之差。

    Returns:
        (积分值, 误差估计, 使用的层数)；积分值可为标量或与 f 的尾部维度一致的数组

    Raises:
        ConvergenceError: 达到最大层数仍未满足容差，携带最佳估计
    """
    s_lo, s_hi = window
    step = INITIAL_STEP
    accumulated = _weighted_sum(
        nodes, f, np.arange(s_lo, s_hi + 0.5 * step, step), label
    )
    estimate = np.asarray(step * accumulated)
    error = math.inf
    required = min(MIN_LEVELS - 1, spec.max_refinement_levels)

    for level in range(1, spec.max_refinement_levels + 1):
        step *= 0.5
        odd = np.arange(s_lo + step, s_hi, 2.0 * step)
        accumulated = accumulated + _weighted_sum(nodes, f, odd, label)
        previous, estimate = estimate, np.asarray(step * accumulated)
        difference = np.abs(estimate - previous)
        error = float(np.max(difference))
        threshold = np.maximum(
            spec.relative_tolerance * np.abs(estimate), spec.absolute_tolerance
        )
        if level >= required and np.all(difference <= threshold):
            logger.debug("%s: %d层收敛，误差估计 %.3e", label, level, error)
            return estimate, error, level

    raise ConvergenceError(label, estimate, error, spec.max_refinement_levels)


def _scalar(value: np.ndarray) -> Union[float, complex]:
    item = value.item() if isinstance(value, np.ndarray) else value
    return complex(item) if isinstance(item, complex) else float(item)


def integrate_finite(
    f: Integrand,
    lo: float,
    hi: float,
    spec: Optional[QuadratureSpec] = None,
) -> NumericValue:
    """
    有限区间 (lo, hi) 上的 tanh-sinh 求积

    f 接收节点数组并返回同长度的数组；端点本身不会被求值，
    可积的端点奇异性无需特殊处理。

    Args:
        f: 向量化被积函数
        lo: 下限
        hi: 上限，要求 lo < hi
        spec: 精度参数，缺省取配置

    Returns:
        NumericValue: 积分值与误差估计

    Raises:
        DomainError: 区间无效或被积函数返回NaN
        ConvergenceError: 未收敛
    """
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise DomainError("interval", (lo, hi), "要求有限区间且 lo < hi")
    spec = spec or QuadratureSpec()
    value, error, _ = _de_quadrature(
        _finite_nodes(lo, hi), f, FINITE_WINDOW, spec, "tanh-sinh"
    )
    return NumericValue(_scalar(value), error, NumericMethod.QUADRATURE)


def integrate_finite_array(
    f: Integrand,
    lo: float,
    hi: float,
    spec: Optional[QuadratureSpec] = None,
) -> Tuple[np.ndarray, float]:
    """integrate_finite 的向量值版本：f 返回 (K, M) 数组，结果为长度 M 的数组"""
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise DomainError("interval", (lo, hi), "要求有限区间且 lo < hi")
    spec = spec or QuadratureSpec()
    value, error, _ = _de_quadrature(
        _finite_nodes(lo, hi), f, FINITE_WINDOW, spec, "tanh-sinh"
    )
    return value, error


def _semi_infinite_power(endpoint_exponent: float, scale: float) -> float:
    if not (endpoint_exponent > -1.0):
        raise DomainError("endpoint_exponent", endpoint_exponent, "要求端点指数 > -1")
    if not (scale > 0.0 and math.isfinite(scale)):
        raise DomainError("scale", scale, "要求尺度为正且有限")
    # t = u^{1/(1+α)} 使 t^α 奇异性变为光滑
    if endpoint_exponent < 0.0:
        return 1.0 / (1.0 + endpoint_exponent)
    return 1.0


def integrate_semi_infinite(
    f: Integrand,
    endpoint_exponent: float = 0.0,
    spec: Optional[QuadratureSpec] = None,
    *,
    scale: float = 1.0,
) -> NumericValue:
    """
    (0, ∞) 上的 exp-sinh 求积

    端点指数 α ∈ (-1, 0) 时先做代换 t = u^{1/(1+α)}；scale 把节点中心
    平移到被积函数的峰值附近（t = scale·u）。

    Args:
        f: 向量化被积函数，至少指数衰减
        endpoint_exponent: f(t) ~ t^α 在0附近的指数 α > -1
        spec: 精度参数，缺省取配置
        scale: 节点中心尺度

    Returns:
        NumericValue: 积分值与误差估计

    Raises:
        DomainError: α <= -1 或被积函数返回NaN
        ConvergenceError: 未收敛
    """
    power = _semi_infinite_power(endpoint_exponent, scale)
    spec = spec or QuadratureSpec()
    value, error, _ = _de_quadrature(
        _semi_infinite_nodes(power, scale), f, SEMI_INFINITE_WINDOW, spec, "exp-sinh"
    )
    return NumericValue(_scalar(value), error, NumericMethod.QUADRATURE)


def integrate_semi_infinite_array(
    f: Integrand,
    endpoint_exponent: float = 0.0,
    spec: Optional[QuadratureSpec] = None,
    *,
    scale: float = 1.0,
) -> Tuple[np.ndarray, float]:
    """integrate_semi_infinite 的向量值版本：f 返回 (K, M) 数组"""
    power = _semi_infinite_power(endpoint_exponent, scale)
    spec = spec or QuadratureSpec()
    value, error, _ = _de_quadrature(
        _semi_infinite_nodes(power, scale), f, SEMI_INFINITE_WINDOW, spec, "exp-sinh"
    )
    return value, error


# ============================================================================
# 交错级数
# ============================================================================


def alternating_series_sum(
    term: Callable[[int], float],
    spec: Optional[QuadratureSpec] = None,
    *,
    label: str = "alternating series",
) -> NumericValue:
    """
    Euler变换加速的交错级数求和 Σ_{j>=1} term(j)

    term(j) 为带符号的第 j 项。先检查第 cap..cap+window 项：绝对值
    在整个窗口内不下降（且不全为0）即判为发散。

    Args:
        term: 下标从1开始的带符号项
        spec: 精度参数
        label: 日志与异常中使用的名称

    Returns:
        NumericValue: 和与误差估计（最后一个Euler项的绝对值）

    Raises:
        DivergenceError: 项不再递减
        ConvergenceError: Euler变换在 cap 项内未达到容差
    """
    spec = spec or QuadratureSpec()
    config = get_settings()
    cap, window = config.series_max_terms, config.divergence_window

    values = np.array([float(term(j)) for j in range(1, cap + window + 1)])
    if not np.all(np.isfinite(values)):
        raise DomainError(label, "non-finite term", "级数项必须有限")

    tail = np.abs(values[cap - 1 :])
    if tail[-1] > 0.0 and np.all(np.diff(tail) >= 0.0):
        raise DivergenceError(label, cap, window)

    # a_k = (-1)^k·term(k+1)，Σ(-1)^k a_k = Σ (-1)^n Δ^n a_0 / 2^{n+1}
    differences = values[:cap] * np.where(np.arange(cap) % 2 == 0, 1.0, -1.0)
    scale = float(np.max(np.abs(differences)))
    contributions: List[float] = []
    quiet = 0
    for n in range(cap):
        contribution = (-1.0) ** n * differences[0] / 2.0 ** (n + 1)
        contributions.append(contribution)
        total = math.fsum(contributions)
        if abs(contribution) <= spec.tolerance_for(abs(total)):
            quiet += 1
            if quiet >= 2 and n >= 2:
                roundoff = (n + 1) * np.finfo(float).eps * scale
                logger.debug("%s: Euler变换使用%d项", label, n + 1)
                return NumericValue(
                    total, abs(contribution) + roundoff, NumericMethod.SERIES
                )
        else:
            quiet = 0
        differences = np.diff(differences)

    raise ConvergenceError(label, math.fsum(contributions), abs(contributions[-1]), cap)


# ============================================================================
# 求根
# ============================================================================


def find_root_increasing(
    f: Callable[[float], float], lo: float, hi: float, tol: float
) -> float:
    """
    单调不减函数在括号 [lo, hi] 内的根

    Raises:
        PreconditionError: 括号无效（lo >= hi 或 f(lo) > 0 或 f(hi) < 0）
    """
    if not (lo < hi):
        raise PreconditionError("括号区间要求 lo < hi", {"lo": lo, "hi": hi})
    if not (tol > 0.0):
        raise PreconditionError("容差必须为正", {"tol": tol})
    f_lo, f_hi = f(lo), f(hi)
    if not (f_lo <= 0.0 <= f_hi):
        raise PreconditionError(
            "括号两端函数值须满足 f(lo) <= 0 <= f(hi)",
            {"lo": lo, "hi": hi, "f_lo": f_lo, "f_hi": f_hi},
        )
    if f_lo == 0.0:
        return float(lo)
    if f_hi == 0.0:
        return float(hi)
    return float(brentq(f, lo, hi, xtol=tol, rtol=4.0 * np.finfo(float).eps))


# ============================================================================
# Bernoulli 数与多项式
# ============================================================================


def _check_bernoulli_order(n: int, name: str) -> None:
    if n < 0:
        raise DomainError(name, n, "阶数必须非负")
    if n > BERNOULLI_MAX_ORDER:
        raise RangeError(name, n, BERNOULLI_MAX_ORDER)


@lru_cache(maxsize=1)
def _bernoulli_table() -> Tuple[Fraction, ...]:
    # Σ_{k=0}^{m} C(m+1, k) B_k = 0，B_1 = -1/2
    table = [Fraction(1)]
    for m in range(1, BERNOULLI_MAX_ORDER + 1):
        partial = sum(math.comb(m + 1, k) * table[k] for k in range(m))
        table.append(-partial / (m + 1))
    return tuple(table)


def bernoulli_numbers_exact(N: int) -> List[Fraction]:
    """精确有理数形式的 B_0..B_N"""
    _check_bernoulli_order(N, "N")
    return list(_bernoulli_table()[: N + 1])


def bernoulli_numbers(N: int) -> List[float]:
    """
    Bernoulli 数 B_0..B_N（有理数精确递推后舍入为浮点）

    Raises:
        RangeError: N > 64
    """
    return [float(value) for value in bernoulli_numbers_exact(N)]


def bernoulli_polynomial(n: int, x: ArrayOrFloat) -> ArrayOrFloat:
    """
    Bernoulli 多项式 B_n(x) = Σ C(n,k) B_k x^{n-k}

    标量 x 走精确有理数路径（B_n(0) 与 bernoulli_numbers(n)[n] 逐位相同），
    数组 x 走浮点 Horner 路径供求积使用。
    """
    _check_bernoulli_order(n, "n")
    table = _bernoulli_table()
    if np.ndim(x) == 0:
        point = Fraction(float(x))
        value = sum(math.comb(n, k) * table[k] * point ** (n - k) for k in range(n + 1))
        return float(value)
    coefficients = [float(math.comb(n, n - j) * table[n - j]) for j in range(n + 1)]
    return np.polynomial.polynomial.polyval(np.asarray(x, dtype=float), coefficients)
