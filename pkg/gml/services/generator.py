"""
密度生成函数

g(u) = exp(-b·u) / (1 + exp(-a·u))^r 及其派生量：归一化常数 d_n 与 c_n、
边缘（投影）生成函数、条件生成函数、径向变量 R 的分布（密度、矩、抽样），
以及奇数维的相容生成函数构造。
"""

import logging
import math
from functools import lru_cache
from typing import Callable, Optional, Union

import numpy as np
from scipy.special import gammaln

from ..core.exceptions import ConvergenceError, DomainError, RangeError, SamplerError
from ..models import GeneratorParams, NumericMethod, NumericValue, QuadratureSpec
from .numerics import (
    alternating_series_sum,
    find_root_increasing,
    integrate_finite,
    integrate_semi_infinite,
)
from .specfun import (
    phi_star_array,
    phi_star_minus_one,
    riemann_zeta,
    zeta_even,
    zeta_odd_integral,
)

logger = logging.getLogger(__name__)

ArrayOrFloat = Union[float, np.ndarray]
GeneratorFunction = Callable[[np.ndarray], np.ndarray]

MAX_PROPOSALS_PER_DRAW = 10**6
MAX_PROPOSAL_BATCH = 4_000_000
CONSISTENT_HEAD_LIMIT = 10**6
PREIMAGE_MIN_T = 1e-3
QUANTILE_MAX_DOUBLINGS = 64


def _check_dim(n: int) -> None:
    if int(n) != n or n < 1:
        raise DomainError("n", n, "维数必须是正整数")


def _nonnegative(u: ArrayOrFloat, name: str) -> np.ndarray:
    values = np.asarray(u, dtype=float)
    if np.any(np.isnan(values)) or np.any(values < 0.0):
        raise DomainError(name, u, "要求非负")
    return values


def _restore(values: np.ndarray, original: ArrayOrFloat) -> ArrayOrFloat:
    return float(values) if np.ndim(original) == 0 else values


# ============================================================================
# 生成函数本身
# ============================================================================


def log_generator_g(u: ArrayOrFloat, params: GeneratorParams) -> ArrayOrFloat:
    """log g(u) = -b·u - r·log(1 + e^{-a·u})，对任意大的 u 都有限"""
    values = _nonnegative(u, "u")
    result = -params.b * values - params.r * np.logaddexp(0.0, -params.a * values)
    return _restore(result, u)


def generator_g(u: ArrayOrFloat, params: GeneratorParams) -> ArrayOrFloat:
    """
    密度生成函数 g(u)

    Raises:
        DomainError: u < 0
    """
    return _restore(np.exp(np.asarray(log_generator_g(u, params))), u)


def conditional_generator(
    t: ArrayOrFloat, q1: float, params: GeneratorParams
) -> ArrayOrFloat:
    """条件分布的生成函数 t ↦ g(t + q1)，q1 为已观测分量的二次型"""
    if not (q1 >= 0.0):
        raise DomainError("q1", q1, "二次型必须非负")
    values = _nonnegative(t, "t")
    return _restore(np.asarray(generator_g(values + q1, params)), t)


class ShiftedGenerator:
    """
    可调用的条件生成函数 t ↦ g(t + q1)

    rescaled=True 时返回 e^{b·q1}·g(t + q1) = e^{-bt}/(1+e^{-a(t+q1)})^r，
    q1 很大时不下溢；该因子与条件归一化常数中的同一因子相消。
    """

    def __init__(self, params: GeneratorParams, q1: float, *, rescaled: bool = False):
        if not (q1 >= 0.0):
            raise DomainError("q1", q1, "二次型必须非负")
        self.params = params
        self.q1 = float(q1)
        self.rescaled = rescaled

    def __call__(self, t: ArrayOrFloat) -> ArrayOrFloat:
        if not self.rescaled:
            return conditional_generator(t, self.q1, self.params)
        values = _nonnegative(t, "t")
        params = self.params
        log_value = -params.b * values - params.r * np.logaddexp(
            0.0, -params.a * (values + self.q1)
        )
        return _restore(np.exp(log_value), t)

    def __repr__(self) -> str:
        return (
            f"ShiftedGenerator(params={self.params!r}, q1={self.q1!r}, "
            f"rescaled={self.rescaled})"
        )


class FamilyGenerator:
    """可调用的族生成函数 g"""

    def __init__(self, params: GeneratorParams):
        self.params = params

    def __call__(self, t: ArrayOrFloat) -> ArrayOrFloat:
        return generator_g(t, self.params)

    def __repr__(self) -> str:
        return f"FamilyGenerator(params={self.params!r})"


# ============================================================================
# 归一化常数
# ============================================================================


def radial_normalizer(n: int, params: GeneratorParams) -> float:
    """∫₀^∞ t^{n/2-1} g(t) dt = a^{-n/2} Γ(n/2) Φ*_r(-1, n/2, b/a)"""
    _check_dim(n)
    half = 0.5 * n
    phi = phi_star_minus_one(half, params.ratio, params.r)
    return math.exp(-half * math.log(params.a) + gammaln(half)) * phi


def norm_const_d(n: int, params: GeneratorParams) -> float:
    """
    GML 密度的归一化常数 d_n = (a/π)^{n/2} / Φ*_r(-1, n/2, b/a)

    Args:
        n: 维数
        params: 生成函数参数

    Returns:
        float: d_n
    """
    _check_dim(n)
    half = 0.5 * n
    phi = phi_star_minus_one(half, params.ratio, params.r)
    return (params.a / math.pi) ** half / phi


def norm_const_d_quadrature(
    n: int, params: GeneratorParams, spec: Optional[QuadratureSpec] = None
) -> float:
    """d_n = Γ(n/2) π^{-n/2} / ∫₀^∞ x^{n/2-1} g(x) dx，直接求积"""
    _check_dim(n)
    half = 0.5 * n

    def integrand(x: np.ndarray) -> np.ndarray:
        return np.exp((half - 1.0) * np.log(x) + log_generator_g(x, params))

    integral = integrate_semi_infinite(
        integrand, half - 1.0, spec, scale=max(half - 1.0, 1.0) / params.b
    )
    return math.exp(gammaln(half) - half * math.log(math.pi)) / integral.value


def norm_const_c_value(n: int) -> NumericValue:
    """
    经典椭圆Logistic分布（q/2 约定）的常数 c_n 及其计算方式

    n=1 走 Φ* 求积；n=2、4 为闭式；其余 n 为
    π^{-n/2} / ((2^{n/2} - 4) ζ(n/2 - 1))，ζ 由 η 级数给出。
    """
    _check_dim(n)
    if n == 1:
        phi = phi_star_minus_one(0.5, 1.0, 2.0)
        return NumericValue(
            (2.0 * math.pi) ** -0.5 / phi, 0.0, NumericMethod.QUADRATURE
        )
    if n == 2:
        return NumericValue(1.0 / math.pi, 0.0, NumericMethod.CLOSED_FORM)
    if n == 4:
        return NumericValue(
            1.0 / (4.0 * math.pi**2 * math.log(2.0)), 0.0, NumericMethod.CLOSED_FORM
        )
    half = 0.5 * n
    zeta = riemann_zeta(half - 1.0)
    value = math.pi**-half / ((2.0**half - 4.0) * zeta)
    return NumericValue(value, 0.0, NumericMethod.SERIES)


def norm_const_c(n: int) -> float:
    """经典椭圆Logistic分布的常数 c_n"""
    return float(norm_const_c_value(n).value)


def norm_const_c_bernoulli(n: int, spec: Optional[QuadratureSpec] = None) -> float:
    """
    c_n 的 Bernoulli 路径，n = 4m+2 或 4m+4（m >= 1）

    n = 4m+2 时 ζ(2m) 取偶数点闭式；n = 4m+4 时 ζ(2m+1) 取
    Bernoulli 多项式积分形式。
    """
    if int(n) != n or n < 6 or n % 2 != 0:
        raise DomainError("n", n, "要求 n = 4m+2 或 4m+4，m >= 1")
    half = n // 2
    order = half - 1
    if n % 4 == 2:
        zeta = zeta_even(order)
    else:
        zeta = zeta_odd_integral(order, spec)
    return math.pi**-half / ((2.0**half - 4.0) * zeta)


def norm_const_c_series(n: int, spec: Optional[QuadratureSpec] = None) -> float:
    """
    c_n = (2π)^{-n/2} [Σ_{j>=1} (-1)^{j-1} j^{1-n/2}]^{-1}

    n = 1、2 时级数发散，抛出 DivergenceError。
    """
    _check_dim(n)
    exponent = 1.0 - 0.5 * n
    total = alternating_series_sum(
        lambda j: (-1.0) ** (j - 1) * float(j) ** exponent,
        spec,
        label=f"c_{n} series",
    )
    return (2.0 * math.pi) ** (-0.5 * n) / total.value


# ============================================================================
# 边缘生成函数
# ============================================================================


class MarginalGenerator:
    """
    k 维边缘（或秩 k 投影）的生成函数

    g_(k)(t) = e^{-bt} a^{-p} Γ(p) Φ*_r(-e^{-at}, p, b/a)，p = (n-k)/2，
    它等于 ∫₀^∞ w^{p-1} g(t+w) dw。
    """

    def __init__(
        self,
        k: int,
        n: int,
        params: GeneratorParams,
        spec: Optional[QuadratureSpec] = None,
    ):
        _check_dim(n)
        if int(k) != k or not (1 <= k < n):
            raise DomainError("k", k, f"要求 1 <= k < n={n}")
        self.k = int(k)
        self.n = int(n)
        self.params = params
        self.spec = spec
        self.half_codim = 0.5 * (n - k)
        self._log_prefactor = -self.half_codim * math.log(params.a) + float(
            gammaln(self.half_codim)
        )

    def __call__(self, t: ArrayOrFloat) -> ArrayOrFloat:
        values = _nonnegative(t, "t")
        z = -np.exp(-self.params.a * values)
        phi = phi_star_array(
            z, self.half_codim, self.params.ratio, self.params.r, self.spec
        )
        result = np.exp(-self.params.b * values + self._log_prefactor) * phi
        return _restore(result, t)

    def scaled(self, t: ArrayOrFloat) -> ArrayOrFloat:
        """e^{bt}·g_(k)(t) = a^{-p} Γ(p) Φ*_r(-e^{-at}, p, b/a)，大 t 时不下溢"""
        values = _nonnegative(t, "t")
        z = -np.exp(-self.params.a * values)
        phi = phi_star_array(
            z, self.half_codim, self.params.ratio, self.params.r, self.spec
        )
        return _restore(math.exp(self._log_prefactor) * phi, t)

    def __repr__(self) -> str:
        return f"MarginalGenerator(k={self.k}, n={self.n}, params={self.params!r})"


def marginal_generator(
    k: int, n: int, params: GeneratorParams, spec: Optional[QuadratureSpec] = None
) -> MarginalGenerator:
    """
    k 维边缘的生成函数句柄

    Raises:
        DomainError: k 不满足 1 <= k < n
    """
    return MarginalGenerator(k, n, params, spec)


def marginal_generator_closed_form(
    t: ArrayOrFloat, params: GeneratorParams
) -> ArrayOrFloat:
    """
    k = n-2 且 a = b 时的边缘生成函数闭式

    r = 1: (1/a) ln(1 + e^{-at})；否则 (1 - (1 + e^{-at})^{1-r}) / (a(r-1))
    """
    if params.a != params.b:
        raise DomainError("params", params, "闭式要求 a = b")
    values = _nonnegative(t, "t")
    x = np.exp(-params.a * values)
    if params.r == 1.0:
        result = np.log1p(x) / params.a
    else:
        result = -np.expm1((1.0 - params.r) * np.log1p(x)) / (
            params.a * (params.r - 1.0)
        )
    return _restore(result, t)


def generator_tail_transform(
    generator: GeneratorFunction,
    t: float,
    half_codim: float,
    spec: Optional[QuadratureSpec] = None,
    *,
    scale: float = 1.0,
) -> float:
    """∫₀^∞ w^{p-1} g(t+w) dw，p = half_codim；由 g 求边缘生成函数的积分算子"""
    if not (half_codim > 0.0):
        raise DomainError("half_codim", half_codim, "要求 p > 0")
    if not (t >= 0.0):
        raise DomainError("t", t, "要求 t >= 0")

    def integrand(w: np.ndarray) -> np.ndarray:
        return w ** (half_codim - 1.0) * np.asarray(generator(t + w))

    return float(integrate_semi_infinite(integrand, half_codim - 1.0, spec, scale=scale).value)


def consistency_distance(
    n: int,
    k: int,
    params: GeneratorParams,
    t_grid: Optional[np.ndarray] = None,
) -> float:
    """
    g 与按 t=0 处匹配常数后的 g_(k) 之间的最大偏差

    距离为0（到舍入误差）意味着边缘仍属同一生成函数族。
    """
    grid = np.linspace(0.0, 10.0, 201) if t_grid is None else np.asarray(t_grid)
    handle = marginal_generator(k, n, params)
    marginal = np.asarray(handle(grid))
    family = np.asarray(generator_g(grid, params))
    constant = float(generator_g(0.0, params)) / float(handle(0.0))
    return float(np.max(np.abs(constant * marginal - family)))


# ============================================================================
# 径向分布
# ============================================================================


class RadialLaw:
    """
    随机表示 X = μ + √R·A·U 中 R 的分布

    密度 f_R(v) = v^{n/2-1} g(v) / N_n，N_n = a^{-n/2} Γ(n/2) Φ*_r(-1, n/2, b/a)。
    """

    def __init__(self, dim: int, params: GeneratorParams):
        _check_dim(dim)
        self.dim = int(dim)
        self.params = params
        self.half_dim = 0.5 * dim
        self.normalizer = radial_normalizer(dim, params)
        self.log_normalizer = math.log(self.normalizer)

    @property
    def typical_scale(self) -> float:
        """求积节点的中心尺度"""
        return max(self.half_dim, 1.0) / self.params.b

    def log_density(self, v: ArrayOrFloat) -> ArrayOrFloat:
        values = _nonnegative(v, "v")
        with np.errstate(divide="ignore"):
            log_v = np.log(values)
        exponent = self.half_dim - 1.0
        power = np.where(values > 0.0, exponent * log_v, 0.0)
        if exponent > 0.0:
            power = np.where(values > 0.0, power, -np.inf)
        elif exponent < 0.0:
            power = np.where(values > 0.0, power, np.inf)
        result = power + np.asarray(log_generator_g(values, self.params))
        return _restore(result - self.log_normalizer, v)

    def density(self, v: ArrayOrFloat) -> ArrayOrFloat:
        return _restore(np.exp(np.asarray(self.log_density(v))), v)

    def cdf(self, v: float, spec: Optional[QuadratureSpec] = None) -> float:
        """P(R <= v)，在 (0, v) 上求积"""
        if not (v >= 0.0):
            raise DomainError("v", v, "要求非负")
        if v == 0.0:
            return 0.0
        if math.isinf(v):
            return 1.0
        return float(integrate_finite(self.density, 0.0, v, spec).value)

    def quantile(self, p: float, tol: float = 1e-12) -> float:
        """CDF 的逆，由单调求根得到（校验路径）"""
        if not (0.0 < p < 1.0):
            raise DomainError("p", p, "要求 0 < p < 1")
        hi = self.typical_scale
        for _ in range(QUANTILE_MAX_DOUBLINGS):
            reached = self.cdf(hi)
            if reached >= p:
                break
            hi *= 2.0
        else:
            # 求积得到的 CDF 在 1 以下饱和
            raise ConvergenceError(
                "radial quantile bracket", hi, p - reached, QUANTILE_MAX_DOUBLINGS
            )
        return find_root_increasing(lambda v: self.cdf(v) - p, 0.0, hi, tol)

    def moment(self, l: float) -> float:
        return radial_moment(l, self)

    def moment_quadrature(
        self, l: float, spec: Optional[QuadratureSpec] = None
    ) -> float:
        return radial_moment_quadrature(l, self, spec)

    def sample(self, rng: np.random.Generator, size: Optional[int] = None):
        return radial_sample(self, rng, size)

    def __repr__(self) -> str:
        return f"RadialLaw(dim={self.dim}, params={self.params!r})"


@lru_cache(maxsize=256)
def radial_law(dim: int, params: GeneratorParams) -> RadialLaw:
    """缓存的径向分布构造"""
    return RadialLaw(dim, params)


def radial_density(v: ArrayOrFloat, law: RadialLaw) -> ArrayOrFloat:
    """径向密度 f_R(v)"""
    return law.density(v)


def radial_moment(l: float, law: RadialLaw) -> float:
    """
    E(R^l) = a^{-l} Γ(n/2+l) Φ*_r(-1, n/2+l, b/a) / [Γ(n/2) Φ*_r(-1, n/2, b/a)]

    Raises:
        DomainError: l <= -n/2
    """
    half = law.half_dim
    if not (l > -half):
        raise DomainError("l", l, f"要求 l > -n/2 = {-half}")
    if l == 0.0:
        return 1.0
    params = law.params
    ratio = phi_star_minus_one(half + l, params.ratio, params.r) / phi_star_minus_one(
        half, params.ratio, params.r
    )
    log_factor = -l * math.log(params.a) + gammaln(half + l) - gammaln(half)
    return math.exp(log_factor) * ratio


def radial_moment_quadrature(
    l: float, law: RadialLaw, spec: Optional[QuadratureSpec] = None
) -> float:
    """∫₀^∞ v^l f_R(v) dv，直接求积"""
    half = law.half_dim
    if not (l > -half):
        raise DomainError("l", l, f"要求 l > -n/2 = {-half}")
    exponent = half - 1.0 + l

    def integrand(v: np.ndarray) -> np.ndarray:
        log_value = exponent * np.log(v) + log_generator_g(v, law.params)
        return np.exp(log_value - law.log_normalizer)

    scale = max(exponent, 1.0) / law.params.b
    return float(integrate_semi_infinite(integrand, exponent, spec, scale=scale).value)


def radial_sample(
    law: RadialLaw, rng: np.random.Generator, size: Optional[int] = None
) -> ArrayOrFloat:
    """
    R 的精确抽样：Gamma(n/2, rate=b) 提议，以概率 (1+e^{-aV})^{-r} 接受

    批量向量化；r = 0 时每个提议都被接受。

    Args:
        law: 径向分布
        rng: 调用方独占的随机流
        size: 抽样个数，None 时返回单个浮点数

    Raises:
        SamplerError: 提议次数超过每个样本 10^6 次的上限
    """
    if size is None:
        return float(radial_sample(law, rng, 1)[0])
    if size < 0:
        raise DomainError("size", size, "要求非负")
    shape, scale = law.half_dim, 1.0 / law.params.b
    if law.params.r == 0.0 or size == 0:
        return rng.gamma(shape, scale, size)

    a, r = law.params.a, law.params.r
    acceptance_floor = 2.0 ** (-r)
    draws = np.empty(size)
    filled = proposals = 0
    limit = MAX_PROPOSALS_PER_DRAW * size
    while filled < size:
        need = size - filled
        batch = int(min(max(1.1 * need / acceptance_floor + 16, 64), MAX_PROPOSAL_BATCH))
        proposal = rng.gamma(shape, scale, batch)
        uniform = rng.random(batch)
        accept = uniform < np.exp(-r * np.log1p(np.exp(-a * proposal)))
        proposals += batch
        chosen = proposal[accept][:need]
        draws[filled : filled + chosen.size] = chosen
        filled += chosen.size
        if filled < size and proposals >= limit:
            raise SamplerError(proposals, filled, size)
    logger.debug("径向抽样: %d个样本使用%d次提议", size, proposals)
    return draws


def radial_sample_inverse_cdf(
    law: RadialLaw, rng: np.random.Generator, size: int
) -> np.ndarray:
    """逆CDF抽样（逐点求根，仅供小样本校验）"""
    uniform = rng.random(size)
    return np.array([law.quantile(float(p)) for p in uniform])


# ============================================================================
# 奇数维相容生成函数与反演样例
# ============================================================================


def consistent_generator_odd(n: int, t: float, params: GeneratorParams) -> float:
    """
    g_n(t) = ((-1)^m / π^m) ∂^m/∂t^m g(t)，n = 2m+1

    由 g(t) = Σ_j (-1)^j [(r)_j / j!] e^{-(b+aj)t} 逐项求导：
    峰值之前的项直接求和，之后的交错尾部用 Euler 变换。

    Raises:
        DomainError: n 不是 >= 3 的奇数，或 t <= 0
        RangeError: 峰值位置超过直接求和上限
    """
    if int(n) != n or n < 3 or n % 2 == 0:
        raise DomainError("n", n, "要求 n 为 >= 3 的奇数")
    if not (t > 0.0):
        raise DomainError("t", t, "级数在 t = 0 处只条件收敛，要求 t > 0")
    m = (n - 1) // 2
    a, b, r = params.a, params.b, params.r
    if r == 0.0:
        return (b / math.pi) ** m * math.exp(-b * t)

    log_gamma_r = gammaln(r)

    def magnitude(j: int) -> float:
        rate = b + a * j
        log_value = gammaln(r + j) - log_gamma_r - gammaln(j + 1.0)
        return math.exp(log_value + m * math.log(rate) - rate * t)

    peak = (r - 1.0 + m) / (a * t)
    head_count = max(0, int(math.ceil(peak)) + 1)
    if head_count > CONSISTENT_HEAD_LIMIT:
        raise RangeError("t", t, f"峰值项下标 {head_count} 超过 {CONSISTENT_HEAD_LIMIT}")
    head = math.fsum((-1.0) ** j * magnitude(j) for j in range(head_count))
    tail = alternating_series_sum(
        lambda i: (-1.0) ** (i - 1) * magnitude(head_count + i - 1),
        label=f"consistent generator n={n}",
    )
    total = head + (-1.0) ** head_count * tail.value
    return total / math.pi**m


def logistic_expansion_partial_sum(x: ArrayOrFloat, terms: int) -> ArrayOrFloat:
    """Σ_{j=1}^{J} (-1)^{j-1} j e^{-jx}，收敛到 e^{-x}/(1+e^{-x})^2（x > 0）"""
    if terms < 1:
        raise DomainError("terms", terms, "要求至少一项")
    values = np.asarray(x, dtype=float)
    j = np.arange(1, terms + 1, dtype=float)
    signs = np.where(j % 2 == 1, 1.0, -1.0)
    result = np.sum(signs * j * np.exp(-np.multiply.outer(values, j)), axis=-1)
    return _restore(result, x)


def planar_logistic_preimage(t: ArrayOrFloat) -> ArrayOrFloat:
    """
    g(t) = Σ_{k>=1} (-1)^{k-1} k^{3/2} e^{-kt}

    满足 ∫₀^∞ w^{-1/2} g(t+w) dw = √π · e^{-t}/(1+e^{-t})^2。
    直接求和，项数按 k^{3/2} e^{-kt} < 1e-18 选取。
    """
    values = np.asarray(t, dtype=float)
    if np.any(values < PREIMAGE_MIN_T):
        raise RangeError("t", t, f">= {PREIMAGE_MIN_T}")
    smallest = float(np.min(values)) if values.size else 1.0
    count = int(math.ceil((42.0 + 2.5 * math.log1p(1.0 / smallest)) / smallest)) + 10
    k = np.arange(1, count + 1, dtype=float)
    signs = np.where(k % 2 == 1, 1.0, -1.0)
    result = np.sum(signs * k**1.5 * np.exp(-np.multiply.outer(values, k)), axis=-1)
    return _restore(result, t)


def spatial_logistic_preimage(t: ArrayOrFloat) -> ArrayOrFloat:
    """g(t) = (e^{-t} - e^{-2t}) / (1 + e^{-t})^3，∫_t^∞ g = e^{-t}/(1+e^{-t})^2"""
    values = _nonnegative(t, "t")
    x = np.exp(-values)
    return _restore((x - x * x) / (1.0 + x) ** 3, t)
