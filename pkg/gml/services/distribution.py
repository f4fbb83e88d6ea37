"""
GML 分布对象

密度 f(x) = d_n |Σ|^{-1/2} g((x-μ)'Σ^{-1}(x-μ))、基于随机表示
X = μ + √R·A·U 的精确抽样、均值/协方差/乘积矩，以及特征函数。
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import LinAlgError, cholesky, solve_triangular
from scipy.special import betaln, gammaln, jv

from ..core.config import get_settings
from ..core.exceptions import (
    ConvergenceError,
    DomainError,
    RangeError,
    ShapeError,
)
from ..models import DistributionConfig, GeneratorParams, QuadratureSpec, SampleBatch
from .generator import (
    RadialLaw,
    generator_g,
    log_generator_g,
    norm_const_d,
    radial_law,
    radial_moment,
    radial_sample,
)
from .numerics import integrate_finite_array, integrate_semi_infinite
from .specfun import phi_star_minus_one

logger = logging.getLogger(__name__)

ArrayOrFloat = Union[float, np.ndarray]
CfMethod = Literal["auto", "series", "quadrature"]

SYMMETRY_TOLERANCE = 1e-12

# Ω_n：小参数用超几何级数，大参数用 Bessel 闭式
OMEGA_SERIES_LIMIT = 36.0
OMEGA_SERIES_TERMS = 80

# 特征函数级数：t'Σt <= 100a 且最大项不超过预算时使用
CF_SERIES_ARGUMENT_LIMIT = 100.0
CF_SERIES_TERM_BUDGET = 1e6
CF_SERIES_MAX_TERMS = 400
CF_SERIES_TAIL_BOUND = 1e-16
CF_ABSOLUTE_TOLERANCE = 1e-13
CF_1D_OSCILLATION_LIMIT = 1e3


# ============================================================================
# Ω_n：单位球面均匀分布的特征函数
# ============================================================================


def _omega_series(n: int, y: np.ndarray) -> np.ndarray:
    """Σ_k (-y/4)^k / ((n/2)^{[k]} k!)，Neumaier 补偿求和"""
    half = 0.5 * n
    term = np.ones_like(y)
    total = np.ones_like(y)
    compensation = np.zeros_like(y)
    for k in range(OMEGA_SERIES_TERMS):
        term = term * (-0.25 * y) / ((half + k) * (k + 1.0))
        updated = total + term
        compensation += np.where(
            np.abs(total) >= np.abs(term),
            (total - updated) + term,
            (term - updated) + total,
        )
        total = updated
        if np.all(np.abs(term) <= 1e-18 * np.maximum(1.0, np.abs(total))):
            break
    return total + compensation


def _omega_bessel(n: int, y: np.ndarray) -> np.ndarray:
    """Γ(n/2) (√y/2)^{1-n/2} J_{n/2-1}(√y)，y > 0"""
    order = 0.5 * n - 1.0
    root = np.sqrt(y)
    return np.exp(gammaln(0.5 * n) - order * np.log(0.5 * root)) * jv(order, root)


def _omega_quadrature(n: int, y: np.ndarray) -> np.ndarray:
    """(1/B((n-1)/2, 1/2)) ∫₀^π cos(√y cosθ) sin^{n-2}θ dθ"""
    if n == 1:
        return np.cos(np.sqrt(y))
    root = np.sqrt(y)
    log_beta = betaln(0.5 * (n - 1), 0.5)

    def integrand(theta: np.ndarray) -> np.ndarray:
        profile = np.sin(theta) ** (n - 2)
        return np.cos(np.outer(np.cos(theta), root)) * profile[:, None]

    values, _ = integrate_finite_array(integrand, 0.0, math.pi)
    return np.asarray(values) / math.exp(log_beta)


def omega_n(
    n: int, y: ArrayOrFloat, method: Literal["auto", "series", "bessel", "quadrature"] = "auto"
) -> ArrayOrFloat:
    """
    Ω_n(y)：U^(n) 的特征函数在 ‖t‖² = y 处的值

    auto 在 y <= 36 时使用级数，否则使用 Bessel 闭式。

    Raises:
        DomainError: y < 0 或未知方法
    """
    if int(n) != n or n < 1:
        raise DomainError("n", n, "维数必须是正整数")
    values = np.atleast_1d(np.asarray(y, dtype=float))
    if np.any(np.isnan(values)) or np.any(values < 0.0):
        raise DomainError("y", y, "要求非负")

    if method == "series":
        result = _omega_series(n, values)
    elif method == "bessel":
        result = np.where(values > 0.0, _omega_bessel(n, np.maximum(values, 1e-300)), 1.0)
    elif method == "quadrature":
        result = _omega_quadrature(n, values)
    elif method == "auto":
        result = np.empty_like(values)
        small = values <= OMEGA_SERIES_LIMIT
        result[small] = _omega_series(n, values[small])
        result[~small] = _omega_bessel(n, values[~small])
    else:
        raise DomainError("method", method, "未知的 Ω_n 计算方法")
    return float(result[0]) if np.ndim(y) == 0 else result.reshape(np.shape(y))


def cf_1d(t: float, mu: float, sigma: float, params: GeneratorParams) -> complex:
    """
    一维 GML 的特征函数

    ψ(t) = d_1 e^{itμ} ∫₀^∞ cos(tσ√y) e^{-by} / (√y (1+e^{-ay})^r) dy

    Raises:
        DomainError: σ <= 0
        RangeError: |t|σ > 10^3 或振荡积分未收敛
    """
    if not (sigma > 0.0):
        raise DomainError("sigma", sigma, "要求 σ > 0")
    frequency = abs(t) * sigma
    if frequency > CF_1D_OSCILLATION_LIMIT:
        raise RangeError("|t|σ", frequency, CF_1D_OSCILLATION_LIMIT)
    phase = complex(math.cos(t * mu), math.sin(t * mu))
    if t == 0.0:
        return phase

    def integrand(y: np.ndarray) -> np.ndarray:
        log_weight = -0.5 * np.log(y) + log_generator_g(y, params)
        return np.cos(frequency * np.sqrt(y)) * np.exp(log_weight)

    spec = QuadratureSpec(absolute_tolerance=CF_ABSOLUTE_TOLERANCE)
    try:
        integral = integrate_semi_infinite(integrand, -0.5, spec, scale=1.0 / params.b)
    except ConvergenceError as exc:
        raise RangeError("|t|σ", frequency, "振荡积分未收敛") from exc
    return norm_const_d(1, params) * integral.value * phase


# ============================================================================
# GML 分布
# ============================================================================


def factor_dispersion(
    mu: Sequence[float], sigma: Union[Sequence[Sequence[float]], np.ndarray]
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    检查 (μ, Σ) 并返回 (μ, Σ, A)，A 为 Σ 的下三角 Cholesky 因子

    Raises:
        ShapeError: 形状不匹配
        DomainError: 非有限、不对称或非正定
    """
    location = np.atleast_1d(np.asarray(mu, dtype=float))
    if location.ndim != 1 or location.size < 1:
        raise ShapeError("mu", "一维非空向量", location.shape)
    n = location.size
    dispersion = np.atleast_2d(np.asarray(sigma, dtype=float))
    if dispersion.shape != (n, n):
        raise ShapeError("sigma", (n, n), dispersion.shape)
    if not (np.all(np.isfinite(location)) and np.all(np.isfinite(dispersion))):
        raise DomainError("(mu, sigma)", "non-finite", "参数必须有限")
    atol = SYMMETRY_TOLERANCE * max(1.0, float(np.max(np.abs(dispersion))))
    if not np.allclose(dispersion, dispersion.T, rtol=0.0, atol=atol):
        raise DomainError("sigma", "asymmetric", "离差矩阵必须对称")
    try:
        factor = cholesky(dispersion, lower=True)
    except LinAlgError as exc:
        raise DomainError("sigma", "indefinite", "离差矩阵必须正定") from exc
    return location.copy(), dispersion.copy(), factor


class GmlDistribution:
    """
    广义椭圆对称Logistic分布 GML_n(μ, Σ, g)

    构造后不可变；所有求值方法线程安全。抽样按种子派生的子随机流
    分块进行，结果与线程数无关。
    """

    def __init__(
        self,
        mu: Sequence[float],
        sigma: Union[Sequence[Sequence[float]], np.ndarray],
        params: GeneratorParams,
    ):
        location, dispersion, factor = factor_dispersion(mu, sigma)
        n = location.size

        self.dim = n
        self.params = params
        self._mu = location
        self._sigma = dispersion
        self._factor = factor
        for array in (self._mu, self._sigma, self._factor):
            array.setflags(write=False)
        self.log_det = 2.0 * float(np.sum(np.log(np.diag(factor))))
        self.radial: RadialLaw = radial_law(n, params)
        self.d_n = norm_const_d(n, params)
        self.log_d_n = math.log(self.d_n)

    @classmethod
    def from_config(cls, config: DistributionConfig) -> "GmlDistribution":
        """由命令行或HTTP请求的参数集构造"""
        return cls(config.mu_vector(), config.sigma_matrix(), config.params)

    @property
    def mu(self) -> np.ndarray:
        return self._mu

    @property
    def sigma(self) -> np.ndarray:
        return self._sigma

    @property
    def factor(self) -> np.ndarray:
        """下三角因子 A，A·A' = Σ"""
        return self._factor

    def __repr__(self) -> str:
        return f"GmlDistribution(n={self.dim}, params={self.params!r})"

    # ------------------------------------------------------------------
    # 密度
    # ------------------------------------------------------------------

    def _points(self, x: ArrayOrFloat) -> Tuple[np.ndarray, bool]:
        points = np.asarray(x, dtype=float)
        single = points.ndim <= 1
        if self.dim == 1 and points.ndim == 1 and points.size != 1:
            points = points[:, None]
            single = False
        points = points.reshape(-1, points.shape[-1] if points.ndim else 1)
        if points.shape[1] != self.dim:
            raise ShapeError("x", self.dim, points.shape[1])
        return points, single

    def _unpack(self, values: np.ndarray, single: bool) -> ArrayOrFloat:
        return float(values[0]) if single else values

    def standardize(self, x: ArrayOrFloat) -> np.ndarray:
        """A^{-1}(x - μ)，逐行"""
        points, _ = self._points(x)
        centered = (points - self._mu).T
        return solve_triangular(self._factor, centered, lower=True).T

    def mahalanobis(self, x: ArrayOrFloat) -> ArrayOrFloat:
        """二次型 (x-μ)'Σ^{-1}(x-μ)"""
        points, single = self._points(x)
        standardized = solve_triangular(self._factor, (points - self._mu).T, lower=True)
        return self._unpack(np.sum(standardized**2, axis=0), single)

    def log_pdf(self, x: ArrayOrFloat) -> ArrayOrFloat:
        """log f(x) = log d_n - ½log|Σ| + log g(q)，不经过 f(x)"""
        points, single = self._points(x)
        q = np.atleast_1d(self.mahalanobis(points))
        values = self.log_d_n - 0.5 * self.log_det + np.asarray(log_generator_g(q, self.params))
        return self._unpack(values, single)

    def pdf(self, x: ArrayOrFloat) -> ArrayOrFloat:
        """
        密度 f(x) = d_n |Σ|^{-1/2} g(q)

        Raises:
            ShapeError: x 的长度不是 n
        """
        points, single = self._points(x)
        q = np.atleast_1d(self.mahalanobis(points))
        scale = self.d_n * math.exp(-0.5 * self.log_det)
        return self._unpack(scale * np.asarray(generator_g(q, self.params)), single)

    # ------------------------------------------------------------------
    # 矩
    # ------------------------------------------------------------------

    def mean(self) -> np.ndarray:
        return self._mu.copy()

    def cov_scale(self) -> float:
        """Cov(X) = κ·Σ 中的 κ = Φ*_r(-1, n/2+1, b/a) / (2a Φ*_r(-1, n/2, b/a))"""
        half = 0.5 * self.dim
        ratio = self.params.ratio
        numerator = phi_star_minus_one(half + 1.0, ratio, self.params.r)
        denominator = phi_star_minus_one(half, ratio, self.params.r)
        return numerator / (2.0 * self.params.a * denominator)

    def cov(self) -> np.ndarray:
        return self.cov_scale() * self._sigma

    def product_moment(self, orders: Sequence[int]) -> float:
        """
        标准化向量 Y = A^{-1}(X-μ) 的偶数阶乘积矩 E(∏ Y_i^{2m_i})

        = E(R^m) / (n/2)^{[m]} · ∏ (2m_i)! / (4^{m_i} m_i!)，m = Σ m_i
        """
        if len(orders) != self.dim:
            raise ShapeError("orders", self.dim, len(orders))
        if any(int(m) != m or m < 0 for m in orders):
            raise DomainError("orders", list(orders), "阶数必须是非负整数")
        total = int(sum(orders))
        if total == 0:
            return 1.0
        half = 0.5 * self.dim
        ascending = math.exp(gammaln(half + total) - gammaln(half))
        combinatorial = 1.0
        for m in orders:
            m = int(m)
            combinatorial *= math.factorial(2 * m) / (4.0**m * math.factorial(m))
        return radial_moment(total, self.radial) / ascending * combinatorial

    # ------------------------------------------------------------------
    # 抽样
    # ------------------------------------------------------------------

    def _draw_chunk(self, rng: np.random.Generator, size: int) -> np.ndarray:
        radius = np.sqrt(radial_sample(self.radial, rng, size))
        normal = rng.standard_normal((size, self.dim))
        direction = normal / np.linalg.norm(normal, axis=1, keepdims=True)
        return self._mu + radius[:, None] * (direction @ self._factor.T)

    def sample(
        self, count: int, seed: int, workers: Optional[int] = None
    ) -> SampleBatch:
        """
        X = μ + √R·A·U 的精确抽样

        样本按 sample_chunk_size 分块，每块使用由种子派生的独立子随机流；
        workers > 1 时并行生成，结果与线程数无关。

        Args:
            count: 抽样个数（允许0）
            seed: 非负整数种子
            workers: 并行线程数

        Returns:
            SampleBatch: count×n 的样本
        """
        if int(count) != count or count < 0:
            raise DomainError("count", count, "要求非负整数")
        if int(seed) != seed or seed < 0:
            raise DomainError("seed", seed, "要求非负整数")
        chunk = get_settings().sample_chunk_size
        sizes: List[int] = [chunk] * (count // chunk)
        if count % chunk:
            sizes.append(count % chunk)
        children = np.random.SeedSequence(int(seed)).spawn(len(sizes))

        def draw(job: Tuple[int, np.random.SeedSequence]) -> np.ndarray:
            size, child = job
            return self._draw_chunk(np.random.default_rng(child), size)

        jobs = list(zip(sizes, children))
        if workers and workers > 1 and len(jobs) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                parts = list(pool.map(draw, jobs))
        else:
            parts = [draw(job) for job in jobs]
        draws = np.vstack(parts) if parts else np.empty((0, self.dim))
        logger.info("抽样完成: n=%d, count=%d, seed=%d", self.dim, count, seed)
        return SampleBatch(draws=draws, seed=int(seed), count=int(count))

    # ------------------------------------------------------------------
    # 特征函数
    # ------------------------------------------------------------------

    def _cf_arguments(self, t: Sequence[float]) -> Tuple[float, complex]:
        vector = np.atleast_1d(np.asarray(t, dtype=float))
        if vector.shape != (self.dim,):
            raise ShapeError("t", (self.dim,), vector.shape)
        quadratic = float(vector @ self._sigma @ vector)
        shift = float(vector @ self._mu)
        return max(quadratic, 0.0), complex(math.cos(shift), math.sin(shift))

    def _cf_series_sum(self, y: float, alternating: bool = True) -> float:
        """Σ_k (∓y/(4a))^k / k! · Φ*_r(-1, n/2+k, b/a) / Φ*_r(-1, n/2, b/a)"""
        half = 0.5 * self.dim
        ratio, r = self.params.ratio, self.params.r
        base = phi_star_minus_one(half, ratio, r)
        log_x = math.log(y / (4.0 * self.params.a))
        terms = [1.0]
        peak = 1.0
        previous = 1.0
        for k in range(1, CF_SERIES_MAX_TERMS + 1):
            rho = phi_star_minus_one(half + k, ratio, r) / base
            magnitude = math.exp(k * log_x - gammaln(k + 1.0)) * rho
            sign = -1.0 if (alternating and k % 2 == 1) else 1.0
            terms.append(sign * magnitude)
            peak = max(peak, magnitude)
            if alternating and peak > CF_SERIES_TERM_BUDGET:
                raise ConvergenceError("cf series", math.fsum(terms), magnitude, k)
            quotient = magnitude / previous if previous > 0.0 else 0.0
            previous = magnitude
            if quotient < 0.5 and 2.0 * magnitude <= CF_SERIES_TAIL_BOUND * max(
                1.0, abs(math.fsum(terms))
            ):
                return math.fsum(terms)
        raise ConvergenceError("cf series", math.fsum(terms), previous, CF_SERIES_MAX_TERMS)

    def _cf_radial_integral(self, y: float) -> float:
        """∫₀^∞ Ω_n(v·y) f_R(v) dv"""
        radial = self.radial

        def integrand(v: np.ndarray) -> np.ndarray:
            density = np.asarray(radial.density(v))
            values = np.zeros_like(density)
            # 密度下溢为0的节点不求 Ω_n
            live = density > 0.0
            values[live] = np.asarray(omega_n(self.dim, v[live] * y)) * density[live]
            return values

        spec = QuadratureSpec(absolute_tolerance=CF_ABSOLUTE_TOLERANCE)
        try:
            integral = integrate_semi_infinite(
                integrand, radial.half_dim - 1.0, spec, scale=radial.typical_scale
            )
        except ConvergenceError as exc:
            raise RangeError("t'Σt", y, "Ω_n 求积未收敛") from exc
        return float(integral.value)

    def cf_series(self, t: Sequence[float], *, alternating: bool = True) -> complex:
        """
        级数路径 e^{it'μ} Σ_k (-t'Σt/(4a))^k/k! · Φ*_k/Φ*_0

        alternating=False 去掉 (-1)^k，仅用作反例对照。

        Raises:
            ConvergenceError: 超出抵消预算或未收敛
        """
        y, phase = self._cf_arguments(t)
        if y == 0.0:
            return phase
        return phase * self._cf_series_sum(y, alternating)

    def cf_quadrature(self, t: Sequence[float]) -> complex:
        """求积路径 e^{it'μ} E[Ω_n(R·t'Σt)]"""
        y, phase = self._cf_arguments(t)
        if y == 0.0:
            return phase
        return phase * self._cf_radial_integral(y)

    def cf(self, t: Sequence[float], method: CfMethod = "auto") -> complex:
        """
        特征函数 ψ(t)

        auto：t'Σt <= 100a 时先走级数，级数超出抵消预算或未收敛则
        转入 Ω_n 求积。

        Raises:
            ShapeError: t 长度不是 n
            RangeError: 求积路径未收敛
        """
        if method == "series":
            return self.cf_series(t)
        if method == "quadrature":
            return self.cf_quadrature(t)
        if method != "auto":
            raise DomainError("method", method, "未知的特征函数计算方法")
        y, phase = self._cf_arguments(t)
        if y == 0.0:
            return phase
        if y <= CF_SERIES_ARGUMENT_LIMIT * self.params.a:
            try:
                return phase * self._cf_series_sum(y)
            except ConvergenceError:
                logger.warning("特征函数级数在 t'Σt=%.6g 处超出预算，改用求积", y)
        return phase * self._cf_radial_integral(y)
