"""
仿射变换、投影、边缘化与条件化

满秩仿射变换仍是同一生成函数的 GML 分布；秩亏投影、边缘与条件
分布一般不再属于该族，用 EllipticalLaw 表示。
"""

import logging
import math
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.linalg import cho_factor, cho_solve, qr, solve_triangular
from scipy.special import gammaln

from ..core.exceptions import (
    DomainError,
    IndexSetError,
    PreconditionError,
    RangeError,
    RankError,
    SamplerError,
    ShapeError,
)
from ..models import GeneratorParams, SampleBatch
from .distribution import GmlDistribution, factor_dispersion
from .generator import (
    MAX_PROPOSAL_BATCH,
    MAX_PROPOSALS_PER_DRAW,
    ShiftedGenerator,
    marginal_generator,
    radial_sample,
)
from .numerics import integrate_finite, integrate_semi_infinite

logger = logging.getLogger(__name__)

GeneratorFunction = Callable[[Union[float, np.ndarray]], Union[float, np.ndarray]]
RadialSampler = Callable[[np.random.Generator, int], np.ndarray]

RANK_TOLERANCE = 1e-10
IN_FAMILY_THRESHOLD = 1e-14
MONOTONE_GRID = np.concatenate(([0.0], np.geomspace(1e-3, 1e3, 63)))
CDF_GRID_POINTS = 20_001


class EllipticalLaw:
    """
    椭圆对称分布 Ell_m(μ, Σ, g)

    密度 f(x) = c |Σ|^{-1/2} g((x-μ)'Σ^{-1}(x-μ))，
    c = Γ(m/2) / (π^{m/2} ∫₀^∞ t^{m/2-1} g(t) dt)，构造时计算一次。
    """

    def __init__(
        self,
        mu: Sequence[float],
        sigma: Union[Sequence[Sequence[float]], np.ndarray],
        generator: GeneratorFunction,
        normalizer: Optional[float] = None,
        *,
        radial_sampler: Optional[RadialSampler] = None,
        in_family: bool = False,
        label: str = "",
    ):
        location, dispersion, factor = factor_dispersion(mu, sigma)
        self.dim = location.size
        self._mu = location
        self._sigma = dispersion
        self._factor = factor
        for array in (self._mu, self._sigma, self._factor):
            array.setflags(write=False)
        self.log_det = 2.0 * float(np.sum(np.log(np.diag(factor))))
        self.generator = generator
        self.radial_sampler = radial_sampler
        self.in_family = in_family
        self.label = label

        values = np.asarray(generator(MONOTONE_GRID), dtype=float)
        if np.any(values < 0.0) or np.any(~np.isfinite(values)):
            raise DomainError("generator", label, "生成函数必须非负且有限")
        if np.any(np.diff(values) > 1e-10 * values[:-1] + 1e-300):
            raise DomainError("generator", label, "生成函数必须单调不增")

        if normalizer is None:
            normalizer = self._normalizer_by_quadrature()
        if not (normalizer > 0.0 and math.isfinite(normalizer)):
            raise DomainError("normalizer", normalizer, "归一化常数必须为正且有限")
        self.normalizer = float(normalizer)

    def _normalizer_by_quadrature(self) -> float:
        half = 0.5 * self.dim
        integral = self._generator_moment(0.0)
        log_sphere = half * math.log(math.pi) - float(gammaln(half))
        return 1.0 / (math.exp(log_sphere) * integral)

    def _generator_moment(self, l: float) -> float:
        """∫₀^∞ t^{m/2-1+l} g(t) dt"""
        exponent = 0.5 * self.dim - 1.0 + l

        def integrand(t: np.ndarray) -> np.ndarray:
            return t**exponent * np.asarray(self.generator(t))

        return float(
            integrate_semi_infinite(integrand, exponent, scale=max(exponent, 1.0)).value
        )

    @property
    def mu(self) -> np.ndarray:
        return self._mu

    @property
    def sigma(self) -> np.ndarray:
        return self._sigma

    @property
    def factor(self) -> np.ndarray:
        return self._factor

    def __repr__(self) -> str:
        return f"EllipticalLaw(m={self.dim}, label={self.label!r}, in_family={self.in_family})"

    def generator_values(self, t: Union[float, np.ndarray]) -> np.ndarray:
        return np.asarray(self.generator(np.asarray(t, dtype=float)), dtype=float)

    def _points(self, x: Union[float, Sequence, np.ndarray]) -> Tuple[np.ndarray, bool]:
        points = np.asarray(x, dtype=float)
        single = points.ndim <= 1
        if self.dim == 1 and points.ndim == 1 and points.size != 1:
            points = points[:, None]
            single = False
        points = points.reshape(-1, points.shape[-1] if points.ndim else 1)
        if points.shape[1] != self.dim:
            raise ShapeError("x", self.dim, points.shape[1])
        return points, single

    def mahalanobis(self, x) -> np.ndarray:
        points, _ = self._points(x)
        standardized = solve_triangular(self._factor, (points - self._mu).T, lower=True)
        return np.sum(standardized**2, axis=0)

    def pdf(self, x) -> Union[float, np.ndarray]:
        """密度 c |Σ|^{-1/2} g(q)"""
        _, single = self._points(x)
        q = self.mahalanobis(x)
        values = self.normalizer * math.exp(-0.5 * self.log_det) * self.generator_values(q)
        return float(values[0]) if single else values

    def log_pdf(self, x) -> Union[float, np.ndarray]:
        _, single = self._points(x)
        with np.errstate(divide="ignore"):
            log_g = np.log(self.generator_values(self.mahalanobis(x)))
        values = math.log(self.normalizer) - 0.5 * self.log_det + log_g
        return float(values[0]) if single else values

    def radial_moment_quadrature(self, l: float) -> float:
        """
        径向变量的 l 阶矩，对生成函数直接求积

        E(R^l) = c π^{m/2}/Γ(m/2) ∫₀^∞ t^{m/2-1+l} g(t) dt
        """
        half = 0.5 * self.dim
        if not (l > -half):
            raise DomainError("l", l, f"要求 l > -m/2 = {-half}")
        log_sphere = half * math.log(math.pi) - float(gammaln(half))
        return self.normalizer * math.exp(log_sphere) * self._generator_moment(l)

    # ------------------------------------------------------------------
    # 一维分布函数
    # ------------------------------------------------------------------

    def _require_univariate(self) -> float:
        if self.dim != 1:
            raise PreconditionError(f"分布函数只对一维分布提供，当前维数为 {self.dim}")
        return float(self._factor[0, 0])

    def cdf(self, x: float) -> float:
        """
        一维分布函数 F(x) = 1/2 + sign(z) ∫₀^{|z|} c g(u²) du，z = (x-μ)/σ

        逐点求积，用于小规模校验。
        """
        scale = self._require_univariate()
        z = (float(x) - float(self._mu[0])) / scale
        if z == 0.0:
            return 0.5
        if math.isinf(z):
            return 1.0 if z > 0 else 0.0
        half_mass = integrate_finite(
            lambda u: self.normalizer * self.generator_values(u * u), 0.0, abs(z)
        )
        return 0.5 + math.copysign(float(half_mass.value), z)

    def cdf_grid(self, x: np.ndarray, points: int = CDF_GRID_POINTS) -> np.ndarray:
        """
        在大量点上求一维分布函数

        在标准化坐标的细网格上做累积梯形积分再插值，生成函数只需一次
        向量化求值。
        """
        scale = self._require_univariate()
        z = (np.asarray(x, dtype=float) - float(self._mu[0])) / scale
        reach = float(np.max(np.abs(z))) if z.size else 0.0
        if reach == 0.0:
            return np.full(z.shape, 0.5)
        grid = np.linspace(0.0, reach, points)
        density = self.normalizer * self.generator_values(grid * grid)
        mass = cumulative_trapezoid(density, grid, initial=0.0)
        half_mass = np.interp(np.abs(z), grid, mass)
        return np.clip(0.5 + np.sign(z) * half_mass, 0.0, 1.0)

    # ------------------------------------------------------------------
    # 抽样
    # ------------------------------------------------------------------

    def sample(self, count: int, seed: int) -> SampleBatch:
        """
        Y = μ + √R·A·U^(m) 抽样

        Raises:
            PreconditionError: 该分布没有附带径向抽样器
        """
        if self.radial_sampler is None:
            raise PreconditionError(f"{self.label or '该分布'} 未提供径向抽样器")
        if int(count) != count or count < 0:
            raise DomainError("count", count, "要求非负整数")
        rng = np.random.default_rng(np.random.SeedSequence(int(seed)))
        radius = np.sqrt(self.radial_sampler(rng, int(count)))
        normal = rng.standard_normal((int(count), self.dim))
        direction = normal / np.linalg.norm(normal, axis=1, keepdims=True)
        draws = self._mu + radius[:, None] * (direction @ self._factor.T)
        return SampleBatch(draws=draws, seed=int(seed), count=int(count))


# ============================================================================
# 矩阵工具
# ============================================================================


def verified_rank(matrix: np.ndarray) -> int:
    """列主元 QR 的数值秩，阈值 1e-10·max|R_ii|"""
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    _, upper, _ = qr(matrix, pivoting=True, mode="economic")
    diagonal = np.abs(np.diag(upper))
    if diagonal.size == 0 or diagonal[0] == 0.0:
        return 0
    return int(np.sum(diagonal > RANK_TOLERANCE * diagonal[0]))


def _symmetrize(matrix: np.ndarray) -> np.ndarray:
    return 0.5 * (matrix + matrix.T)


def _check_indices(indices: Sequence[int], n: int) -> List[int]:
    """0 起始下标集合：互异、非空、真子集"""
    chosen = list(indices)
    if not chosen:
        raise IndexSetError(chosen, "下标集合不能为空")
    if any(int(i) != i for i in chosen):
        raise IndexSetError(chosen, "下标必须是整数")
    chosen = [int(i) for i in chosen]
    if any(i < 0 or i >= n for i in chosen):
        raise IndexSetError(chosen, f"下标必须位于 0..{n - 1}")
    if len(set(chosen)) != len(chosen):
        raise IndexSetError(chosen, "下标不能重复")
    if len(chosen) >= n:
        raise IndexSetError(chosen, "必须是真子集")
    return chosen


def schur_complement(
    sigma: np.ndarray, indices: Sequence[int]
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Σ_{22.1} = Σ₂₂ - Σ₂₁Σ₁₁^{-1}Σ₁₂ 与回归系数 Σ₂₁Σ₁₁^{-1}

    indices 指定第一块，其余分量按升序构成第二块。
    """
    sigma = np.asarray(sigma, dtype=float)
    first = _check_indices(indices, sigma.shape[0])
    rest = [i for i in range(sigma.shape[0]) if i not in first]
    s11 = sigma[np.ix_(first, first)]
    s12 = sigma[np.ix_(first, rest)]
    s22 = sigma[np.ix_(rest, rest)]
    factor = cho_factor(s11, lower=True)
    coefficient = cho_solve(factor, s12).T
    return _symmetrize(s22 - coefficient @ s12), coefficient


# ============================================================================
# 闭包运算
# ============================================================================


def affine_full_rank(
    dist: GmlDistribution, B: np.ndarray, b: Optional[Sequence[float]] = None
) -> GmlDistribution:
    """
    满秩仿射变换 Y = BX + b ~ GML_n(Bμ+b, BΣB', g)

    Raises:
        ShapeError: B 不是 n×n 或 b 长度不对
        RankError: B 奇异
    """
    B = np.atleast_2d(np.asarray(B, dtype=float))
    n = dist.dim
    if B.shape != (n, n):
        raise ShapeError("B", (n, n), B.shape)
    shift = np.zeros(n) if b is None else np.asarray(b, dtype=float)
    if shift.shape != (n,):
        raise ShapeError("b", (n,), shift.shape)
    rank = verified_rank(B)
    if rank < n:
        raise RankError(rank, n)
    return GmlDistribution(B @ dist.mu + shift, _symmetrize(B @ dist.sigma @ B.T), dist.params)


def project(
    dist: GmlDistribution,
    B: np.ndarray,
    b: Optional[Sequence[float]] = None,
    *,
    label: str = "projection",
) -> EllipticalLaw:
    """
    秩 m < n 的投影 Y = BX + b ~ Ell_m(Bμ+b, BΣB', g_(m))

    径向抽样器按 R_Y = R·W，W ~ Beta(m/2, (n-m)/2)。

    Raises:
        ShapeError: B 不是 m×n（m < n）或 b 长度不对
        RankError: rank(B) < m
    """
    B = np.atleast_2d(np.asarray(B, dtype=float))
    n = dist.dim
    m = B.shape[0]
    if B.ndim != 2 or B.shape[1] != n or not (1 <= m < n):
        raise ShapeError("B", f"m×{n}，1 <= m < {n}", B.shape)
    shift = np.zeros(m) if b is None else np.asarray(b, dtype=float)
    if shift.shape != (m,):
        raise ShapeError("b", (m,), shift.shape)
    rank = verified_rank(B)
    if rank < m:
        raise RankError(rank, m)

    half_codim = 0.5 * (n - m)
    generator = marginal_generator(m, n, dist.params)
    log_normalizer = math.log(dist.d_n) + half_codim * math.log(math.pi) - float(
        gammaln(half_codim)
    )
    radial = dist.radial

    def radial_sampler(rng: np.random.Generator, size: int) -> np.ndarray:
        base = radial_sample(radial, rng, size)
        return base * rng.beta(0.5 * m, half_codim, size)

    logger.debug("投影: n=%d -> m=%d", n, m)
    return EllipticalLaw(
        B @ dist.mu + shift,
        _symmetrize(B @ dist.sigma @ B.T),
        generator,
        math.exp(log_normalizer),
        radial_sampler=radial_sampler,
        label=label,
    )


def pushforward_sample(
    dist: GmlDistribution,
    B: np.ndarray,
    b: Optional[Sequence[float]],
    count: int,
    seed: int,
) -> SampleBatch:
    """先从 dist 抽样再逐行做 y = Bx + b"""
    B = np.atleast_2d(np.asarray(B, dtype=float))
    if B.shape[1] != dist.dim:
        raise ShapeError("B", f"?×{dist.dim}", B.shape)
    shift = np.zeros(B.shape[0]) if b is None else np.asarray(b, dtype=float)
    batch = dist.sample(count, seed)
    return SampleBatch(draws=batch.draws @ B.T + shift, seed=batch.seed, count=batch.count)


def marginalize(dist: GmlDistribution, indices: Sequence[int]) -> EllipticalLaw:
    """
    分量子集 X^(1) ~ Ell_m(μ^(1), Σ₁₁, g_(m))

    Args:
        dist: 联合分布
        indices: 0 起始、互异、非空的真子集

    Raises:
        IndexSetError: 下标集合无效
    """
    chosen = _check_indices(indices, dist.dim)
    selection = np.eye(dist.dim)[chosen]
    return project(dist, selection, label=f"marginal{tuple(chosen)}")


def _shifted_radial_sample(
    half_dim: float,
    q1: float,
    params: GeneratorParams,
    rng: np.random.Generator,
    size: int,
) -> np.ndarray:
    """密度 ∝ v^{p-1} g(v + q1) 的抽样：Gamma(p, rate=b) 提议，以 (1+e^{-a(v+q1)})^{-r} 接受"""
    scale = 1.0 / params.b
    if params.r == 0.0 or size == 0:
        return rng.gamma(half_dim, scale, size)
    draws = np.empty(size)
    filled = proposals = 0
    limit = MAX_PROPOSALS_PER_DRAW * size
    floor = 2.0 ** (-params.r)
    while filled < size:
        need = size - filled
        batch = int(min(max(1.1 * need / floor + 16, 64), MAX_PROPOSAL_BATCH))
        proposal = rng.gamma(half_dim, scale, batch)
        accept = rng.random(batch) < np.exp(
            -params.r * np.log1p(np.exp(-params.a * (proposal + q1)))
        )
        proposals += batch
        chosen = proposal[accept][:need]
        draws[filled : filled + chosen.size] = chosen
        filled += chosen.size
        if filled < size and proposals >= limit:
            raise SamplerError(proposals, filled, size)
    return draws


def condition(
    dist: GmlDistribution, indices: Sequence[int], x1: Sequence[float]
) -> EllipticalLaw:
    """
    给定 X^(1) = x1 时 X^(2) 的条件分布

    Ell_{n-m}(μ_{2.1}, Σ_{22.1}, t ↦ g(t + q1))，q1 = (x1-μ^(1))'Σ₁₁^{-1}(x1-μ^(1))，
    归一化常数 Γ(p)/(π^p g_(m)(q1))，p = (n-m)/2。x1 = μ^(1) 时仍属原族。

    Raises:
        IndexSetError: 下标集合无效
        ShapeError: x1 长度与下标个数不一致
    """
    first = _check_indices(indices, dist.dim)
    observed = np.atleast_1d(np.asarray(x1, dtype=float))
    if observed.shape != (len(first),):
        raise ShapeError("x1", (len(first),), observed.shape)
    rest = [i for i in range(dist.dim) if i not in first]
    m = len(first)

    s11 = dist.sigma[np.ix_(first, first)]
    s21 = dist.sigma[np.ix_(rest, first)]
    deviation = observed - dist.mu[first]
    weights = cho_solve(cho_factor(s11, lower=True), deviation)
    q1 = max(float(deviation @ weights), 0.0)
    location = dist.mu[rest] + s21 @ weights
    dispersion, _ = schur_complement(dist.sigma, first)

    # 生成函数与 g_(m)(q1) 同时去掉因子 e^{-b·q1}
    half_codim = 0.5 * (dist.dim - m)
    tail_mass = float(marginal_generator(m, dist.dim, dist.params).scaled(q1))
    if not (tail_mass > 0.0 and math.isfinite(tail_mass)):
        raise RangeError("q1", q1, "条件归一化常数无法表示")
    normalizer = math.exp(
        float(gammaln(half_codim)) - half_codim * math.log(math.pi)
    ) / tail_mass
    params = dist.params

    def radial_sampler(rng: np.random.Generator, size: int) -> np.ndarray:
        return _shifted_radial_sample(half_codim, q1, params, rng, size)

    return EllipticalLaw(
        location,
        dispersion,
        ShiftedGenerator(params, q1, rescaled=True),
        normalizer,
        radial_sampler=radial_sampler,
        in_family=q1 < IN_FAMILY_THRESHOLD,
        label=f"conditional{tuple(rest)}|{tuple(first)}",
    )
