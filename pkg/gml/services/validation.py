"""
独立校验

蒙特卡洛矩与特征函数估计、密度归一化的张量积求积、边缘抽样的
Kolmogorov 距离检验，以及闭式常数表的核对。每份报告只由
（种子, 参数）决定。
"""

import logging
import math
import time
from typing import Callable, List, Optional, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss

from ..core.config import get_settings
from ..core.exceptions import PreconditionError, UnsupportedDimensionError
from ..models import GeneratorParams, SampleBatch, ValidationReport, ValidationSuite
from .distribution import GmlDistribution
from .generator import (
    FamilyGenerator,
    norm_const_c,
    norm_const_c_series,
    norm_const_d,
    radial_law,
    radial_moment,
    radial_moment_quadrature,
)
from .specfun import phi_star_minus_one, riemann_zeta
from .transforms import EllipticalLaw, marginalize

logger = logging.getLogger(__name__)

MIN_MOMENT_COUNT = 10_000
MIN_CF_COUNT = 100_000
MIN_MARGINAL_COUNT = 100_000
MAX_NORMALIZATION_DIM = 3
NORMALIZATION_TOLERANCE = 1e-6
KOLMOGOROV_CRITICAL = 1.63
KOLMOGOROV_SLACK = 1.5

# 张量积 Gauss-Legendre：每轴 PANELS 段、每段 NODES 个节点
NORMALIZATION_PANELS = 16
NORMALIZATION_NODES = 16

# c_n 闭式表
CLOSED_FORM_C = {
    2: 1.0 / math.pi,
    4: 1.0 / (4.0 * math.pi**2 * math.log(2.0)),
    6: 3.0 / (2.0 * math.pi**5),
    10: 45.0 / (14.0 * math.pi**9),
    14: 945.0 / (124.0 * math.pi**13),
    18: 4725.0 / (254.0 * math.pi**17),
}


def _elapsed_since(start: float) -> float:
    return max(time.perf_counter() - start, 0.0)


def _standard_error(values: np.ndarray) -> float:
    return float(np.std(values, ddof=1) / math.sqrt(values.shape[0]))


# ============================================================================
# 矩
# ============================================================================


def _product_moment_orders(n: int) -> List[List[int]]:
    orders = [[1] + [0] * (n - 1), [2] + [0] * (n - 1)]
    if n >= 2:
        orders.append([1, 1] + [0] * (n - 2))
    return orders


def moment_checks_for_batch(
    dist: GmlDistribution, batch: SampleBatch, suite: str = "moments"
) -> ValidationReport:
    """
    用一批样本核对均值、协方差与标准化乘积矩

    标准误全部取自样本本身。

    Raises:
        PreconditionError: 样本维数与分布不一致
    """
    if batch.dim != dist.dim:
        raise PreconditionError(
            f"样本维数 {batch.dim} 与分布维数 {dist.dim} 不一致",
            {"sample_dim": batch.dim, "dim": dist.dim},
        )
    report = ValidationReport(suite=suite, seed=batch.seed)
    draws = batch.draws
    mean = dist.mean()
    cov = dist.cov()
    centered = draws - mean

    for i in range(dist.dim):
        report.add(f"mean[{i}]", mean[i], np.mean(draws[:, i]), 0.0, _standard_error(draws[:, i]))
    for i in range(dist.dim):
        for j in range(i, dist.dim):
            products = centered[:, i] * centered[:, j]
            report.add(
                f"cov[{i},{j}]", cov[i, j], np.mean(products), 0.0, _standard_error(products)
            )

    standardized = dist.standardize(draws)
    for orders in _product_moment_orders(dist.dim):
        products = np.prod(standardized ** (2 * np.asarray(orders)), axis=1)
        report.add(
            f"product_moment{tuple(orders)}",
            dist.product_moment(orders),
            np.mean(products),
            0.0,
            _standard_error(products),
        )
    return report


def mc_moment_check(dist: GmlDistribution, count: int, seed: int) -> ValidationReport:
    """
    蒙特卡洛矩检验

    Args:
        dist: 被检验的分布
        count: 抽样数，至少 10^4
        seed: 随机种子

    Returns:
        ValidationReport: 均值、协方差、乘积矩的逐项结论
    """
    if count < MIN_MOMENT_COUNT:
        raise PreconditionError(f"矩检验至少需要 {MIN_MOMENT_COUNT} 个样本", {"count": count})
    start = time.perf_counter()
    report = moment_checks_for_batch(dist, dist.sample(count, seed))
    report.elapsed = _elapsed_since(start)
    logger.info("矩检验: n=%d, count=%d, passed=%s", dist.dim, count, report.passed)
    return report


# ============================================================================
# 密度归一化
# ============================================================================


def _composite_legendre(lo: float, hi: float) -> tuple:
    nodes, weights = leggauss(NORMALIZATION_NODES)
    edges = np.linspace(lo, hi, NORMALIZATION_PANELS + 1)
    half = 0.5 * np.diff(edges)
    centres = 0.5 * (edges[:-1] + edges[1:])
    points = (centres[:, None] + half[:, None] * nodes[None, :]).ravel()
    scaled = (half[:, None] * weights[None, :]).ravel()
    return points, scaled


def pdf_normalization_check(dist: GmlDistribution) -> ValidationReport:
    """
    ∫ pdf = 1 的张量积求积检验（n <= 3）

    积分盒取 μ ± L·√Σ_ii，L = max(10, √(50/b))。

    Raises:
        UnsupportedDimensionError: n > 3
    """
    if dist.dim > MAX_NORMALIZATION_DIM:
        raise UnsupportedDimensionError(dist.dim, MAX_NORMALIZATION_DIM)
    start = time.perf_counter()
    reach = max(10.0, math.sqrt(50.0 / dist.params.b))
    axes = []
    for i in range(dist.dim):
        radius = reach * math.sqrt(dist.sigma[i, i])
        axes.append(_composite_legendre(dist.mu[i] - radius, dist.mu[i] + radius))

    if dist.dim == 1:
        points, weights = axes[0]
        total = float(np.sum(weights * dist.pdf(points[:, None])))
    else:
        # 固定第一个坐标逐片求和以限制内存
        rest_points = np.stack(
            np.meshgrid(*[axis[0] for axis in axes[1:]], indexing="ij"), axis=-1
        ).reshape(-1, dist.dim - 1)
        rest_weights = np.ones(1)
        for axis in axes[1:]:
            rest_weights = rest_weights.reshape(-1, 1) * axis[1][None, :]
        rest_weights = rest_weights.ravel()
        total = 0.0
        for x0, w0 in zip(*axes[0]):
            slab = np.column_stack([np.full(rest_points.shape[0], x0), rest_points])
            total += w0 * float(np.sum(rest_weights * dist.pdf(slab)))

    report = ValidationReport(suite="pdf_normalization")
    report.add(f"integral(n={dist.dim})", 1.0, total, NORMALIZATION_TOLERANCE)
    report.elapsed = _elapsed_since(start)
    return report


# ============================================================================
# 特征函数
# ============================================================================


def cf_mc_check(
    dist: GmlDistribution,
    t_grid: Sequence[Sequence[float]],
    count: int,
    seed: int,
    cf: Optional[Callable[[np.ndarray], complex]] = None,
) -> ValidationReport:
    """
    经验 E[exp(i t'X)] 与特征函数的逐点比较

    实部、虚部各一项检查。cf 缺省为 dist.cf，可替换为反例对照。
    """
    if count < MIN_CF_COUNT:
        raise PreconditionError(f"特征函数检验至少需要 {MIN_CF_COUNT} 个样本", {"count": count})
    start = time.perf_counter()
    evaluate = cf or dist.cf
    draws = dist.sample(count, seed).draws
    report = ValidationReport(suite="cf", seed=seed)
    for t in t_grid:
        vector = np.asarray(t, dtype=float)
        phase = draws @ vector
        cosine, sine = np.cos(phase), np.sin(phase)
        expected = complex(evaluate(vector))
        label = ",".join(f"{value:g}" for value in vector)
        report.add(f"cf({label}).re", expected.real, np.mean(cosine), 1e-12, _standard_error(cosine))
        report.add(f"cf({label}).im", expected.imag, np.mean(sine), 1e-12, _standard_error(sine))
    report.elapsed = _elapsed_since(start)
    logger.info("特征函数检验: %d个网格点, passed=%s", len(t_grid), report.passed)
    return report


def cf_two_path_check(
    dist: GmlDistribution, t_grid: Sequence[Sequence[float]], tolerance: float = 1e-8
) -> ValidationReport:
    """级数路径与 Ω_n 求积路径的一致性"""
    report = ValidationReport(suite="cf_two_path")
    for t in t_grid:
        series = dist.cf_series(t)
        quadrature = dist.cf_quadrature(t)
        label = ",".join(f"{value:g}" for value in t)
        report.add(f"cf_paths({label}).re", series.real, quadrature.real, tolerance)
        report.add(f"cf_paths({label}).im", series.imag, quadrature.imag, tolerance)
    return report


# ============================================================================
# 边缘抽样
# ============================================================================


def kolmogorov_distance(sorted_values: np.ndarray, cdf_values: np.ndarray) -> float:
    """已排序样本的经验分布与理论 CDF 的上确界距离"""
    count = sorted_values.shape[0]
    upper = np.arange(1, count + 1) / count - cdf_values
    lower = cdf_values - np.arange(0, count) / count
    return float(max(np.max(upper), np.max(lower)))


def marginal_sampler_check(
    dist: GmlDistribution,
    component_index: int,
    count: int,
    seed: int,
    law: Optional[EllipticalLaw] = None,
) -> ValidationReport:
    """
    单个分量的样本与一维边缘分布的 Kolmogorov 距离

    阈值 1.5·1.63/√count。law 缺省为 g_(1) 边缘，可替换为反例对照。
    """
    if count < MIN_MARGINAL_COUNT:
        raise PreconditionError(
            f"边缘检验至少需要 {MIN_MARGINAL_COUNT} 个样本", {"count": count}
        )
    start = time.perf_counter()
    target = law or marginalize(dist, [component_index])
    component = np.sort(dist.sample(count, seed).draws[:, component_index])
    distance = kolmogorov_distance(component, target.cdf_grid(component))
    threshold = KOLMOGOROV_SLACK * KOLMOGOROV_CRITICAL / math.sqrt(count)
    report = ValidationReport(suite="marginals", seed=seed)
    report.add(f"ks[{component_index}]", 0.0, distance, threshold)
    report.elapsed = _elapsed_since(start)
    return report


def family_marginal_law(dist: GmlDistribution, component_index: int) -> EllipticalLaw:
    """以原生成函数 g 代替 g_(1) 的一维分布（反例对照）"""
    return EllipticalLaw(
        [dist.mu[component_index]],
        [[dist.sigma[component_index, component_index]]],
        FamilyGenerator(dist.params),
        label="family-generator",
    )


# ============================================================================
# 常数
# ============================================================================


def constants_check() -> ValidationReport:
    """c_n、d_2、Φ* 恒等式与径向矩的闭式核对"""
    start = time.perf_counter()
    report = ValidationReport(suite="constants")
    for n, expected in CLOSED_FORM_C.items():
        report.add(f"c_{n}", expected, norm_const_c(n), 1e-10 * expected)
    for n in (6, 8, 10):
        expected = norm_const_c(n)
        report.add(f"c_{n}_series", expected, norm_const_c_series(n), 1e-8 * expected)

    classic = GeneratorParams.classic()
    report.add("d_2", 2.0 / math.pi, norm_const_d(2, classic), 1e-10 * 2.0 / math.pi)
    report.add("phi*_2(-1,1,1)", 0.5, phi_star_minus_one(1.0, 1.0, 2.0), 1e-10)
    report.add("phi*_2(-1,2,1)", math.log(2.0), phi_star_minus_one(2.0, 1.0, 2.0), 1e-10)
    for n in (6, 8, 10, 12):
        half = 0.5 * n
        expected = 2.0 ** (-half) * (2.0**half - 4.0) * riemann_zeta(half - 1.0)
        report.add(
            f"phi*_2(-1,{half:g},1)", expected, phi_star_minus_one(half, 1.0, 2.0), 1e-9
        )

    law = radial_law(2, classic)
    report.add("E(R)_closed", 2.0 * math.log(2.0), radial_moment(1.0, law), 1e-10)
    report.add("E(R)_quadrature", 2.0 * math.log(2.0), radial_moment_quadrature(1.0, law), 1e-10)
    report.elapsed = _elapsed_since(start)
    return report


# ============================================================================
# 套件
# ============================================================================


def _classic_distribution(n: int) -> GmlDistribution:
    return GmlDistribution(np.zeros(n), np.eye(n), GeneratorParams.classic())


def _normal_distribution(n: int) -> GmlDistribution:
    sigma = np.eye(n) + 0.3 * (np.ones((n, n)) - np.eye(n))
    return GmlDistribution(np.arange(n, dtype=float) * 0.5, sigma, GeneratorParams.normal())


def _moments_suite(seed: int, count: int) -> ValidationReport:
    report = ValidationReport(suite="moments", seed=seed)
    report.extend(mc_moment_check(_classic_distribution(2), count, seed), "classic2.")
    report.extend(mc_moment_check(_normal_distribution(3), count, seed + 1), "normal3.")
    for params in (
        GeneratorParams.classic(),
        GeneratorParams(a=1.0, b=1.0, r=0.5),
        GeneratorParams(a=2.0, b=1.0, r=5.0),
    ):
        for n in (1, 2, 3):
            dist = GmlDistribution(np.zeros(n), np.eye(n), params)
            report.extend(
                pdf_normalization_check(dist),
                f"norm(a={params.a:g},b={params.b:g},r={params.r:g}).",
            )
    return report


def _cf_suite(seed: int, count: int) -> ValidationReport:
    report = ValidationReport(suite="cf", seed=seed)
    classic = _classic_distribution(2)
    grid = [[0.0, 0.0], [0.5, 0.0], [1.0, 0.0], [2.0, 0.0], [0.5, 0.5], [1.0, -1.0]]
    report.extend(cf_mc_check(classic, grid, count, seed), "classic2.")
    report.extend(cf_two_path_check(classic, [[1.0, 0.0], [3.0, 2.0], [5.0, 5.0]]), "classic2.")
    report.extend(cf_mc_check(_normal_distribution(2), grid, count, seed + 1), "normal2.")
    return report


def _marginals_suite(seed: int, count: int) -> ValidationReport:
    report = ValidationReport(suite="marginals", seed=seed)
    report.extend(marginal_sampler_check(_classic_distribution(3), 0, count, seed), "classic3.")
    report.extend(marginal_sampler_check(_normal_distribution(3), 1, count, seed + 1), "normal3.")
    return report


def run_suite(
    suite: ValidationSuite,
    seed: Optional[int] = None,
    *,
    count: Optional[int] = None,
    cf_count: Optional[int] = None,
) -> ValidationReport:
    """
    运行一个校验套件

    Args:
        suite: constants / moments / cf / marginals / all
        seed: 随机种子，缺省取配置
        count: 矩与边缘检验的样本数，缺省取配置
        cf_count: 特征函数检验的样本数，缺省取配置

    Returns:
        ValidationReport: 合并后的报告
    """
    settings = get_settings()
    seed = settings.default_seed if seed is None else seed
    count = count or settings.validation_count
    cf_count = cf_count or settings.validation_cf_count
    suite = ValidationSuite(suite)
    start = time.perf_counter()
    logger.info("开始校验套件 %s (seed=%d)", suite.value, seed)

    report = ValidationReport(suite=suite.value, seed=seed)
    if suite in (ValidationSuite.CONSTANTS, ValidationSuite.ALL):
        report.extend(constants_check(), "constants.")
    if suite in (ValidationSuite.MOMENTS, ValidationSuite.ALL):
        report.extend(_moments_suite(seed, count), "moments.")
    if suite in (ValidationSuite.CF, ValidationSuite.ALL):
        report.extend(_cf_suite(seed, cf_count), "cf.")
    if suite in (ValidationSuite.MARGINALS, ValidationSuite.ALL):
        report.extend(_marginals_suite(seed, count), "marginals.")

    report.elapsed = _elapsed_since(start)
    logger.info(
        "校验套件 %s 完成: %d 项, %d 项失败, 用时 %.1fs",
        suite.value,
        len(report.checks),
        len(report.failed_checks),
        report.elapsed,
    )
    return report
