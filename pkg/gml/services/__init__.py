"""
数值服务层

包含求积与级数求和、特殊函数、密度生成函数、GML分布对象、
闭包运算以及独立校验。
"""

from .numerics import (
    alternating_series_sum,
    bernoulli_numbers,
    bernoulli_polynomial,
    find_root_increasing,
    integrate_finite,
    integrate_semi_infinite,
)
from .specfun import phi_star, phi_star_minus_one, riemann_zeta, zeta_even, zeta_odd_integral
from .generator import (
    RadialLaw,
    consistent_generator_odd,
    generator_g,
    marginal_generator,
    norm_const_c,
    norm_const_d,
    radial_law,
    radial_moment,
    radial_sample,
)
from .distribution import GmlDistribution, cf_1d, omega_n
from .transforms import EllipticalLaw, affine_full_rank, condition, marginalize, project
from .validation import (
    cf_mc_check,
    marginal_sampler_check,
    mc_moment_check,
    pdf_normalization_check,
    run_suite,
)

__all__ = [
    # 求积与级数
    "integrate_finite",
    "integrate_semi_infinite",
    "alternating_series_sum",
    "find_root_increasing",
    "bernoulli_numbers",
    "bernoulli_polynomial",
    # 特殊函数
    "riemann_zeta",
    "zeta_even",
    "zeta_odd_integral",
    "phi_star",
    "phi_star_minus_one",
    # 生成函数与径向分布
    "generator_g",
    "norm_const_c",
    "norm_const_d",
    "marginal_generator",
    "consistent_generator_odd",
    "RadialLaw",
    "radial_law",
    "radial_moment",
    "radial_sample",
    # 分布
    "GmlDistribution",
    "omega_n",
    "cf_1d",
    # 闭包运算
    "EllipticalLaw",
    "affine_full_rank",
    "project",
    "marginalize",
    "condition",
    # 校验
    "mc_moment_check",
    "pdf_normalization_check",
    "cf_mc_check",
    "marginal_sampler_check",
    "run_suite",
]
