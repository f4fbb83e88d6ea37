"""
分布计算路由 - 与命令行共用同一组命令函数
"""

import logging
from datetime import datetime
from typing import Any, Dict, Optional

import numpy as np
from fastapi import APIRouter, Query
from pydantic import BaseModel, Field

from ..cli import CONSTANTS_MAX_N, cmd_constants, cmd_moments
from ..models import (
    CfRequest,
    DistributionConfig,
    PdfRequest,
    SampleRequest,
    ValidationSuite,
)
from ..services.distribution import GmlDistribution
from ..services.validation import MIN_CF_COUNT, run_suite

# 初始化路由器
router = APIRouter(prefix="/api/v1", tags=["GML Distribution"])
logger = logging.getLogger(__name__)

# HTTP 请求内的蒙特卡洛样本数上限，完整的 10^6 次校验请用命令行
MAX_VALIDATION_COUNT = 200_000


class ApiResponse(BaseModel):
    success: bool = True
    data: Dict[str, Any]
    timestamp: str = Field(default_factory=lambda: datetime.now().isoformat())


@router.get("/constants")
def get_constants(n_max: int = Query(default=CONSTANTS_MAX_N)) -> ApiResponse:
    """c_n 与 d_n 常数表"""
    return ApiResponse(data=cmd_constants(n_max).to_dict())


@router.post("/pdf")
def evaluate_pdf(request: PdfRequest) -> ApiResponse:
    """在给定点上求密度与对数密度"""
    dist = GmlDistribution.from_config(request)
    points = np.asarray(request.points, dtype=float)
    density = np.atleast_1d(dist.pdf(points)).tolist()
    log_density = np.atleast_1d(dist.log_pdf(points)).tolist()
    return ApiResponse(
        data={"metadata": request.metadata(), "pdf": density, "log_pdf": log_density}
    )


@router.post("/moments")
def evaluate_moments(request: DistributionConfig) -> ApiResponse:
    """均值、协方差与径向矩"""
    return ApiResponse(data=cmd_moments(request).to_dict())


@router.post("/cf")
def evaluate_cf(request: CfRequest) -> ApiResponse:
    """特征函数值"""
    dist = GmlDistribution.from_config(request)
    values = []
    for t in request.t:
        value = dist.cf(t, request.method)
        values.append({"t": t, "re": value.real, "im": value.imag})
    return ApiResponse(data={"metadata": request.metadata(), "values": values})


@router.post("/sample")
def draw_sample(request: SampleRequest) -> ApiResponse:
    """精确抽样（最多 10^5 个）"""
    dist = GmlDistribution.from_config(request)
    batch = dist.sample(request.count, request.seed)
    logger.info("HTTP 抽样: n=%d, count=%d", request.n, request.count)
    return ApiResponse(
        data={
            "metadata": {**request.metadata(), "seed": request.seed, "count": request.count},
            "draws": batch.draws.tolist(),
        }
    )


@router.post("/validate/{suite}")
def validate(
    suite: ValidationSuite,
    seed: Optional[int] = Query(default=None, ge=0),
    count: int = Query(default=MIN_CF_COUNT, ge=MIN_CF_COUNT, le=MAX_VALIDATION_COUNT),
) -> ApiResponse:
    """运行校验套件并返回报告；样本数受 MAX_VALIDATION_COUNT 限制"""
    report = run_suite(suite, seed, count=count, cf_count=count)
    return ApiResponse(success=report.passed, data=report.model_dump())
