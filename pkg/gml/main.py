"""
GML 分布数值服务主应用
"""

import logging
from datetime import datetime

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import __version__
from .core.config import settings
from .core.exceptions import (
    ConvergenceError,
    DivergenceError,
    GmlError,
    RangeError,
    SamplerError,
)
from .routers import distribution_router

# 配置日志
settings.configure_logging()
logger = logging.getLogger(__name__)

# 初始化FastAPI应用
app = FastAPI(
    title="GML 分布数值服务 API",
    description="广义椭圆对称Logistic分布的密度、常数、抽样、矩、特征函数与校验",
    version=__version__,
    docs_url="/docs",
    redoc_url="/redoc",
)

# CORS配置
app.add_middleware(
    CORSMiddleware,
    allow_origins=["http://localhost:3000", "http://127.0.0.1:3000"],
    allow_credentials=True,
    allow_methods=["GET", "POST", "OPTIONS"],
    allow_headers=["*"],
)

# 注册路由
app.include_router(distribution_router)

NUMERIC_ERRORS = (ConvergenceError, DivergenceError, RangeError, SamplerError)


def _error_body(code: str, message: str, details) -> dict:
    return {
        "success": False,
        "error": {"code": code, "message": message, "details": details},
        "timestamp": datetime.now().isoformat(),
    }


# 根路径
@app.get("/")
async def root():
    """API根路径"""
    return {
        "message": settings.app_name,
        "version": __version__,
        "timestamp": datetime.now().isoformat(),
        "docs": "/docs",
        "status": "running",
    }


# 健康检查
@app.get("/health")
async def health_check():
    """健康检查接口"""
    return {
        "status": "healthy",
        "timestamp": datetime.now().isoformat(),
        "environment": settings.environment,
        "quad_tol": settings.quad_tol,
    }


# 库异常
@app.exception_handler(GmlError)
async def gml_exception_handler(request: Request, exc: GmlError):
    """参数错误返回400，数值不收敛返回422"""
    status_code = 422 if isinstance(exc, NUMERIC_ERRORS) else 400
    logger.warning("%s %s -> %s: %s", request.method, request.url.path, exc.error_code, exc.message)
    return JSONResponse(
        status_code=status_code,
        content=_error_body(exc.error_code, exc.message, exc.details),
    )


# 全局异常处理
@app.exception_handler(Exception)
async def global_exception_handler(request: Request, exc: Exception):
    """全局异常处理器"""
    logger.error(f"Unhandled exception: {exc}", exc_info=True)
    return JSONResponse(
        status_code=500,
        content=_error_body(
            "SYS_001", "系统内部错误", str(exc) if settings.debug else "请联系系统管理员"
        ),
    )


if __name__ == "__main__":
    import uvicorn

    uvicorn.run("gml.main:app", host=settings.host, port=settings.port, log_level="info")
