"""
HTTP路由
"""

from .distribution_router import router as distribution_router

__all__ = ["distribution_router"]
