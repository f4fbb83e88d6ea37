"""
自定义异常类

定义数值库中使用的各类异常。每个异常携带可读消息、错误码和结构化细节，
命令行据此映射退出码，HTTP接口据此生成统一的错误响应。
"""

from typing import Any, Dict, Optional, Sequence


class GmlError(Exception):
    """
    GML数值库基础异常类

    所有库异常的基类，提供统一的异常处理接口。
    """

    def __init__(
        self,
        message: str,
        error_code: Optional[str] = None,
        details: Optional[Dict[str, Any]] = None,
    ):
        super().__init__(message)
        self.message = message
        self.error_code = error_code or self.__class__.__name__
        self.details = details or {}


class DomainError(GmlError):
    """参数超出数学定义域"""

    def __init__(self, parameter: str, value: Any, reason: str):
        super().__init__(
            message=f"参数超出定义域: {parameter}={value!r} - {reason}",
            error_code="DOMAIN_ERROR",
            details={"parameter": parameter, "value": repr(value), "reason": reason},
        )


class ConvergenceError(GmlError):
    """求积或级数在允许的加密层数内未收敛"""

    def __init__(
        self,
        method: str,
        best_estimate: Any,
        error_estimate: float,
        levels: int,
    ):
        super().__init__(
            message=(
                f"数值方法未收敛 ({method}): {levels}层后误差估计 "
                f"{error_estimate:.3e}"
            ),
            error_code="CONVERGENCE_ERROR",
            details={
                "method": method,
                "best_estimate": repr(best_estimate),
                "error_estimate": error_estimate,
                "levels": levels,
            },
        )
        self.best_estimate = best_estimate
        self.error_estimate = error_estimate


class DivergenceError(GmlError):
    """交错级数的项在截断点之后不再递减"""

    def __init__(self, series: str, start_index: int, window: int):
        super().__init__(
            message=(
                f"级数发散 ({series}): 第{start_index}项之后连续{window}项"
                f"的绝对值未下降"
            ),
            error_code="SERIES_DIVERGENCE",
            details={"series": series, "start_index": start_index, "window": window},
        )


class RangeError(GmlError):
    """参数超出支持范围"""

    def __init__(self, quantity: str, value: Any, limit: Any):
        super().__init__(
            message=f"超出支持范围: {quantity}={value!r}，限制为 {limit}",
            error_code="RANGE_ERROR",
            details={"quantity": quantity, "value": repr(value), "limit": repr(limit)},
        )


class PreconditionError(GmlError):
    """调用前置条件不满足"""

    def __init__(self, reason: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(
            message=f"前置条件不满足: {reason}",
            error_code="PRECONDITION_ERROR",
            details=details,
        )


class ShapeError(GmlError):
    """维度不匹配"""

    def __init__(self, name: str, expected: Any, actual: Any):
        super().__init__(
            message=f"维度不匹配: {name} 期望 {expected}，实际 {actual}",
            error_code="SHAPE_ERROR",
            details={"name": name, "expected": repr(expected), "actual": repr(actual)},
        )


class RankError(GmlError):
    """变换矩阵秩不足"""

    def __init__(self, rank: int, required: int):
        super().__init__(
            message=f"变换矩阵秩不足: 秩为{rank}，需要{required}",
            error_code="RANK_ERROR",
            details={"rank": rank, "required": required},
        )


class IndexSetError(GmlError):
    """边缘化或条件化的下标集合无效"""

    def __init__(self, indices: Sequence[int], reason: str):
        super().__init__(
            message=f"下标集合无效: {list(indices)} - {reason}",
            error_code="INDEX_SET_ERROR",
            details={"indices": list(indices), "reason": reason},
        )


class UnsupportedDimensionError(GmlError):
    """维度超出直接数值积分的支持范围"""

    def __init__(self, dim: int, max_dim: int):
        super().__init__(
            message=f"不支持的维度: n={dim}，直接积分最多支持 n={max_dim}",
            error_code="UNSUPPORTED_DIMENSION",
            details={"dim": dim, "max_dim": max_dim},
        )


class SamplerError(GmlError):
    """拒绝抽样超过提议次数上限"""

    def __init__(self, proposals: int, accepted: int, requested: int):
        super().__init__(
            message=(
                f"拒绝抽样失败: {proposals}次提议仅接受{accepted}个，"
                f"需要{requested}个"
            ),
            error_code="SAMPLER_ERROR",
            details={
                "proposals": proposals,
                "accepted": accepted,
                "requested": requested,
            },
        )


class ConfigurationError(GmlError):
    """命令行或HTTP请求参数组合无效"""

    def __init__(self, config_key: str, reason: str):
        super().__init__(
            message=f"配置错误 ({config_key}): {reason}",
            error_code="CONFIGURATION_ERROR",
            details={"config_key": config_key, "reason": reason},
        )
