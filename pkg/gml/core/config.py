"""
库配置管理

基于pydantic-settings的配置管理，支持GML_前缀的环境变量与.env文件。
数值模块的默认求积容差、级数截断和抽样参数均从这里读取。
"""

import logging
from functools import lru_cache

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """
    库配置类

    自动从环境变量加载配置，提供默认值和验证。
    例如 GML_QUAD_TOL=1e-10 会覆盖默认求积相对容差。
    """

    model_config = SettingsConfigDict(
        env_prefix="GML_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # ============================================================================
    # 应用基础配置
    # ============================================================================

    app_name: str = Field(default="GML分布数值服务", description="应用名称")
    app_version: str = Field(default="0.1.0", description="应用版本")
    environment: str = Field(default="development", description="运行环境")
    debug: bool = Field(default=False, description="调试模式")

    # 服务器配置
    host: str = Field(default="127.0.0.1", description="服务器主机")
    port: int = Field(default=8000, description="服务器端口", ge=1, le=65535)

    # 日志配置
    log_level: str = Field(default="INFO", description="日志级别")

    # ============================================================================
    # 数值核心配置
    # ============================================================================

    quad_tol: float = Field(
        default=1e-12,
        description="默认求积相对容差",
        gt=0.0,
        lt=1e-2,
    )
    quad_abs_tol: float = Field(
        default=1e-300,
        description="默认求积绝对容差下限",
        gt=0.0,
    )
    quad_max_levels: int = Field(
        default=12,
        description="双指数求积最大加密层数",
        ge=1,
        le=20,
    )
    series_max_terms: int = Field(
        default=64,
        description="Euler变换使用的最大项数",
        ge=8,
        le=256,
    )
    divergence_window: int = Field(
        default=32,
        description="发散判定窗口长度（项数）",
        ge=4,
        le=256,
    )

    # ============================================================================
    # 抽样与校验配置
    # ============================================================================

    default_seed: int = Field(default=20240601, description="默认随机种子", ge=0)
    sample_chunk_size: int = Field(
        default=100_000,
        description="每个确定性子随机流负责的抽样行数",
        ge=1_000,
    )
    validation_count: int = Field(
        default=1_000_000,
        description="矩与边缘校验的蒙特卡洛样本量",
        ge=10_000,
    )
    validation_cf_count: int = Field(
        default=200_000,
        description="特征函数校验的蒙特卡洛样本量",
        ge=100_000,
    )

    # ============================================================================
    # 验证器
    # ============================================================================

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """验证日志级别"""
        valid_levels = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
        if v.upper() not in valid_levels:
            raise ValueError(f"日志级别必须是: {', '.join(valid_levels)}")
        return v.upper()

    @field_validator("environment")
    @classmethod
    def validate_environment(cls, v: str) -> str:
        """验证运行环境"""
        valid_envs = ["development", "staging", "production"]
        if v.lower() not in valid_envs:
            raise ValueError(f"运行环境必须是: {', '.join(valid_envs)}")
        return v.lower()

    def configure_logging(self) -> None:
        """按配置的日志级别初始化根日志器"""
        logging.basicConfig(
            level=getattr(logging, self.log_level),
            format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        )


@lru_cache()
def get_settings() -> Settings:
    """
    获取库配置实例（单例模式）

    使用lru_cache装饰器确保配置只加载一次；测试中修改环境变量后
    需调用 get_settings.cache_clear()。

    Returns:
        Settings: 配置实例
    """
    return Settings()


# 全局配置实例
settings = get_settings()
