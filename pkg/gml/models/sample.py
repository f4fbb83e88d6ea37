"""
抽样批次容器
"""

from dataclasses import dataclass

import numpy as np

from ..core.exceptions import DomainError, ShapeError


@dataclass(frozen=True)
class SampleBatch:
    """
    一批抽样结果

    Attributes:
        draws: count×n 的样本矩阵
        seed: 生成该批次的种子
        count: 行数（允许为0，对应只有表头的输出）
    """

    draws: np.ndarray
    seed: int
    count: int

    def __post_init__(self) -> None:
        if self.draws.ndim != 2:
            raise ShapeError("draws", "二维矩阵", self.draws.shape)
        if self.draws.shape[0] != self.count:
            raise ShapeError("draws", f"{self.count}行", self.draws.shape)
        if not np.all(np.isfinite(self.draws)):
            raise DomainError("draws", "non-finite", "样本必须全部有限")
        self.draws.setflags(write=False)

    @property
    def dim(self) -> int:
        return int(self.draws.shape[1])
