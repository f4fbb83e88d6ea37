"""
命令行入口

子命令：constants、pdf-grid、sample、moments、cf、validate。
CSV 输出的第一行是以 `#` 开头的 JSON 元数据（参数集、种子、版本），
所有浮点数以17位有效数字输出，重新解析可得到逐位相同的双精度值。

退出码：0 成功，1 校验未通过，2 用法或参数错误，3 数值不收敛。
"""

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, TextIO, Tuple

import numpy as np
from pydantic import ValidationError

from . import __version__
from .core.config import get_settings
from .core.exceptions import (
    ConfigurationError,
    ConvergenceError,
    DivergenceError,
    GmlError,
    RangeError,
    SamplerError,
)
from .models import (
    CliCommand,
    CliConfig,
    DistributionConfig,
    GeneratorParams,
    OutputFormat,
    SampleBatch,
    ValidationReport,
    ValidationSuite,
)
from .services.distribution import GmlDistribution
from .services.generator import norm_const_c_value, norm_const_d
from .services.validation import moment_checks_for_batch, run_suite

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION_FAILED = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3

CONSTANTS_MAX_N = 18
FIGURE_R_VALUES = (0.5, 1.0, 2.0, 5.0, 10.0)
NUMBER_FORMAT = ".17g"


@dataclass
class Table:
    """命令输出：元数据、列名与数据行"""

    metadata: Dict[str, Any]
    columns: List[str]
    rows: List[List[Any]] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {"metadata": self.metadata, "columns": self.columns, "rows": self.rows}


# ============================================================================
# 输出
# ============================================================================


def format_value(value: Any) -> str:
    if isinstance(value, (float, np.floating)):
        return format(float(value), NUMBER_FORMAT)
    return str(value)


def write_table(table: Table, output_format: OutputFormat, stream: TextIO) -> None:
    """按 CSV（`#` JSON 表头）或 JSON 写出"""
    if output_format is OutputFormat.JSON:
        json.dump(table.to_dict(), stream)
        stream.write("\n")
        return
    stream.write("# " + json.dumps(table.metadata) + "\n")
    stream.write(",".join(table.columns) + "\n")
    for row in table.rows:
        stream.write(",".join(format_value(value) for value in row) + "\n")


def write_report(report: ValidationReport, stream: TextIO) -> None:
    stream.write(report.model_dump_json(indent=2) + "\n")


def _open_output(path: Optional[str]) -> TextIO:
    return open(path, "w", encoding="utf-8") if path else sys.stdout


def _metadata(config: DistributionConfig, **extra: Any) -> Dict[str, Any]:
    metadata = {"version": __version__, **config.metadata()}
    metadata.update(extra)
    return metadata


# ============================================================================
# 读取抽样文件
# ============================================================================


def read_sample_file(path: str) -> Tuple[SampleBatch, DistributionConfig]:
    """
    读回 cmd_sample 写出的 CSV 或 JSON 文件

    Returns:
        (SampleBatch, DistributionConfig): 样本与表头记录的参数集

    Raises:
        ConfigurationError: 文件格式无法识别
    """
    text = Path(path).read_text(encoding="utf-8")
    if text.startswith("#"):
        header, _, body = text.partition("\n")
        metadata = json.loads(header[1:].strip())
        lines = body.splitlines()[1:]
        rows = [[float(value) for value in line.split(",")] for line in lines if line]
    elif text.lstrip().startswith("{"):
        document = json.loads(text)
        metadata = document["metadata"]
        rows = document["rows"]
    else:
        raise ConfigurationError("from_sample", f"无法识别的抽样文件格式: {path}")

    config = DistributionConfig(
        n=metadata["n"],
        a=metadata["a"],
        b=metadata["b"],
        r=metadata["r"],
        mu=metadata["mu"],
        sigma=metadata["sigma"],
    )
    draws = np.asarray(rows, dtype=float).reshape(len(rows), config.n)
    batch = SampleBatch(draws=draws, seed=int(metadata["seed"]), count=len(rows))
    return batch, config


# ============================================================================
# 子命令
# ============================================================================


def cmd_constants(n_max: int) -> Table:
    """
    常数表：(n, c_n, d_n(a=b=1,r=2), method)，n = 1..n_max

    Raises:
        RangeError: n_max 不在 1..18
    """
    if not (1 <= n_max <= CONSTANTS_MAX_N):
        raise RangeError("n_max", n_max, f"1..{CONSTANTS_MAX_N}")
    classic = GeneratorParams.classic()
    table = Table(
        metadata={"version": __version__, "n_max": n_max, "a": 1.0, "b": 1.0, "r": 2.0},
        columns=["n", "c_n", "d_n", "method"],
    )
    for n in range(1, n_max + 1):
        c_value = norm_const_c_value(n)
        table.rows.append(
            [n, float(c_value.value), norm_const_d(n, classic), c_value.method.value]
        )
    return table


def _symmetric_axis(centre: float, half_width: float, resolution: int) -> np.ndarray:
    axis = np.linspace(-half_width, half_width, resolution)
    return centre + 0.5 * (axis - axis[::-1])


def cmd_pdf_grid(config: CliConfig) -> Table:
    """
    密度网格

    n = 1 输出 (x1, pdf)；n >= 2 在 (x1, x2) 平面上取方形网格，其余坐标固定为 μ。
    preset="figures" 要求 n = 2，一次输出 r = 0.5, 1, 2, 5, 10 五组。
    """
    if config.preset == "figures" and config.n != 2:
        raise ConfigurationError("preset", "figures 预设要求 n = 2")
    r_values = FIGURE_R_VALUES if config.preset == "figures" else (config.r,)
    mu = config.mu_vector()
    columns = ["x1", "pdf"] if config.n == 1 else ["x1", "x2", "pdf"]
    if config.preset == "figures":
        columns = ["r"] + columns
    table = Table(
        metadata=_metadata(
            config,
            grid_range=config.grid_range,
            resolution=config.resolution,
            preset=config.preset,
        ),
        columns=columns,
    )

    first = _symmetric_axis(mu[0], config.grid_range, config.resolution)
    if config.n == 1:
        points = first[:, None]
    else:
        second = _symmetric_axis(mu[1], config.grid_range, config.resolution)
        x1, x2 = np.meshgrid(first, second, indexing="ij")
        points = np.tile(mu, (x1.size, 1))
        points[:, 0] = x1.ravel()
        points[:, 1] = x2.ravel()

    for r in r_values:
        params = GeneratorParams(a=config.a, b=config.b, r=r)
        dist = GmlDistribution(mu, config.sigma_matrix(), params)
        density = np.atleast_1d(dist.pdf(points))
        prefix = [r] if config.preset == "figures" else []
        for point, value in zip(points, density):
            table.rows.append(prefix + [float(v) for v in point[: min(config.n, 2)]] + [float(value)])
    logger.info("密度网格: %d 行", len(table.rows))
    return table


def cmd_sample(config: CliConfig) -> Table:
    """抽样：每行一个样本，表头记录完整参数集与种子"""
    seed = get_settings().default_seed if config.seed is None else config.seed
    dist = GmlDistribution.from_config(config)
    batch = dist.sample(config.count, seed)
    return Table(
        metadata=_metadata(config, seed=seed, count=config.count),
        columns=[f"x{i + 1}" for i in range(config.n)],
        rows=batch.draws.tolist(),
    )


def cmd_moments(config: DistributionConfig) -> Table:
    """均值、协方差、协方差尺度与径向矩的闭式值"""
    dist = GmlDistribution.from_config(config)
    table = Table(metadata=_metadata(config), columns=["quantity", "value"])
    for i, value in enumerate(dist.mean()):
        table.rows.append([f"mean[{i}]", float(value)])
    cov = dist.cov()
    for i in range(dist.dim):
        for j in range(i, dist.dim):
            table.rows.append([f"cov[{i},{j}]", float(cov[i, j])])
    table.rows.append(["cov_scale", dist.cov_scale()])
    for order in (1, 2):
        table.rows.append([f"E(R^{order})", dist.radial.moment(float(order))])
    return table


def cmd_cf(config: CliConfig) -> Table:
    """特征函数 ψ(t) 的实部与虚部"""
    if config.t is None:
        raise ConfigurationError("t", "cf 命令需要 --t")
    dist = GmlDistribution.from_config(config)
    value = dist.cf(config.t, config.method)
    return Table(
        metadata=_metadata(config, method=config.method),
        columns=[f"t{i + 1}" for i in range(config.n)] + ["re", "im"],
        rows=[[float(v) for v in config.t] + [value.real, value.imag]],
    )


def cmd_validate(config: CliConfig) -> ValidationReport:
    """
    运行校验套件；给定 --from-sample 时对文件中的样本做矩检验

    Returns:
        ValidationReport: passed 决定退出码
    """
    if config.from_sample:
        batch, sample_config = read_sample_file(config.from_sample)
        dist = GmlDistribution.from_config(sample_config)
        return moment_checks_for_batch(dist, batch, suite="from-sample")
    seed = get_settings().default_seed if config.seed is None else config.seed
    return run_suite(config.suite, seed)


# ============================================================================
# 参数解析
# ============================================================================


def _distribution_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=2, help="维数")
    common.add_argument("--a", type=float, default=1.0)
    common.add_argument("--b", type=float, default=1.0)
    common.add_argument("--r", type=float, default=2.0)
    common.add_argument("--mu", type=float, nargs="+", default=None, help="位置向量")
    common.add_argument(
        "--sigma", nargs="+", default=["identity"], help="行优先展开的 Σ 或 identity"
    )
    common.add_argument("--seed", type=int, default=None)
    common.add_argument(
        "--format",
        dest="output_format",
        choices=[item.value for item in OutputFormat],
        default=OutputFormat.CSV.value,
    )
    common.add_argument("--out", default=None, help="输出路径，缺省为标准输出")
    return common


def build_parser() -> argparse.ArgumentParser:
    """构造 argparse 解析器"""
    common = _distribution_options()
    parser = argparse.ArgumentParser(prog="gml", description="GML 分布数值工具")
    subparsers = parser.add_subparsers(dest="command", required=True)

    constants = subparsers.add_parser(CliCommand.CONSTANTS.value, parents=[common])
    constants.add_argument("--n-max", dest="n_max", type=int, default=CONSTANTS_MAX_N)

    grid = subparsers.add_parser(CliCommand.PDF_GRID.value, parents=[common])
    grid.add_argument("--range", dest="grid_range", type=float, default=4.0)
    grid.add_argument("--resolution", type=int, default=101)
    grid.add_argument("--preset", choices=["figures"], default=None)

    sample = subparsers.add_parser(CliCommand.SAMPLE.value, parents=[common])
    sample.add_argument("--count", type=int, default=1000)

    subparsers.add_parser(CliCommand.MOMENTS.value, parents=[common])

    cf = subparsers.add_parser(CliCommand.CF.value, parents=[common])
    cf.add_argument("--t", type=float, nargs="+", required=True)
    cf.add_argument("--method", choices=["auto", "series", "quadrature"], default="auto")

    validate = subparsers.add_parser(CliCommand.VALIDATE.value, parents=[common])
    validate.add_argument(
        "suite", nargs="?", choices=[item.value for item in ValidationSuite], default="all"
    )
    validate.add_argument("--from-sample", dest="from_sample", default=None)
    return parser


def parse_config(argv: Optional[Sequence[str]] = None) -> CliConfig:
    """
    解析命令行并构造 CliConfig

    Raises:
        SystemExit: argparse 用法错误（退出码2）
        ValidationError: 参数不满足模型约束
    """
    args = vars(build_parser().parse_args(argv))
    sigma = args.pop("sigma")
    try:
        args["sigma"] = "identity" if sigma == ["identity"] else [float(v) for v in sigma]
    except ValueError as exc:
        raise ConfigurationError("sigma", f"无法解析为数值: {sigma}") from exc
    return CliConfig(**{key: value for key, value in args.items() if value is not None})


def _run(config: CliConfig) -> int:
    if config.command is CliCommand.VALIDATE:
        report = cmd_validate(config)
        stream = _open_output(config.out)
        try:
            write_report(report, stream)
        finally:
            if stream is not sys.stdout:
                stream.close()
        return EXIT_OK if report.passed else EXIT_VALIDATION_FAILED

    if config.command is CliCommand.CONSTANTS:
        table = cmd_constants(config.n_max)
    elif config.command is CliCommand.PDF_GRID:
        table = cmd_pdf_grid(config)
    elif config.command is CliCommand.SAMPLE:
        table = cmd_sample(config)
    elif config.command is CliCommand.MOMENTS:
        table = cmd_moments(config)
    else:
        table = cmd_cf(config)
    stream = _open_output(config.out)
    try:
        write_table(table, config.output_format, stream)
    finally:
        if stream is not sys.stdout:
            stream.close()
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    """命令行主函数，返回退出码"""
    settings = get_settings()
    settings.configure_logging()
    try:
        config = parse_config(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except ValidationError as exc:
        sys.stderr.write(f"参数错误: {exc}\n")
        return EXIT_USAGE
    except GmlError as exc:
        sys.stderr.write(f"{exc.error_code}: {exc.message}\n")
        return EXIT_USAGE

    try:
        return _run(config)
    except (ConvergenceError, DivergenceError, RangeError, SamplerError) as exc:
        logger.error("数值计算失败: %s", exc.message)
        sys.stderr.write(f"{exc.error_code}: {exc.message}\n")
        return EXIT_NUMERIC
    except GmlError as exc:
        sys.stderr.write(f"{exc.error_code}: {exc.message}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
