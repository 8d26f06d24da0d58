"""
报告输出模块
CSV 序列与 SVG 折线图的原子写出
"""

import io
import logging
from typing import Dict, Optional, Sequence

import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

from cmdp_layer import atomic_write_text
from config.settings import CHART_DPI, CHART_FIGSIZE, CSV_FLOAT_FORMAT
from utils.exceptions import ValidationError

logger = logging.getLogger(__name__)

SVG_HASH_SALT = 'reload-bench'


def frame_to_csv_text(frame: pd.DataFrame) -> str:
    """17 位有效数字，保证解析后逐位还原"""
    return frame.to_csv(index=False, float_format=CSV_FLOAT_FORMAT, lineterminator='\n')


def write_csv(frame: pd.DataFrame, path: str) -> str:
    """
    原子写出 CSV

    Args:
        frame: 数据表
        path: 目标路径

    Returns:
        写出的路径
    """
    atomic_write_text(path, frame_to_csv_text(frame))
    logger.debug(f"写出 CSV: {path} ({len(frame)} 行)")
    return path


def read_series_csv(path: str) -> pd.DataFrame:
    return pd.read_csv(path, float_precision='round_trip')


def render_line_chart(series: Dict[str, Sequence[float]], x: Optional[Sequence[float]] = None,
                      title: str = '', xlabel: str = 'iteration', ylabel: str = '',
                      log_scale: bool = False) -> str:
    """
    把若干序列画成一张 SVG 折线图

    Args:
        series: 图例名称 -> 序列
        x: 横轴，默认 0..n-1
        title: 标题
        xlabel: 横轴标签
        ylabel: 纵轴标签
        log_scale: 纵轴是否取对数（非正值会被丢弃）

    Returns:
        SVG 文本
    """
    if not series:
        raise ValidationError("至少需要一条序列")

    with plt.rc_context({'svg.hashsalt': SVG_HASH_SALT, 'svg.fonttype': 'none'}):
        fig, ax = plt.subplots(figsize=CHART_FIGSIZE)
        try:
            for label, values in series.items():
                y = np.asarray(values, dtype=float)
                xs = np.arange(len(y)) if x is None else np.asarray(x, dtype=float)[:len(y)]
                if log_scale:
                    y = np.where(y > 0, y, np.nan)
                ax.plot(xs, y, label=label, linewidth=1.2)
            if log_scale:
                ax.set_yscale('log')
            ax.set_title(title)
            ax.set_xlabel(xlabel)
            ax.set_ylabel(ylabel)
            ax.grid(True, alpha=0.3)
            ax.legend(loc='best')

            buffer = io.StringIO()
            fig.savefig(buffer, format='svg', dpi=CHART_DPI, metadata={'Date': None})
        finally:
            plt.close(fig)
    return buffer.getvalue()


def write_svg_chart(path: str, series: Dict[str, Sequence[float]], **kwargs) -> str:
    """渲染并原子写出 SVG 图"""
    atomic_write_text(path, render_line_chart(series, **kwargs))
    logger.debug(f"写出图表: {path}")
    return path
