"""
CSV 与 SVG 输出测试
"""

import numpy as np
import pandas as pd
import pytest

from bench_layer import frame_to_csv_text, read_series_csv, render_line_chart, write_csv, write_svg_chart
from utils.exceptions import ValidationError


class TestCsv:

    def test_floats_survive_exactly(self, tmp_path, rng):
        frame = pd.DataFrame({'iter': np.arange(50), 'v0': rng.random(50) / 3.0, 'mu1': rng.standard_normal(50) * 1e-9})
        path = write_csv(frame, str(tmp_path / 'series.csv'))
        pd.testing.assert_frame_equal(read_series_csv(path), frame, check_exact=True)

    def test_header_and_newlines(self):
        text = frame_to_csv_text(pd.DataFrame({'iter': [0, 1], 'v0': [0.5, 0.25]}))
        assert text == 'iter,v0\n0,0.5\n1,0.25\n'

    def test_nested_directory_created(self, tmp_path):
        path = tmp_path / 'a' / 'b' / 'out.csv'
        write_csv(pd.DataFrame({'x': [1.0]}), str(path))
        assert path.read_text(encoding='utf-8') == 'x\n1\n'
        assert [p.name for p in path.parent.iterdir()] == ['out.csv']


class TestSvg:

    def test_deterministic(self):
        series = {'ogda': 0.99 ** np.arange(100), 'gda': 1.01 ** np.arange(100)}
        first = render_line_chart(series, title='xy', log_scale=True)
        second = render_line_chart(series, title='xy', log_scale=True)
        assert first == second
        assert '<svg' in first

    def test_non_positive_values_on_log_axis(self):
        assert '<svg' in render_line_chart({'d': [1.0, 0.0, 0.1]}, log_scale=True)

    def test_custom_axis(self, tmp_path):
        path = write_svg_chart(str(tmp_path / 'chart.svg'), {'v0': [0.1, 0.2, 0.3]}, x=[0, 10, 20], ylabel='v0')
        with open(path, encoding='utf-8') as handle:
            assert handle.read().startswith('<?xml')

    def test_empty(self):
        with pytest.raises(ValidationError):
            render_line_chart({})
