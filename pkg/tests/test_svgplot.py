import numpy as np
import pytest

from nqlab import svgplot


def two_series():
    x = np.linspace(0.0, 10.0, 30)
    return [("rise", x, x ** 2), ("fall", x, 100.0 - x ** 2)]


class TestLinePlot:
    def test_wellformed_document(self):
        text = svgplot.line_plot(two_series(), "t_us", "signal",
                                 title="sweep")
        assert text.startswith("<svg")
        assert text.rstrip().endswith("</svg>")
        assert text.count("<polyline") == 2
        assert "t_us" in text and "signal" in text and "sweep" in text

    def test_byte_deterministic(self):
        a = svgplot.line_plot(two_series(), "x", "y")
        b = svgplot.line_plot(two_series(), "x", "y")
        assert a == b

    def test_distinct_series_colors(self):
        text = svgplot.line_plot(two_series(), "x", "y")
        assert "#1f6fb4" in text and "#d95f02" in text

    def test_labels_escaped(self):
        x = [0.0, 1.0]
        text = svgplot.line_plot([("a<b", x, x)], "R & A", "y")
        assert "a&lt;b" in text
        assert "R &amp; A" in text
        assert "a<b" not in text

    def test_constant_series_padded_not_degenerate(self):
        x = [0.0, 1.0, 2.0]
        text = svgplot.line_plot([("flat", x, [5.0, 5.0, 5.0])], "x", "y")
        assert "nan" not in text and "inf" not in text

    @pytest.mark.parametrize("series", [
        [],
        [("a", [0.0], [1.0])],
        [("a", [0.0, 1.0], [1.0])],
    ])
    def test_rejects_degenerate_input(self, series):
        with pytest.raises(ValueError):
            svgplot.line_plot(series, "x", "y")

    def test_write_svg_round_trip(self, tmp_path):
        text = svgplot.line_plot(two_series(), "x", "y")
        path = tmp_path / "plot.svg"
        svgplot.write_svg(path, text)
        assert path.read_text() == text


class TestTicks:
    def test_cover_the_interval(self):
        ticks = svgplot._nice_ticks(0.0, 10.0)
        assert ticks[0] >= 0.0 and ticks[-1] <= 10.0 + 1e-9
        assert len(ticks) >= 3

    def test_round_step_sizes(self):
        ticks = svgplot._nice_ticks(0.0, 0.87)
        steps = np.diff(ticks)
        assert np.allclose(steps, steps[0])
        lead = float(f"{steps[0]:e}".split("e")[0])
        assert lead in (1.0, 2.0, 2.5, 5.0)