import xml.etree.ElementTree as ET

import pytest

from backend.plotting.svg_charts import LineSeries, render_line_chart_svg, split_at_jumps


def test_split_at_jumps():
    segments = split_at_jumps([0, 1, 2, 3, 4], [1.5, 1.5, 1.1, 1.0, 0.9], threshold=0.1)
    assert segments == [[(0.0, 1.5), (1.0, 1.5)], [(2.0, 1.1), (3.0, 1.0), (4.0, 0.9)]]
    assert len(split_at_jumps([0, 1], [0, 5], threshold=None)) == 1


def test_render_is_well_formed_and_deterministic():
    series = [
        LineSeries("solid <a&b>", [0, 1, 2], [0.5, 0.7, 0.9]),
        LineSeries("dashed", [0, 1, 2], [0.6, 0.6, 0.6], style="dashed"),
    ]
    text = render_line_chart_svg("Title & more", "x", "y", series)
    assert text == render_line_chart_svg("Title & more", "x", "y", series)
    root = ET.fromstring(text)
    polylines = root.findall("{http://www.w3.org/2000/svg}polyline")
    assert [p.get("data-series") for p in polylines] == ["solid <a&b>", "dashed"]
    assert polylines[1].get("stroke-dasharray") == "8,6"
    assert polylines[0].get("stroke-dasharray") is None


def test_render_rejects_mismatched_series():
    with pytest.raises(ValueError):
        render_line_chart_svg("t", "x", "y", [LineSeries("bad", [0, 1], [0.5])])
    with pytest.raises(ValueError):
        render_line_chart_svg("t", "x", "y", [])
