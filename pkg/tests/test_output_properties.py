"""
Property-based tests for output writers.

Property 25: 数值格式
Property 26: 输出文件结构
"""

import json
import math
import os
import tempfile

import numpy as np
from hypothesis import given, strategies as st, settings

from intermediate_lines.curves import circle
from intermediate_lines.models import (
    CuspMarker,
    EnvelopeBranch,
    EnvelopePoint,
    PairBranch,
    SingularityClass,
    Tag,
)
from intermediate_lines.output import (
    ENVELOPE_COLUMNS,
    PAIR_COLUMNS,
    envelope_report,
    fmt,
    fmt_residual,
    render_svg,
    write_envelope_csv,
    write_json,
    write_pairs_csv,
)

finite = st.floats(min_value=-1e12, max_value=1e12, allow_nan=False, allow_infinity=False)


def _temp_path(suffix: str) -> str:
    with tempfile.NamedTemporaryFile(suffix=suffix, delete=False) as f:
        return f.name


def _iptl_branch() -> EnvelopeBranch:
    ts = np.linspace(0.0, 2 * np.pi, 16, endpoint=False)
    points = [EnvelopePoint(0.2 * np.array([np.cos(t), np.sin(t)]), (t, t + np.pi), 0.6, Tag.IPTL, 1e-14)
              for t in ts]
    marker = CuspMarker(3, SingularityClass.ORDINARY_CUSP, points[3].X, points[3].source, {"sine23": 0.1})
    return EnvelopeBranch(Tag.IPTL, points, [marker], branch_id=0)


class TestNumberFormat:
    """
    Property 25: 数值格式

    Values carry 12 significant digits, residuals scientific notation.
    """

    @settings(max_examples=100)
    @given(value=finite)
    def test_fmt_round_trips_to_twelve_digits(self, value: float):
        text = fmt(value)
        assert abs(float(text) - value) <= 1e-11 * max(abs(value), 1e-300)

    @settings(max_examples=100)
    @given(value=finite)
    def test_residuals_are_scientific(self, value: float):
        assert "e" in fmt_residual(value)

    def test_nan_and_integers(self):
        assert fmt(float("nan")) == "nan"
        assert fmt(3) == "3"
        assert fmt_residual(float("nan")) == "nan"


class TestOutputFiles:
    """
    Property 26: 输出文件结构

    CSV headers, versioned JSON with non-finite numbers as strings, and SVG
    groups per envelope component.
    """

    def test_envelope_csv(self):
        path = _temp_path(".csv")
        try:
            write_envelope_csv(path, [_iptl_branch()])
            with open(path, encoding="utf-8") as f:
                lines = f.read().splitlines()
            assert lines[0] == ",".join(ENVELOPE_COLUMNS)
            assert len(lines) == 17
            assert lines[1].startswith("IPTL,0,0,")
            assert lines[1].endswith(",nan")
        finally:
            os.unlink(path)

    def test_pairs_csv(self):
        branch = PairBranch("parallel", np.array([[0.0, np.pi], [0.5, 0.5 + np.pi]]), False,
                            np.array([0.0, 1e-15]))
        path = _temp_path(".csv")
        try:
            write_pairs_csv(path, [branch, PairBranch("transversal", np.array([[0.1, 0.2]]), False)])
            with open(path, encoding="utf-8") as f:
                lines = f.read().splitlines()
            assert lines[0] == ",".join(PAIR_COLUMNS)
            assert lines[1] == "0,parallel,0,3.14159265359,0.00000000000e+00"
            assert lines[3].startswith("1,transversal,")
            assert lines[3].endswith(",nan")
        finally:
            os.unlink(path)

    def test_json_schema_and_non_finite(self):
        path = _temp_path(".json")
        try:
            write_json(path, {"a": float("nan"), "b": [np.float64(1.0) / 3, float("inf")], "c": np.int64(4)})
            with open(path, encoding="utf-8") as f:
                document = json.load(f)
            assert document["schema"] == "1"
            assert document["a"] == "nan"
            assert document["b"] == [0.333333333333, "inf"]
            assert document["c"] == 4
        finally:
            os.unlink(path)

    def test_envelope_report(self):
        report = envelope_report(circle(), 0.6, [_iptl_branch()], math.inf, {"total_gaps": 0})
        assert report["curve"] == "circle"
        summary = report["branches"][0]
        assert summary["points"] == 16
        assert summary["cusps"][0]["klass"] == "OrdinaryCusp"
        assert summary["oracle_distance"] is None
        assert summary["closed"] is False
        assert summary["contacts"] == []

    def test_svg_groups(self):
        ctl = EnvelopeBranch(Tag.CTL, [EnvelopePoint(np.array([1.0, 0.0]), (0.0, 0.0), 0.6, Tag.CTL),
                                       EnvelopePoint(np.array([0.0, 1.0]), (1.0, 1.0), 0.6, Tag.CTL)], branch_id=1)
        svg = render_svg(circle(), [_iptl_branch(), ctl], 0.6)
        assert svg.startswith("<svg")
        assert 'class="IPTL"' in svg
        assert 'class="CTL"' not in svg
        assert svg.count('class="cusp"') == 2
        assert 'stroke="red"' in svg
        assert 'class="CTL"' in render_svg(circle(), [ctl], 0.5)

    def test_svg_splits_at_breaks(self):
        branch = _iptl_branch()
        branch.breaks = [7]
        branch.cusp_markers = []
        svg = render_svg(circle(), [branch], 0.6)
        group = svg[svg.index('class="IPTL"'):]
        assert group.count("<path") == 2

    def test_svg_layers(self):
        svg = render_svg(circle(), [_iptl_branch()], 0.6)
        assert '<g class="AEIL" />' in svg
        assert svg.index('class="AEIL"') < svg.index('class="IPTL"')
        assert 'id="branch-0"' in svg
        assert 'class="EVOLUTE"' not in svg

    def test_svg_closes_closed_branches(self):
        branch = _iptl_branch()
        branch.cusp_markers = []
        assert " Z" not in render_svg(circle(), [branch], 0.6).split('class="IPTL"')[1]
        branch.closed = True
        assert render_svg(circle(), [branch], 0.6).split('class="IPTL"')[1].count(" Z") == 1
