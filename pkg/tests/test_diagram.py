"""Tests for diagram codes and SVG rendering.

These tests verify:
- Edge-label accounting of PD codes and open ends
- Gauss sequences
- Text exports
- Deterministic SVG output, including the empty diagram
- Rejection of malformed projections
"""

from collections import Counter
from fractions import Fraction

import pytest

from polytangle.services.diagram import (
    arc_end_count,
    crossings_on,
    diagram_from_theta,
    encode_diagram,
    gauss_text,
    pd_text,
    render_svg,
)
from polytangle.services.geometry import project
from polytangle.services.tangle import build_theta, select_subtangle
from polytangle.utils.models import Crossing, CrossingEnd, DiagramProjection, Polyline3, ProjectedArc

F = Fraction


@pytest.fixture(scope="module")
def two_component():
    return diagram_from_theta(build_theta(2))


def single_crossing() -> DiagramProjection:
    over = Polyline3(component=1, vertices=[(0, 1, 0), (2, 1, 2)])
    under = Polyline3(component=2, vertices=[(2, -1, 0), (0, -1, 2)])
    return project([over, under])


class TestCodes:
    """Test PD codes, open ends and Gauss sequences."""

    def test_single_crossing(self):
        """Test labels around one crossing of two arcs."""
        code = encode_diagram(single_crossing())
        assert [(end.start_label, end.end_label) for end in code.open_ends] == [(1, 2), (3, 4)]
        assert code.gauss == [[1], [-1]]
        assert sorted(code.crossings[0].ends) == [1, 2, 3, 4]
        assert code.crossings[0].ends[0] == 3

    def test_every_label_used_twice(self, two_component):
        """Test that each edge label has exactly two ends among crossings and open ends."""
        _, code = two_component
        counts = Counter(label for crossing in code.crossings for label in crossing.ends)
        for end in code.open_ends:
            counts[end.start_label] += 1
            counts[end.end_label] += 1
        assert set(counts.values()) == {2}
        assert arc_end_count(code) == 4 * len(code.crossings)

    def test_gauss_lengths(self, two_component):
        """Test that every crossing appears once over and once under."""
        projection, code = two_component
        entries = [entry for sequence in code.gauss for entry in sequence]
        assert len(entries) == 2 * len(projection.crossings)
        assert sorted(abs(entry) for entry in entries if entry > 0) == list(range(1, 34))
        assert sorted(-entry for entry in entries if entry < 0) == list(range(1, 34))

    def test_crossing_free_arc(self):
        """Test that an arc without crossings keeps a single label at both ends."""
        arc = ProjectedArc(component=1, points=[(0, 0), (0, 1)])
        code = encode_diagram(DiagramProjection(arcs=[arc]))
        assert code.crossings == []
        assert [(end.start_label, end.end_label) for end in code.open_ends] == [(1, 1)]
        assert code.gauss == [[]]

    def test_subtangle_labels(self):
        """Test that a lone component passes each of its 12 crossings twice."""
        _, code = diagram_from_theta(select_subtangle(build_theta(2), [2]))
        assert [(end.start_label, end.end_label) for end in code.open_ends] == [(1, 25)]
        assert len(code.gauss[0]) == 24

    def test_crossings_on(self, two_component):
        """Test that each component of n=2 touches the letter and its own templates."""
        projection, _ = two_component
        assert len(crossings_on(projection, 1)) == 21
        assert len(crossings_on(projection, 2)) == 21


class TestMalformed:
    """Test rejection of broken projections."""

    def arc(self, component):
        return ProjectedArc(component=component, points=[(0, 0), (1, 1)])

    def crossing(self, over=1, under=2, segment=0, parameter=F(1, 2), crossing_id=1):
        return Crossing(id=crossing_id, over=CrossingEnd(component=over, segment=segment, parameter=parameter),
                        under=CrossingEnd(component=under, segment=0, parameter=F(1, 2)),
                        x=0, z=0, sign=1)

    def test_missing_component(self):
        """Test a crossing that names an absent arc."""
        projection = DiagramProjection(arcs=[self.arc(1)], crossings=[self.crossing()])
        with pytest.raises(ValueError):
            encode_diagram(projection)

    def test_segment_out_of_range(self):
        """Test a crossing past the last segment."""
        projection = DiagramProjection(arcs=[self.arc(1), self.arc(2)], crossings=[self.crossing(segment=1)])
        with pytest.raises(ValueError):
            encode_diagram(projection)

    def test_crossing_on_vertex(self):
        """Test a crossing at a segment endpoint."""
        projection = DiagramProjection(arcs=[self.arc(1), self.arc(2)], crossings=[self.crossing(parameter=F(0))])
        with pytest.raises(ValueError):
            encode_diagram(projection)

    def test_repeated_ids(self):
        """Test duplicate crossing ids."""
        projection = DiagramProjection(arcs=[self.arc(1), self.arc(2)],
                                       crossings=[self.crossing(), self.crossing()])
        with pytest.raises(ValueError):
            encode_diagram(projection)

    def test_repeated_component(self):
        """Test an arc listed twice."""
        with pytest.raises(ValueError):
            encode_diagram(DiagramProjection(arcs=[self.arc(1), self.arc(1)]))


class TestText:
    """Test text exports."""

    def test_pd_text(self):
        """Test X and P lines."""
        text = pd_text(encode_diagram(single_crossing()))
        lines = text.splitlines()
        assert lines[0].startswith("X[")
        assert lines[1:] == ["P[1,2]", "P[3,4]"]

    def test_gauss_text(self):
        """Test one line per component."""
        assert gauss_text(encode_diagram(single_crossing())) == "1\n-1\n"

    def test_empty(self):
        """Test that an empty diagram exports empty text."""
        code = encode_diagram(DiagramProjection())
        assert pd_text(code) == ""
        assert gauss_text(code) == ""


class TestSvg:
    """Test SVG rendering."""

    def test_deterministic(self, two_component):
        """Test that rendering twice gives identical documents."""
        projection, _ = two_component
        assert render_svg(projection) == render_svg(projection)

    def test_document(self, two_component):
        """Test the SVG header, groups and description."""
        projection, _ = two_component
        svg = render_svg(projection, title="theta n=2")
        assert svg.startswith("<?xml")
        assert "<title>theta n=2</title>" in svg
        assert "2 strands, 33 crossings" in svg
        assert 'id="component-1"' in svg and 'id="component-2"' in svg

    def test_under_strands_are_broken(self):
        """Test that the under-arc is drawn in two pieces and the over-arc in one."""
        svg = render_svg(single_crossing())
        over, under = svg.split('id="component-2"')
        assert over.count("<path") == 1
        assert under.count("<path") == 2

    def test_scale(self):
        """Test that the canvas grows with the scale."""
        svg = render_svg(single_crossing(), scale=10)
        assert 'width="40.000"' in svg

    def test_empty_diagram(self):
        """Test that an empty diagram renders an empty canvas."""
        svg = render_svg(DiagramProjection())
        assert "0 strands, 0 crossings" in svg
        assert "<path" not in svg

    def test_title_is_escaped(self):
        """Test that titles are XML-escaped."""
        svg = render_svg(DiagramProjection(), title="a < b")
        assert "a &lt; b" in svg


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
