"""Tests for the box decomposition, level tangles and the stacked tangle theta.

These tests verify:
- Block ranges and exact extents
- Level tangle shapes for top, middle and bottom levels
- theta endpoints, phi and chain structure
- Adjacency witnesses and the slice incidence pattern
- Subtangle selection
"""

from fractions import Fraction

import pytest
from pydantic import ValidationError

from polytangle.services.tangle import (
    adjacency_witness,
    all_cells,
    block_cells,
    block_extent,
    build_level,
    build_theta,
    cell_block,
    chain_vertices,
    check_theta,
    columns_of_component,
    disk_incidence,
    incidence_table,
    level_count,
    level_segment,
    occupied_columns,
    phi_table,
    select_subtangle,
    validate_block,
)
from polytangle.utils.models import BlockId, LatticePoint


class TestBlocks:
    """Test block ranges, extents and grid cells."""

    def test_level_count(self):
        """Test m = (n^2 - n)/2."""
        assert [level_count(n) for n in (2, 3, 4, 5)] == [1, 3, 6, 10]

    def test_b_layer_extent(self):
        """Test that B_1 column 2 spans x in [9, 19] and z in [2, 3]."""
        extent = block_extent(BlockId(kind="B-layer", level=1, column=2), 3)
        assert extent == ((Fraction(9), Fraction(19)), (Fraction(-1), Fraction(1)), (Fraction(2), Fraction(3)))

    def test_overlap_and_brick_extents(self):
        """Test that overlaps are unit strips and bricks fill the rest of the column."""
        overlap = block_extent(BlockId(kind="K-overlap", level=1, column=1), 2)
        brick = block_extent(BlockId(kind="C-brick", level=1, column=1), 2)
        assert overlap[0] == (Fraction(9), Fraction(10))
        assert overlap[2] == (Fraction(1), Fraction(2))
        assert brick[0] == (Fraction(1), Fraction(9))

    @pytest.mark.parametrize("block", [
        BlockId(kind="B-layer", level=2, column=1),
        BlockId(kind="C-brick", level=1, column=3),
        BlockId(kind="N-overlap", level=0, column=3),
    ])
    def test_out_of_range(self, block):
        """Test that blocks outside the n=2 box are rejected."""
        valid, message = validate_block(block, 2)
        assert not valid
        assert "outside the box" in message
        with pytest.raises(ValueError):
            block_extent(block, 2)

    def test_c_layers_start_at_one(self):
        """Test that C blocks at level 0 do not validate as models."""
        with pytest.raises(ValidationError):
            BlockId(kind="C-layer", level=0, column=1)

    def test_cells_round_trip_through_blocks(self):
        """Test that every cell maps to a block owning exactly that cell."""
        for cell in all_cells(3):
            block = cell_block(*cell)
            assert validate_block(block, 3)[0]
            assert block_cells(block) == [cell]

    def test_layer_cells(self):
        """Test that a layer block covers its two overlaps and its brick."""
        assert block_cells(BlockId(kind="B-layer", level=0, column=2)) == [(0, 2), (0, 3), (0, 4)]
        assert block_cells(BlockId(kind="C-layer", level=1, column=1)) == [(1, 0), (1, 1), (1, 2)]

    def test_cell_count(self):
        """Test (2m + 1)(2n + 1) cells."""
        assert len(all_cells(3)) == 7 * 7


class TestLevels:
    """Test level tangles."""

    def test_top_level(self):
        """Test that Lambda_0 has alpha and gamma in every column."""
        level = build_level(0, 3, 3)
        assert level.kind == "top"
        assert [s.role for s in level.segments if s.column == 2] == ["alpha", "gamma"]

    def test_middle_level(self):
        """Test that a middle level has delta, alpha and gamma."""
        level = build_level(1, 3, 3)
        assert level.kind == "middle"
        assert [s.role for s in level.segments if s.column == 1] == ["delta", "alpha", "gamma"]
        assert len(level.segments) == 9

    def test_bottom_level(self):
        """Test that Lambda_m has delta and alpha, alpha joining c-points."""
        level = build_level(3, 3, 3)
        assert level.kind == "bottom"
        alpha = [s for s in level.segments if s.role == "alpha" and s.column == 3][0]
        assert alpha.start == LatticePoint.at("c", 6, 3)
        assert alpha.end == LatticePoint.at("c", 7, 3)

    def test_segments_stay_in_column(self):
        """Test that every segment joins lattice points of its own column."""
        for level in range(4):
            for segment in build_level(level, 3, 3).segments:
                assert segment.start.column == segment.end.column == segment.column


class TestTheta:
    """Test the stacked tangle."""

    def test_rejects_single_component(self):
        """Test that n < 2 raises."""
        with pytest.raises(ValueError):
            build_theta(1)

    def test_two_component_endpoints(self):
        """Test that theta_1 runs from (2, 0, 0) to (17, 0, 3) for n=2."""
        theta = build_theta(2)
        component = theta.components[0]
        assert component.start.coordinate == (2, 0, 0)
        assert component.end.coordinate == (17, 0, 3)

    @pytest.mark.parametrize("n", range(2, 7))
    def test_endpoints_reverse_columns(self, n):
        """Test that theta_j ends at c_{2m+1, n+1-j}."""
        theta = build_theta(n)
        m = level_count(n)
        for component in theta.components:
            j = component.index
            assert component.start == LatticePoint.at("a", 0, j)
            assert component.end == LatticePoint.at("c", 2 * m + 1, n + 1 - j)
            assert chain_vertices(component)[-1] == component.end

    def test_phi_for_three(self):
        """Test phi for n=3 under Sigma_1 Sigma_2 Sigma_1."""
        assert phi_table(build_theta(3)) == [[1, 2, 3], [2, 1, 3], [3, 1, 2], [3, 2, 1]]

    def test_columns_of_component(self):
        """Test a component's column trajectory."""
        assert columns_of_component(build_theta(3), 1) == [1, 2, 3, 3]

    @pytest.mark.parametrize("n", range(2, 7))
    def test_check_theta(self, n):
        """Test that built tangles pass the structural re-check."""
        valid, message = check_theta(build_theta(n))
        assert valid, message

    def test_check_theta_detects_swapped_components(self):
        """Test that a theta with reordered chains fails the re-check."""
        theta = build_theta(3)
        broken = theta.model_copy(update={"components": [
            theta.components[0].model_copy(update={"index": 1, "links": theta.components[1].links}),
            theta.components[1],
            theta.components[2],
        ]})
        valid, message = check_theta(broken)
        assert not valid
        assert message

    def test_level_segment_lookup(self):
        """Test fetching one segment and a missing one."""
        theta = build_theta(2)
        segment = level_segment(theta, 0, 2, "gamma")
        assert segment.start == LatticePoint.at("b", 1, 2)
        with pytest.raises(KeyError):
            level_segment(theta, 0, 1, "delta")

    def test_chain_lengths(self):
        """Test that each component has 1 + 6m links."""
        theta = build_theta(4)
        assert all(len(c.links) == 1 + 6 * theta.m for c in theta.components)


class TestAdjacencyAndIncidence:
    """Test the combinatorial facts the engulfing argument relies on."""

    @pytest.mark.parametrize("n", range(2, 13))
    def test_every_pair_becomes_adjacent(self, n):
        """Test that every pair j < j' is adjacent at some level."""
        theta = build_theta(n)
        for j in range(1, n + 1):
            for j2 in range(j + 1, n + 1):
                i = adjacency_witness(theta, j, j2)
                assert theta.phi[i][j2 - 1] == theta.phi[i][j - 1] + 1

    def test_adjacency_first_level(self):
        """Test that neighbours are adjacent at level 0."""
        assert adjacency_witness(build_theta(3), 1, 2) == 0

    def test_adjacency_bad_pair(self):
        """Test that j >= j' is rejected."""
        with pytest.raises(ValueError):
            adjacency_witness(build_theta(3), 2, 1)

    @pytest.mark.parametrize("n", range(2, 9))
    def test_incidence_pattern(self, n):
        """Test one point on the outer slices and three on the inner ones."""
        theta = build_theta(n)
        top = 2 * theta.m + 1
        for (j, p), count in incidence_table(theta).items():
            assert count == (1 if p in (0, top) else 3), (j, p)

    def test_disk_incidence_matches_table(self):
        """Test the single-slice count against the table."""
        theta = build_theta(3)
        table = incidence_table(theta)
        assert disk_incidence(theta, 2, 4) == table[(2, 4)] == 3

    def test_disk_incidence_ranges(self):
        """Test that heights and components out of range raise."""
        theta = build_theta(2)
        with pytest.raises(ValueError):
            disk_incidence(theta, 1, 4)
        with pytest.raises(ValueError):
            disk_incidence(theta, 3, 1)


class TestSubtangle:
    """Test subtangle selection."""

    def test_select(self):
        """Test that J0 is sorted and deduplicated."""
        subtangle = select_subtangle(build_theta(3), [3, 1, 3])
        assert subtangle.subset == [1, 3]
        assert [c.index for c in subtangle.components] == [1, 3]

    def test_occupied_columns(self):
        """Test the columns met by J0 at one level."""
        subtangle = select_subtangle(build_theta(3), [1])
        assert occupied_columns(subtangle, 2) == [3]

    @pytest.mark.parametrize("subset", [[], [0], [4], [1, 5]])
    def test_invalid_subsets(self, subset):
        """Test that empty or out-of-range subsets raise."""
        with pytest.raises(ValueError):
            select_subtangle(build_theta(3), subset)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
