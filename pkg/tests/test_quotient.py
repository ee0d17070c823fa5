"""Tests for solid-torus quotient wirings.

These tests verify:
- Three-group and four-group crossing counts
- Splitting surfaces and their gluing check
- Knot-space insertion into companion tori
"""

import pytest
from pydantic import ValidationError

from polytangle.services.quotient import (
    check_quotient_gluing,
    check_wiring,
    insert_knot_spaces,
    splitting_surfaces,
    wire_solid_torus,
)
from polytangle.utils.models import QuotientComponent


class TestWiring:
    """Test the two wiring schemes."""

    @pytest.mark.parametrize("nu", [1, 2, 5])
    def test_three_group(self, nu):
        """Test that every rho_j meets the meridian twice and uses one arc of each group."""
        tangle = wire_solid_torus("three-group", nu)
        assert len(tangle.arcs) == 3 * nu
        assert not tangle.tori
        for component in tangle.components:
            j = component.index
            assert component.meridian_crossings == 2
            assert sorted(component.arcs) == sorted([f"beta_{j}", f"gamma_{j}", f"delta_{j}"])

    def test_three_group_arc_order(self):
        """Test that rho_1 runs beta, delta, gamma."""
        tangle = wire_solid_torus("three-group", 1)
        assert tangle.components[0].arcs == ["beta_1", "delta_1", "gamma_1"]

    @pytest.mark.parametrize("nu", [1, 3])
    def test_four_group(self, nu):
        """Test three meridian crossings and two crossings with D_j only."""
        tangle = wire_solid_torus("four-group", nu)
        assert len(tangle.tori) == nu
        for component in tangle.components:
            assert component.meridian_crossings == 3
            assert component.disk_crossings == [2 if i == component.index else 0 for i in range(1, nu + 1)]

    def test_four_group_arc_order(self):
        """Test that rho_1 runs beta, gamma, delta, omega."""
        tangle = wire_solid_torus("four-group", 1)
        assert tangle.components[0].arcs == ["beta_1", "gamma_1", "delta_1", "omega_1"]

    def test_invalid_arguments(self):
        """Test that nu < 1 and unknown schemes raise."""
        with pytest.raises(ValueError):
            wire_solid_torus("three-group", 0)
        with pytest.raises(ValueError):
            wire_solid_torus("five-group", 1)

    def test_check_wiring_detects_bad_count(self):
        """Test that a tampered crossing count is reported."""
        tangle = wire_solid_torus("four-group", 2)
        bad = QuotientComponent(index=1, arcs=tangle.components[0].arcs, meridian_crossings=3,
                                disk_crossings=[2, 1])
        tampered = tangle.model_copy(update={"components": [bad, tangle.components[1]]})
        valid, message = check_wiring(tampered)
        assert not valid
        assert "D_2" in message

    def test_arc_count_must_match_scheme(self):
        """Test that the model rejects a wiring with missing arcs."""
        tangle = wire_solid_torus("three-group", 2)
        with pytest.raises(ValidationError):
            type(tangle)(scheme="three-group", nu=2, arcs=tangle.arcs[:3],
                         identifications=tangle.identifications, components=tangle.components)


class TestSplitting:
    """Test splitting surfaces of subsets."""

    def test_three_group_surface(self):
        """Test a meridian disk with 2k holes."""
        surfaces = splitting_surfaces(wire_solid_torus("three-group", 4), [1, 3])
        assert len(surfaces) == 1
        assert surfaces[0].boundary_circles == 5
        assert surfaces[0].euler_characteristic() == -3

    def test_four_group_surfaces(self):
        """Test one twice-holed disk per chosen arc plus the holed meridian."""
        surfaces = splitting_surfaces(wire_solid_torus("four-group", 3), [2])
        assert [s.boundary_circles for s in surfaces] == [3, 3]

    @pytest.mark.parametrize("scheme", ["three-group", "four-group"])
    def test_gluing_passes(self, scheme):
        """Test that every non-empty subset splits along negative surfaces."""
        tangle = wire_solid_torus(scheme, 3)
        for subset in ([1], [2, 3], [1, 2, 3]):
            assert check_quotient_gluing(tangle, subset).verdict == "pass"

    @pytest.mark.parametrize("subset", [[], [0], [4]])
    def test_bad_subset(self, subset):
        """Test that empty or out-of-range subsets raise."""
        with pytest.raises(ValueError):
            splitting_surfaces(wire_solid_torus("three-group", 3), subset)


class TestKnotSpaces:
    """Test labeling companion tori."""

    def test_insert(self):
        """Test that each torus gets its label and becomes a ball slot."""
        tangle = insert_knot_spaces(wire_solid_torus("four-group", 2), ["5_2", "7_2"])
        assert [torus.label for torus in tangle.tori] == ["5_2", "7_2"]
        assert all(torus.ball_slot for torus in tangle.tori)

    def test_three_group_has_no_tori(self):
        """Test that three-group wirings refuse labels."""
        with pytest.raises(ValueError):
            insert_knot_spaces(wire_solid_torus("three-group", 1), ["5_2"])

    def test_label_count(self):
        """Test that the label count must match the torus count."""
        with pytest.raises(ValueError):
            insert_knot_spaces(wire_solid_torus("four-group", 2), ["5_2"])


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
