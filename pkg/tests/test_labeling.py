"""Tests for the twist-knot catalog and the eventual-agreement obstruction.

These tests verify:
- Catalog parameters and their inversion
- Eventual agreement against a brute-force window
- Shape checks and family generation
"""

import random
from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from polytangle.services.generators import random_labeling
from polytangle.services.labeling import (
    build_catalog,
    cantor_pair,
    cantor_unpair,
    catalog_assign,
    catalog_lookup,
    eventual_agreement,
    generate_family,
    homeomorphism_obstruction,
    knot_sequence,
    twist_knot_name,
)
from polytangle.utils.exceptions import ShapeMismatch
from polytangle.utils.models import BinaryLabeling, EventuallyPeriodic, SlotLabel

BRUTE_FORCE_HORIZON = 400


def single_plane(prefix, period) -> BinaryLabeling:
    return BinaryLabeling(mu=1, nu=[1], slots=[
        SlotLabel(i=1, j=1, sequence=EventuallyPeriodic(prefix=prefix, period=period))])


class TestCatalog:
    """Test the twist-knot catalog."""

    def test_first_slot(self):
        """Test that (1, 1, 1) maps to 5_2 and 6_1."""
        assert catalog_assign(1, 1, 1, 0) == 3
        assert catalog_assign(1, 1, 1, 1) == 4
        assert twist_knot_name(3) == "5_2"
        assert twist_knot_name(12) == "twist(12)"

    def test_lookup(self):
        """Test that parameter 7 is slot (1, 1, 2) with bit 0."""
        knot = catalog_lookup(7)
        assert (knot.index.i, knot.index.j, knot.index.n, knot.p) == (1, 1, 2, 0)
        assert knot.name == "9_2"

    def test_excluded_knots(self):
        """Test that the trefoil and the figure eight are never looked up."""
        for parameter in (1, 2):
            with pytest.raises(ValueError):
                catalog_lookup(parameter)

    @pytest.mark.parametrize("args", [(0, 1, 1, 0), (1, 0, 1, 0), (1, 1, 0, 0), (1, 1, 1, 2)])
    def test_invalid_index(self, args):
        """Test that indices start at 1 and bits are 0 or 1."""
        with pytest.raises(ValueError):
            catalog_assign(*args)

    def test_shape_checks(self):
        """Test range checks against mu and nu."""
        with pytest.raises(ValueError):
            catalog_assign(3, 1, 1, 0, mu=2)
        with pytest.raises(ValueError):
            catalog_assign(2, 3, 1, 0, mu=2, nu=[3, 2])

    def test_build_catalog(self):
        """Test that the catalog lists consecutive parameters from 3."""
        catalog = build_catalog(6)
        assert [knot.parameter for knot in catalog.entries] == [3, 4, 5, 6, 7, 8]

    @given(st.integers(min_value=0, max_value=10_000))
    def test_cantor_unpair(self, value):
        """Test that unpairing inverts pairing."""
        assert cantor_pair(*cantor_unpair(value)) == value

    @given(st.integers(1, 20), st.integers(1, 20), st.integers(1, 50), st.sampled_from([0, 1]))
    def test_assignment_is_injective(self, i, j, n, p):
        """Test that every slot and bit gets its own knot."""
        knot = catalog_lookup(catalog_assign(i, j, n, p))
        assert (knot.index.i, knot.index.j, knot.index.n, knot.p) == (i, j, n, p)

    def test_knot_sequence(self):
        """Test knots along a plane follow the bit sequence."""
        labeling = single_plane([1], [0, 1])
        knots = knot_sequence(labeling, 1, 1, 4)
        assert [knot.p for knot in knots] == [1, 0, 1, 0]
        assert [knot.index.n for knot in knots] == [1, 2, 3, 4]


class TestAgreement:
    """Test eventual agreement of bit sequences."""

    def test_agree_after_prefix(self):
        """Test sequences that differ only in their prefixes."""
        result = eventual_agreement(single_plane([1, 0, 1], [0]), single_plane([0], [0]), (1, 1))
        assert not result.infinite_disagreement
        assert result.agrees_from == 4

    def test_identical(self):
        """Test that identical sequences agree from 1."""
        result = eventual_agreement(single_plane([], [1, 0]), single_plane([], [1, 0]), (1, 1))
        assert result.agrees_from == 1

    def test_phase_shift_disagrees_forever(self):
        """Test that shifted periods disagree at every residue."""
        result = eventual_agreement(single_plane([], [0, 1]), single_plane([], [1, 0]), (1, 1))
        assert result.infinite_disagreement
        assert result.witness_residues == [0, 1]
        assert result.modulus == 2

    def test_different_periods(self):
        """Test that periods 2 and 3 are compared over their lcm."""
        result = eventual_agreement(single_plane([], [0, 0]), single_plane([], [0, 0, 1]), (1, 1))
        assert result.modulus == 6
        assert result.witness_residues == [2, 5]

    @pytest.mark.parametrize("seed", range(500))
    def test_against_brute_force(self, seed):
        """Test agreement decisions against a long explicit window."""
        rng = random.Random(seed)
        phi = random_labeling(rng, mu=1, nu=[1])
        psi = random_labeling(rng, mu=1, nu=[1])
        result = eventual_agreement(phi, psi, (1, 1))
        first, second = phi.sequence(1, 1), psi.sequence(1, 1)
        differ = [n for n in range(1, BRUTE_FORCE_HORIZON) if first.value(n) != second.value(n)]
        late = [n for n in differ if n > BRUTE_FORCE_HORIZON // 2]
        assert result.infinite_disagreement == bool(late)
        if not late:
            assert result.agrees_from == (differ[-1] + 1 if differ else 1)

    def test_shape_mismatch(self):
        """Test that labelings of different shapes are not compared."""
        rng = random.Random(3)
        with pytest.raises(ShapeMismatch):
            homeomorphism_obstruction(random_labeling(rng, mu=1, nu=[1]), random_labeling(rng, mu=1, nu=[2]))

    def test_report_lists_obstructed_slots(self):
        """Test that the report names the disagreeing planes."""
        report = homeomorphism_obstruction(single_plane([], [0, 1]), single_plane([], [1, 0]))
        assert report.obstructed
        assert report.slots == [(1, 1)]


class TestFamily:
    """Test generated families."""

    def test_pairwise_obstructed(self):
        """Test that twenty labelings are pairwise obstructed."""
        family = generate_family(20, seed=7)
        assert len(family) == 20
        for first, second in combinations(family, 2):
            report = homeomorphism_obstruction(first, second)
            assert report.obstructed
            assert report.slots == [(1, 1)]

    def test_several_ends(self):
        """Test families on several ends and planes."""
        family = generate_family(5, seed=2, mu=2, nu=[2, 1])
        assert all(member.nu == [2, 1] for member in family)
        for first, second in combinations(family, 2):
            assert homeomorphism_obstruction(first, second).slots == [(1, 1)]

    def test_deterministic(self):
        """Test that a seed fixes the family."""
        assert generate_family(4, seed=11) == generate_family(4, seed=11)

    def test_too_small(self):
        """Test that a family needs two members."""
        with pytest.raises(ValueError):
            generate_family(1, seed=0)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
