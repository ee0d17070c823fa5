"""Tests for the engulfing verifier and its certificates.

These tests verify:
- Step classification and the transition rules of the occupancy trace
- Cell geometry helpers (disks, interfaces) and the gluing check
- Certificates for every subset of small tangles and their validation
- Rejection of tampered certificates
"""

from itertools import combinations

import pytest

from polytangle.services.engulf import (
    check_gluing,
    check_transition_rules,
    classify_step,
    engulf_verify,
    face_components,
    interface_faces,
    intervals,
    is_disk,
    occupancy_trace,
    region_intervals,
    validate_certificate,
)
from polytangle.services.tangle import build_theta
from polytangle.utils.exceptions import CaseMismatch, VerificationError
from polytangle.utils.models import InterfaceComponent


class TestClassification:
    """Test the four step cases."""

    def test_intervals(self):
        """Test splitting columns into runs."""
        assert intervals([4, 1, 2]) == [[1, 2], [4]]
        assert intervals([]) == []

    @pytest.mark.parametrize("occupied,t,case,subcase", [
        ({1, 2}, 1, 1, None),
        ({3}, 1, 2, None),
        ({1}, 1, 3, "a"),
        ({1, 3}, 1, 3, "b"),
        ({2}, 1, 4, "a"),
        ({1, 3}, 2, 4, "b"),
    ])
    def test_classify(self, occupied, t, case, subcase):
        """Test the case and subcase of a step."""
        step = classify_step(occupied, t)
        assert step.case == case
        assert step.subcase == subcase

    def test_trace_for_middle_component(self):
        """Test the occupancy trace of J0={2} for n=3."""
        trace = occupancy_trace(build_theta(3), [2])
        assert trace.J == [[2], [1], [1], [2]]
        assert trace.I == [[1, 2], [1], [1, 2]]
        assert trace.T == [[2], [1, 2], [1, 2], [1, 2]]
        assert region_intervals(trace, 0) == [[2]]
        assert region_intervals(trace, 3) == [[1, 2]]

    def test_transition_rules_detect_tampering(self):
        """Test that a trace with a wrong J_{i+1} breaks its rule."""
        trace = occupancy_trace(build_theta(3), [2])
        tampered = trace.model_copy(update={"J": [[2], [2], [1], [2]]})
        valid, message = check_transition_rules(tampered)
        assert not valid
        assert "step 0" in message

    @pytest.mark.parametrize("n", range(2, 9))
    def test_rules_hold_for_all_subsets(self, n):
        """Test that every subset's trace satisfies the transition rules."""
        theta = build_theta(n)
        for size in range(1, n + 1):
            for subset in combinations(range(1, n + 1), size):
                assert check_transition_rules(occupancy_trace(theta, subset))[0]


class TestCellGeometry:
    """Test disk recognition and interfaces."""

    def test_single_cell_is_disk(self):
        """Test that one cell is a disk."""
        assert is_disk({(0, 0)})

    def test_diagonal_cells_are_not_a_disk(self):
        """Test that two cells meeting at a corner are rejected."""
        assert not is_disk({(0, 0), (1, 1)})

    def test_ring_is_not_a_disk(self):
        """Test that a ring of eight cells is rejected."""
        ring = {(layer, slot) for layer in range(3) for slot in range(3)} - {(1, 1)}
        assert not is_disk(ring)

    def test_empty_is_not_a_disk(self):
        """Test that the empty set is rejected."""
        assert not is_disk(set())

    def test_interface_between_stacked_cells(self):
        """Test that two stacked cells share one horizontal face."""
        faces = interface_faces({(0, 0)}, {(1, 0)})
        assert faces == [("h", 1, 0)]
        assert face_components(faces) == [([("h", 1, 0)], True)]

    def test_disjoint_interfaces(self):
        """Test that separated faces form separate path components."""
        faces = interface_faces({(0, 0), (0, 2)}, {(1, 0), (1, 2)})
        components = face_components(faces)
        assert len(components) == 2
        assert all(is_path for _, is_path in components)


class TestGluingCheck:
    """Test the negative Euler characteristic check."""

    def test_empty_surface_fails(self):
        """Test that an empty gluing surface fails."""
        assert check_gluing([]).verdict == "fail"

    def test_disk_needs_two_punctures(self):
        """Test that a once-punctured disk fails and a twice-punctured one passes."""
        assert check_gluing([InterfaceComponent(puncture_count=1)]).verdict == "fail"
        assert check_gluing([InterfaceComponent(puncture_count=2)]).verdict == "pass"

    def test_other_components(self):
        """Test that non-disk components need a declared negative Euler characteristic."""
        undeclared = InterfaceComponent(puncture_count=0, is_disk_portion=False)
        negative = InterfaceComponent(puncture_count=0, is_disk_portion=False, euler_characteristic=-2)
        assert check_gluing([undeclared]).verdict == "fail"
        assert check_gluing([negative]).verdict == "pass"
        assert negative.chi == -2


class TestCertificates:
    """Test certificate construction and validation."""

    @pytest.mark.parametrize("n", range(2, 7))
    def test_all_subsets_validate(self, n):
        """Test that every non-empty subset gets a certificate that re-validates."""
        theta = build_theta(n)
        for size in range(1, n + 1):
            for subset in combinations(range(1, n + 1), size):
                certificate = engulf_verify(theta, subset)
                valid, message = validate_certificate(certificate)
                assert valid, f"J0={subset}: {message}"
                for node in certificate.nodes:
                    if node.kind == "glue":
                        assert all(c.puncture_count >= 2 for c in node.check.interfaces)

    @pytest.mark.parametrize("n,subset", [
        (5, [3, 5]),
        (6, [3, 5]),
        (6, [4, 6]),
        (6, [3, 4, 6]),
        (6, [3, 5, 6]),
    ])
    def test_component_enters_column_of_other_group(self, n, subset):
        """Test a component moving into a column an unlinked group left earlier.

        For n=5, J0={3,5} the component from column 4 enters column 3 at
        step 6 while the other component sits in column 1; the leaf must not
        be glued to the other group's region across the empty brick.
        """
        certificate = engulf_verify(build_theta(n), subset)
        valid, message = validate_certificate(certificate)
        assert valid, message
        assert any("unlinked" in note for note in certificate.notes)

    def test_leaf_width_of_two_components(self):
        """Test that the leaves of n=2, J0={1,2} span both columns."""
        certificate = engulf_verify(build_theta(2), [1, 2])
        leaves = [node for node in certificate.nodes if node.kind == "leaf"]
        assert [leaf.level for leaf in leaves] == list(range(len(certificate.steps) + 1))
        assert all(leaf.column_width == 2 for leaf in leaves)
        assert all((leaf.first_column, leaf.last_column) == (1, 2) for leaf in leaves)
        assert all(leaf.width == 2 * leaf.arcs_per_column for leaf in leaves)

    def test_tampered_column_width(self):
        """Test that a leaf whose column width disagrees with its columns is rejected."""
        certificate = engulf_verify(build_theta(2), [1, 2])
        leaf = certificate.nodes[0]
        nodes = [leaf.model_copy(update={"column_width": 1})] + certificate.nodes[1:]
        valid, message = validate_certificate(certificate.model_copy(update={"nodes": nodes}))
        assert not valid
        assert "leaf width" in message

    def test_untouched_column_pass(self):
        """Test that J0={2} for n=3 never enters column 3 and says so."""
        certificate = engulf_verify(build_theta(3), [2])
        assert certificate.untouched_columns == [3]
        assert any("final pass" in note for note in certificate.notes)
        assert any(node.kind == "ball" and node.final_pass for node in certificate.nodes)

    def test_full_tangle_touches_every_column(self):
        """Test that the whole tangle leaves no column untouched."""
        certificate = engulf_verify(build_theta(4), [1, 2, 3, 4])
        assert certificate.untouched_columns == []

    def test_step_count(self):
        """Test one step record per braid layer."""
        certificate = engulf_verify(build_theta(4), [1, 3])
        assert len(certificate.steps) == 6
        assert [step.t for step in certificate.steps] == list(build_theta(4).braids.letters)

    def test_empty_subset_raises(self):
        """Test that J0 must be non-empty."""
        with pytest.raises(ValueError):
            engulf_verify(build_theta(3), [])

    def test_tampered_untouched_columns(self):
        """Test that a wrong untouched-column record is rejected."""
        certificate = engulf_verify(build_theta(3), [2])
        valid, message = validate_certificate(certificate.model_copy(update={"untouched_columns": []}))
        assert not valid
        assert "untouched" in message

    def test_tampered_step(self):
        """Test that a misclassified step is rejected."""
        certificate = engulf_verify(build_theta(3), [1, 2])
        step = certificate.steps[0]
        wrong = step.model_copy(update={"case": 2 if step.case != 2 else 1})
        valid, message = validate_certificate(
            certificate.model_copy(update={"steps": [wrong] + certificate.steps[1:]}))
        assert not valid
        assert "step 0" in message

    def test_truncated_certificate(self):
        """Test that dropping the last node leaves a root that does not exist."""
        certificate = engulf_verify(build_theta(3), [1, 3])
        valid, _ = validate_certificate(certificate.model_copy(update={"nodes": certificate.nodes[:-1]}))
        assert not valid

    def test_case_mismatch_is_a_verification_error(self):
        """Test the error hierarchy used by the CLI exit codes."""
        assert issubclass(CaseMismatch, VerificationError)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
