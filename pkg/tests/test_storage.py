"""Tests for versioned JSON documents.

These tests verify:
- Documents of tangles, certificates and projections load back equal
- Seeded random instances of every public document type load back equal
- Header checks (schema, version, kind)
- Dotted field paths in payload errors
- File helpers
"""

import json
import random

import pytest

from polytangle.services.diagram import diagram_from_theta
from polytangle.services.engulf import engulf_verify, occupancy_trace, validate_certificate
from polytangle.services.exhaustion import carve_rays, check_nice
from polytangle.services.generators import (
    random_exhaustion,
    random_forest,
    random_group_word,
    random_labeling,
    random_patch_tree,
    random_subset,
    random_trace,
)
from polytangle.services.geometry import project, realize
from polytangle.services.isotopy import monotonize_plane_trace, normalize_position, schedule_removal
from polytangle.services.labeling import homeomorphism_obstruction
from polytangle.services.patch_tree import monotonize_patch_tree
from polytangle.services.quotient import wire_solid_torus
from polytangle.services.tangle import build_theta, select_subtangle
from polytangle.utils.exceptions import SchemaError
from polytangle.utils.models import ExcellenceCertificate, SurfaceDescriptor, ThetaComplex
from polytangle.utils.storage import REGISTRY, dump_document, load_document, read_document, write_document


def rewrite(text: str, **changes) -> str:
    document = json.loads(text)
    document.update(changes)
    return json.dumps(document)



def random_documents(seed: int) -> list:
    """One seeded instance of each public document type."""
    rng = random.Random(seed)
    n = rng.randint(2, 4)
    theta = build_theta(n)
    subset = random_subset(rng, n)
    subtangle = select_subtangle(theta, subset)
    forest, ladder = random_forest(rng, curves=rng.randint(1, 25))
    trace = random_trace(rng)
    tree = random_patch_tree(rng)
    exhaustion = random_exhaustion(rng)
    labeling = random_labeling(rng)
    other = random_labeling(rng, mu=labeling.mu, nu=list(labeling.nu))
    projection, code = diagram_from_theta(subtangle)
    return [
        random_group_word(rng, n, rng.randint(1, 8)),
        theta,
        subtangle,
        occupancy_trace(theta, subset),
        engulf_verify(theta, subset),
        wire_solid_torus(rng.choice(["three-group", "four-group"]), rng.randint(1, 4)),
        forest,
        ladder,
        schedule_removal(forest, ladder),
        normalize_position(forest, ladder),
        trace,
        monotonize_plane_trace(trace),
        tree,
        monotonize_patch_tree(tree),
        exhaustion,
        check_nice(exhaustion),
        carve_rays(exhaustion, [rng.randint(1, 3) for _ in range(exhaustion.end_count)]),
        labeling,
        homeomorphism_obstruction(labeling, other),
        projection,
        code,
    ]


class TestDocuments:
    """Test dumping and loading models."""

    def test_header(self):
        """Test the schema, version and kind fields."""
        document = json.loads(dump_document(build_theta(2)))
        assert document["schema"] == "polytangle"
        assert document["version"] == 1
        assert document["kind"] == "ThetaComplex"

    def test_theta(self):
        """Test that theta for n=3 loads back equal."""
        theta = build_theta(3)
        loaded = load_document(dump_document(theta), "ThetaComplex")
        assert isinstance(loaded, ThetaComplex)
        assert loaded == theta

    def test_certificate_still_validates(self):
        """Test that a stored certificate re-validates after loading."""
        certificate = engulf_verify(build_theta(3), [2])
        loaded = load_document(dump_document(certificate))
        assert isinstance(loaded, ExcellenceCertificate)
        assert validate_certificate(loaded) == (True, "")

    def test_rationals_are_strings(self):
        """Test that projection coordinates are written as exact fractions."""
        projection = project(realize(build_theta(2)))
        text = dump_document(projection)
        payload = json.loads(text)["payload"]
        assert all(isinstance(value, str) for value in payload["arcs"][0]["points"][0])
        assert load_document(text) == projection

    def test_registry(self):
        """Test that every public model kind is registered."""
        for kind in ("ThetaComplex", "NestingForest", "PatchTree", "ExhaustionDescriptor",
                     "BinaryLabeling", "DiagramCode", "PushSchedule"):
            assert kind in REGISTRY


class TestRandomDocuments:
    """Test round trips of seeded random instances."""

    @pytest.mark.parametrize("seed", range(25))
    def test_load_back_equal(self, seed):
        """Test that every instance loads back as an equal model of the same kind."""
        for model in random_documents(seed):
            kind = type(model).__name__
            loaded = load_document(dump_document(model), kind)
            assert type(loaded) is type(model), kind
            assert loaded == model, kind


class TestSchemaErrors:
    """Test rejection of malformed documents."""

    def test_not_json(self):
        """Test that broken JSON is a schema error."""
        with pytest.raises(SchemaError):
            load_document("{not json")

    def test_wrong_schema(self):
        """Test a foreign schema name."""
        text = rewrite(dump_document(build_theta(2)), schema="other")
        with pytest.raises(SchemaError) as info:
            load_document(text)
        assert info.value.path == "schema"

    def test_wrong_version(self):
        """Test a future version."""
        text = rewrite(dump_document(build_theta(2)), version=2)
        with pytest.raises(SchemaError) as info:
            load_document(text)
        assert info.value.path == "version"

    def test_unknown_kind(self):
        """Test a kind the registry does not know."""
        text = rewrite(dump_document(build_theta(2)), kind="Spaceship")
        with pytest.raises(SchemaError) as info:
            load_document(text)
        assert info.value.path == "kind"

    def test_unexpected_kind(self):
        """Test a valid document of the wrong kind."""
        with pytest.raises(SchemaError):
            load_document(dump_document(build_theta(2)), "NestingForest")

    def test_corrupt_field_path(self):
        """Test that a bad field is reported with its dotted path."""
        document = json.loads(dump_document(build_theta(2)))
        document["payload"]["components"][1]["start"]["q"] = -4
        with pytest.raises(SchemaError) as info:
            load_document(json.dumps(document))
        assert info.value.path == "payload.components.1.start.q"

    def test_invariant_violation(self):
        """Test that a payload breaking a model invariant is rejected."""
        document = json.loads(dump_document(build_theta(2)))
        document["payload"]["m"] = 2
        with pytest.raises(SchemaError):
            load_document(json.dumps(document))

    def test_missing_payload(self):
        """Test a header without payload."""
        text = json.dumps({"schema": "polytangle", "version": 1, "kind": "ThetaComplex"})
        with pytest.raises(SchemaError) as info:
            load_document(text)
        assert info.value.path == "payload"


class TestFiles:
    """Test file helpers."""

    def test_write_and_read(self, tmp_path):
        """Test that written documents read back, creating parent directories."""
        surface = SurfaceDescriptor(orientable=False, genus_or_crosscaps=3, end=2)
        target = write_document(surface, tmp_path / "nested" / "surface.json")
        assert target.exists()
        assert read_document(target, "SurfaceDescriptor") == surface

    def test_missing_file(self, tmp_path):
        """Test that unreadable files are schema errors."""
        with pytest.raises(SchemaError):
            read_document(tmp_path / "absent.json")


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
