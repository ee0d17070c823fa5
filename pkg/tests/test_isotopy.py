"""Tests for push scheduling and plane-trace monotonization.

These tests verify:
- Staged push schedules against the innermost-removal oracle
- Errors for unremovable targets, missing regions and infinite nesting
- Replay checks of tampered schedules
- Monotonization of plane traces
"""

import random

import pytest

from polytangle.services.generators import random_forest, random_trace
from polytangle.services.isotopy import (
    ARC_ASSUMPTION,
    annulus_trace_from_levels,
    check_schedule,
    descendants,
    detect_infinite_nesting,
    innermost_removal_oracle,
    maximal_nodes,
    monotonize_plane_trace,
    normalize_position,
    replay_schedule,
    schedule_removal,
)
from polytangle.utils.exceptions import (
    InfiniteNesting,
    NotStandardPosition,
    ScheduleMismatch,
    UnassignedRegion,
    UnremovableTarget,
)
from polytangle.utils.models import (
    CurveNode,
    GeneratorNode,
    NestingForest,
    ParentRef,
    PeriodicNestingGenerator,
    Push,
    PushSchedule,
    PushStage,
    RegionLadder,
    RegionPushes,
)


@pytest.fixture
def nested_forest():
    """Two nested targets in region 2 carrying a Q-nested curve from region 3."""
    return NestingForest(nodes=[
        CurveNode(id=0, region=2, target=True),
        CurveNode(id=1, p_parent=0, region=2, target=True),
        CurveNode(id=2, q_parent=1, region=3),
        CurveNode(id=3, region=5),
    ])


@pytest.fixture
def ladder():
    return RegionLadder(region_count=8)


class TestForestHelpers:
    """Test nesting queries."""

    def test_descendants(self, nested_forest):
        """Test P-side and Q-side nesting."""
        assert descendants(nested_forest, 0, "P") == {1}
        assert descendants(nested_forest, 1, "Q") == {2}
        assert descendants(nested_forest, 3, "P") == set()

    def test_maximal_nodes(self, nested_forest):
        """Test the roots of the target-restricted forest."""
        assert maximal_nodes(nested_forest) == [0]
        assert maximal_nodes(nested_forest, targets=[1, 3]) == [1, 3]

    def test_unknown_targets(self, nested_forest):
        """Test that explicit targets must exist."""
        with pytest.raises(ValueError):
            maximal_nodes(nested_forest, targets=[9])

    def test_cycles_are_rejected(self):
        """Test that parent links must not form a cycle."""
        with pytest.raises(ValueError):
            NestingForest(nodes=[CurveNode(id=0, p_parent=1), CurveNode(id=1, p_parent=0)])


class TestSchedule:
    """Test push scheduling."""

    def test_nested_targets(self, nested_forest, ladder):
        """Test innermost-first pushes that carry the Q-nested curve along."""
        schedule = schedule_removal(nested_forest, ladder)
        assert len(schedule.stages) == 1
        stage = schedule.stages[0]
        assert stage.phase == "even"
        assert [entry.region for entry in stage.entries] == [2]
        assert [(push.node, push.removes) for push in stage.entries[0].pushes] == [(1, [1, 2]), (0, [0])]
        assert schedule.removed == [0, 1, 2]
        assert schedule.remaining == [3]
        assert schedule.push_count == 2
        assert check_schedule(nested_forest, schedule) == (True, "")

    def test_no_targets(self, ladder):
        """Test that a forest without targets keeps every curve."""
        forest = NestingForest(nodes=[CurveNode(id=0, region=0), CurveNode(id=1, region=1)])
        schedule = schedule_removal(forest, ladder)
        assert schedule.stages == []
        assert schedule.remaining == [0, 1]

    def test_gap_phase_and_parity(self, ladder):
        """Test that gap curves and odd regions land in their own stages."""
        forest = NestingForest(nodes=[
            CurveNode(id=0, region=1, target=True),
            CurveNode(id=1, region=4, target=True, on_frontier=False),
            CurveNode(id=2, region=6, target=True),
        ])
        phases = [stage.phase for stage in schedule_removal(forest, ladder).stages]
        assert phases == ["even", "odd", "gap-even"]

    def test_arc_targets(self, ladder):
        """Test half-disk pushes for arcs and the declared boundary assumption."""
        forest = NestingForest(nodes=[CurveNode(id=0, kind="arc", region=0, target=True, boundary_region=True)])
        schedule = schedule_removal(forest, ladder)
        assert schedule.stages[0].entries[0].pushes[0].kind == "halfdisk push"
        assert ARC_ASSUMPTION in schedule.assumptions

    def test_arc_without_boundary(self, ladder):
        """Test that an arc target must end in the marked boundary surface."""
        forest = NestingForest(nodes=[CurveNode(id=0, kind="arc", region=0, target=True)])
        with pytest.raises(UnassignedRegion):
            schedule_removal(forest, ladder)

    def test_missing_region(self, ladder):
        """Test that targets need a region on the ladder."""
        with pytest.raises(UnassignedRegion):
            schedule_removal(NestingForest(nodes=[CurveNode(id=0, target=True)]), ladder)
        with pytest.raises(UnassignedRegion):
            schedule_removal(NestingForest(nodes=[CurveNode(id=0, region=9, target=True)]), ladder)

    def test_unbounded_ladder(self):
        """Test that an unbounded ladder accepts any non-negative region."""
        forest = NestingForest(nodes=[CurveNode(id=0, region=40, target=True)])
        schedule = schedule_removal(forest, RegionLadder(region_count=1, unbounded=True))
        assert schedule.removed == [0]

    def test_far_sweep(self, ladder):
        """Test that a push may not sweep curves two regions away."""
        forest = NestingForest(nodes=[
            CurveNode(id=0, region=1, target=True),
            CurveNode(id=1, q_parent=0, region=3),
        ])
        with pytest.raises(UnassignedRegion):
            schedule_removal(forest, ladder)

    def test_unremovable_target(self, ladder):
        """Test that a target enclosing a non-target on P cannot be pushed."""
        forest = NestingForest(nodes=[
            CurveNode(id=0, region=0, target=True),
            CurveNode(id=1, p_parent=0, region=0),
        ])
        with pytest.raises(UnremovableTarget):
            schedule_removal(forest, ladder)
        with pytest.raises(UnremovableTarget):
            innermost_removal_oracle(forest)

    def test_normalize_position(self, nested_forest, ladder):
        """Test that the base curve is the outermost survivor in the lowest region."""
        result = normalize_position(nested_forest, ladder)
        assert [node.id for node in result.forest.nodes] == [3]
        assert result.base_node == 3


class TestInfiniteNesting:
    """Test detection of periodic generators that nest forever."""

    def test_climbing_chain(self):
        """Test that a parent one period up gives an infinite chain."""
        generator = PeriodicNestingGenerator(period=1, nodes=[
            GeneratorNode(id=0, p_parent=ParentRef(node=0, shift=1), target=True),
        ])
        forest = NestingForest(generator=generator)
        assert detect_infinite_nesting(forest)
        with pytest.raises(InfiniteNesting):
            schedule_removal(forest, RegionLadder(region_count=1))

    def test_finite_chain(self):
        """Test that a chain ending in a root is finite."""
        generator = PeriodicNestingGenerator(period=2, nodes=[
            GeneratorNode(id=0),
            GeneratorNode(id=1, q_parent=ParentRef(node=0)),
        ])
        assert not detect_infinite_nesting(NestingForest(generator=generator))

    def test_cycle_within_period(self):
        """Test that a zero-shift cycle is rejected as malformed."""
        generator = PeriodicNestingGenerator(period=1, nodes=[
            GeneratorNode(id=0, p_parent=ParentRef(node=1)),
            GeneratorNode(id=1, p_parent=ParentRef(node=0)),
        ])
        with pytest.raises(ValueError):
            detect_infinite_nesting(NestingForest(generator=generator), "P")


class TestReplay:
    """Test replaying tampered schedules."""

    def test_wrong_removal_set(self, nested_forest, ladder):
        """Test that a push recording the wrong removals is caught."""
        schedule = schedule_removal(nested_forest, ladder)
        tampered = PushSchedule(
            stages=[PushStage(phase="even", entries=[RegionPushes(region=2, pushes=[
                Push(kind="disk push", node=1, removes=[1]),
                Push(kind="disk push", node=0, removes=[0]),
            ])])],
            remaining=schedule.remaining,
        )
        valid, message = check_schedule(nested_forest, tampered)
        assert not valid
        assert "expected [1, 2]" in message

    def test_outer_push_first(self, nested_forest):
        """Test that pushing a curve that still encloses another is illegal."""
        tampered = PushSchedule(stages=[PushStage(phase="even", entries=[RegionPushes(region=2, pushes=[
            Push(kind="disk push", node=0, removes=[0]),
        ])])])
        with pytest.raises(ScheduleMismatch):
            replay_schedule(nested_forest, tampered)

    def test_adjacent_regions_in_one_stage(self):
        """Test that one stage may not push in adjacent regions."""
        forest = NestingForest(nodes=[CurveNode(id=0, region=1, target=True),
                                      CurveNode(id=1, region=2, target=True)])
        tampered = PushSchedule(stages=[PushStage(phase="even", entries=[
            RegionPushes(region=1, pushes=[Push(kind="disk push", node=0, removes=[0])]),
            RegionPushes(region=2, pushes=[Push(kind="disk push", node=1, removes=[1])]),
        ])])
        with pytest.raises(ScheduleMismatch):
            replay_schedule(forest, tampered)

    def test_wrong_remaining(self, nested_forest, ladder):
        """Test that a schedule recording the wrong survivors fails its check."""
        schedule = schedule_removal(nested_forest, ladder)
        valid, message = check_schedule(nested_forest, schedule.model_copy(update={"remaining": []}))
        assert not valid
        assert "replay leaves [3]" in message


class TestRandomForests:
    """Property runs over seeded random forests."""

    def test_curve_swept_before_its_stage(self):
        """Test that an even-stage push takes a curve a later odd-stage push would sweep."""
        forest = NestingForest(nodes=[
            CurveNode(id=0, region=1, target=True),
            CurveNode(id=1, region=2, target=True),
            CurveNode(id=2, p_parent=1, q_parent=0, region=2, target=True),
        ])
        schedule = schedule_removal(forest, RegionLadder(region_count=4))
        assert check_schedule(forest, schedule) == (True, "")
        assert [stage.phase for stage in schedule.stages] == ["even", "odd"]
        even, odd = (stage.entries[0].pushes for stage in schedule.stages)
        assert [(push.node, push.removes) for push in even] == [(2, [2]), (1, [1])]
        assert [(push.node, push.removes) for push in odd] == [(0, [0])]
        assert schedule.remaining == innermost_removal_oracle(forest) == []

    @pytest.mark.parametrize("seed", range(200))
    def test_schedule_matches_oracle(self, seed):
        """Test that every schedule replays cleanly and agrees with innermost removal."""
        rng = random.Random(seed)
        forest, ladder = random_forest(rng, curves=rng.randint(1, 40))
        schedule = schedule_removal(forest, ladder)
        assert check_schedule(forest, schedule) == (True, "")
        assert schedule.remaining == innermost_removal_oracle(forest)
        assert schedule.remaining == innermost_removal_oracle(forest, rng=random.Random(seed + 1))
        for stage in schedule.stages:
            regions = [entry.region for entry in stage.entries]
            assert all(b - a >= 2 for a, b in zip(regions, regions[1:]))


class TestPlaneTraces:
    """Test monotonization of plane traces."""

    def test_excursion(self):
        """Test that a back-and-forth on level 5 is one redundant pair."""
        trace = annulus_trace_from_levels([0, 1, 2, 3, 4, 5, 5, 5, 6])
        assert trace.redundant_pairs == [(6, 7)]
        result = monotonize_plane_trace(trace)
        assert [circle.level for circle in result.trace.circles] == [0, 1, 2, 3, 4, 5, 6]
        assert [move.removed for move in result.moves] == [[6, 7]]
        assert result.separation_indices[0] == 0

    def test_already_monotone(self):
        """Test that a monotone trace needs no moves."""
        result = monotonize_plane_trace(annulus_trace_from_levels([2, 3, 4], base_level=2))
        assert result.moves == []
        assert result.separation_indices == [2, 3, 4]

    def test_deep_excursion(self):
        """Test an excursion that dips back two levels."""
        trace = annulus_trace_from_levels([0, 1, 2, 2, 1, 1, 2, 3])
        result = monotonize_plane_trace(trace)
        assert [circle.level for circle in result.trace.circles] == [0, 1, 2, 3]

    @pytest.mark.parametrize("levels", [[0, 2], [0, 1, 0], [0, 1, 1], [], [1, 0]])
    def test_not_standard(self, levels):
        """Test that malformed level sequences are rejected."""
        with pytest.raises(NotStandardPosition):
            annulus_trace_from_levels(levels)

    def test_bounding_circle(self):
        """Test that a circle bounding a disk in its frontier surface blocks monotonization."""
        trace = annulus_trace_from_levels([0, 1, 2], bounding=[1])
        with pytest.raises(NotStandardPosition):
            monotonize_plane_trace(trace)

    @pytest.mark.parametrize("seed", range(200))
    def test_random_traces(self, seed):
        """Test that every random trace ends up monotone from its base level."""
        trace = random_trace(random.Random(seed), base=seed % 3)
        result = monotonize_plane_trace(trace)
        levels = [circle.level for circle in result.trace.circles]
        assert levels == list(range(trace.base_level, trace.base_level + len(levels)))
        assert levels[-1] == max(circle.level for circle in trace.circles)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
