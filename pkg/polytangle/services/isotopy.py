"""Schedulers for the infinite isotopies that clean up surface intersections.

Two surfaces P and Q meet in curves (circles, or arcs ending on a marked
boundary surface). Each curve has a parent on P (the next curve out on P)
and a parent on Q. A target curve bounds a disk on both sides; pushing the
disk it bounds on Q across the disk it bounds on P removes the curve along
with every curve still nested inside it on Q. A push is legal only when the
curve is innermost on P among the remaining curves.

Pushes are grouped by the region ladder Y_0, Y_1, ... of the exhaustion:
regions two apart have disjoint neighbourhoods, so all even regions are
cleaned in one stage, then all odd regions, then the curves that lie in
the gaps between frontier surfaces.

The second half of the module rewrites the trace of a plane in standard
position (its circles of intersection with the frontier surfaces, listed
radially) into monotone position by removing redundant annuli.
"""

import random
from typing import Iterable, Literal, Optional

from polytangle.utils.exceptions import (
    InfiniteNesting,
    NotStandardPosition,
    ScheduleMismatch,
    UnassignedRegion,
    UnremovableTarget,
)
from polytangle.utils.logger import get_logger
from polytangle.utils.models import (
    AnnulusMove,
    AnnulusTrace,
    CurveNode,
    NestingForest,
    NormalizationResult,
    PlaneMonotonization,
    Push,
    PushSchedule,
    PushStage,
    RegionLadder,
    RegionPushes,
    TraceCircle,
    TraceStage,
)

logger = get_logger(__name__)

Side = Literal["P", "Q"]

PHASES = ("even", "odd", "gap-even", "gap-odd")
DECLARED_ASSUMPTIONS = (
    "the pieces C_n and the gaps between frontier surfaces are irreducible (declared, not decided)",
)
ARC_ASSUMPTION = "the marked boundary surface R is incompressible (declared, not decided)"


# =============================================================================
# Forest helpers
# =============================================================================

def _parents(forest: NestingForest, side: Side) -> dict[int, Optional[int]]:
    attribute = "p_parent" if side == "P" else "q_parent"
    return {node.id: getattr(node, attribute) for node in forest.nodes}


def _children(forest: NestingForest, side: Side) -> dict[int, list[int]]:
    children: dict[int, list[int]] = {node.id: [] for node in forest.nodes}
    for node_id, parent in _parents(forest, side).items():
        if parent is not None:
            children[parent].append(node_id)
    for kids in children.values():
        kids.sort()
    return children


def descendants(forest: NestingForest, node_id: int, side: Side) -> set[int]:
    """Every curve nested inside ``node_id`` on one side, excluding itself."""
    children = _children(forest, side)
    found: set[int] = set()
    stack = list(children[node_id])
    while stack:
        current = stack.pop()
        found.add(current)
        stack.extend(children[current])
    return found


def _target_set(forest: NestingForest, targets: Optional[Iterable[int]]) -> set[int]:
    if targets is None:
        return {node.id for node in forest.nodes if node.target}
    chosen = set(targets)
    unknown = chosen - {node.id for node in forest.nodes}
    if unknown:
        raise ValueError(f"unknown target nodes {sorted(unknown)}")
    return chosen


def maximal_nodes(forest: NestingForest, side: Side = "P", targets: Optional[Iterable[int]] = None) -> list[int]:
    """Targets with no target enclosing them on the chosen side.

    Args:
        forest: Intersection curves with their nesting
        side: "P" or "Q"
        targets: Target ids; the nodes flagged ``target`` when omitted

    Returns:
        Sorted ids of the roots of the target-restricted forest
    """
    chosen = _target_set(forest, targets)
    parents = _parents(forest, side)
    result = []
    for node_id in sorted(chosen):
        up = parents[node_id]
        while up is not None and up not in chosen:
            up = parents[up]
        if up is None:
            result.append(node_id)
    return result


def detect_infinite_nesting(forest: NestingForest, side: Optional[Side] = None) -> bool:
    """True when the periodic generator produces an infinite ascending chain.

    Parent references of the generator form a functional graph on one period;
    a cycle whose shifts do not sum to zero climbs one or more periods per
    turn, so the chain above any of its nodes never ends.

    Raises:
        ValueError: If a reference names an unknown node or a cycle stays
            inside one period (a nesting cycle, not a chain)
    """
    generator = forest.generator
    if generator is None:
        return False
    known = {node.id for node in generator.nodes}
    for current_side in ([side] if side else ["P", "Q"]):
        attribute = "p_parent" if current_side == "P" else "q_parent"
        parent = {node.id: getattr(node, attribute) for node in generator.nodes}
        for ref in parent.values():
            if ref is not None and ref.node not in known:
                raise ValueError(f"generator references unknown node {ref.node}")
        for start in sorted(known):
            position: dict[int, int] = {}
            shifts: list[int] = []
            current = start
            while current is not None and current not in position:
                position[current] = len(shifts)
                ref = parent[current]
                if ref is None:
                    current = None
                    break
                shifts.append(ref.shift)
                current = ref.node
            if current is None:
                continue
            total = sum(shifts[position[current]:])
            if total == 0:
                raise ValueError(f"{current_side}-side parents of the generator cycle within one period")
            logger.debug(f"{current_side}-side chain through node {current} climbs {total} periods per turn")
            return True
    return False


# =============================================================================
# Push scheduling
# =============================================================================

def _check_regions(forest: NestingForest, ladder: RegionLadder, chosen: set[int]) -> None:
    for node_id in sorted(chosen):
        node = forest.node(node_id)
        if node.region is None or not ladder.contains(node.region):
            raise UnassignedRegion(f"target {node_id} has no region on the ladder")
        if node.kind == "arc" and not node.boundary_region:
            raise UnassignedRegion(f"arc target {node_id} has no endpoints in the marked boundary surface")


def _post_order(root: int, children: dict[int, list[int]], chosen: set[int]) -> list[int]:
    order: list[int] = []
    stack: list[tuple[int, bool]] = [(root, False)]
    while stack:
        current, expanded = stack.pop()
        if expanded:
            order.append(current)
            continue
        stack.append((current, True))
        for child in reversed(children[current]):
            if child in chosen:
                stack.append((child, False))
    return order


def _push_tree(
    forest: NestingForest,
    top: int,
    p_children: dict[int, list[int]],
    chosen: set[int],
    removed: set[int],
    pushes: list[Push],
) -> set[int]:
    """Push one maximal target tree innermost-first; returns what it removes."""
    head = forest.node(top)
    gone = set(removed)
    for node_id in _post_order(top, p_children, chosen):
        if node_id in gone:
            continue
        swept = {node_id} | (descendants(forest, node_id, "Q") - gone)
        for other in sorted(swept):
            region = forest.node(other).region
            if region is not None and abs(region - head.region) > 1:
                raise UnassignedRegion(
                    f"push of {node_id} sweeps curve {other} in region {region}, "
                    f"outside the neighbourhood of region {head.region}"
                )
        kind = "disk push" if forest.node(node_id).kind == "circle" else "halfdisk push"
        pushes.append(Push(kind=kind, node=node_id, removes=sorted(swept)))
        gone |= swept
    return gone - removed


def schedule_removal(
    forest: NestingForest,
    ladder: RegionLadder,
    targets: Optional[Iterable[int]] = None,
) -> PushSchedule:
    """Stage the pushes that remove every target curve.

    Each maximal target tree is pushed innermost-first. Trees hanging from a
    frontier surface go to the "even" or "odd" stage by the parity of their
    maximal curve's region; trees lying in a gap go to the matching gap
    stage. Within a region, trees are ordered by the id of their maximal
    curve. Each push records what it removes at the moment it is replayed.

    Args:
        forest: Intersection curves
        ladder: Regions of the exhaustion
        targets: Target ids; the flagged targets when omitted

    Returns:
        PushSchedule whose replay removes exactly what the innermost-removal
        oracle removes

    Raises:
        InfiniteNesting: If the forest's generator nests infinitely
        UnassignedRegion: If a pushed curve has no region or strays more than
            one region from its maximal curve
        UnremovableTarget: If a non-target sits inside a target on P
    """
    if detect_infinite_nesting(forest):
        raise InfiniteNesting("the periodic generator nests infinitely; no finite schedule exists")
    chosen = _target_set(forest, targets)
    assumptions = list(DECLARED_ASSUMPTIONS)
    if not chosen:
        return PushSchedule(assumptions=assumptions, remaining=sorted(node.id for node in forest.nodes))

    _check_regions(forest, ladder, chosen)
    for node_id in sorted(chosen):
        blocked = descendants(forest, node_id, "P") - chosen
        if blocked:
            raise UnremovableTarget(f"target {node_id} encloses non-target curves {sorted(blocked)} on P")
    if any(forest.node(node_id).kind == "arc" for node_id in chosen):
        assumptions.append(ARC_ASSUMPTION)

    trees: dict[str, dict[int, list[int]]] = {phase: {} for phase in PHASES}
    for top in maximal_nodes(forest, "P", chosen):
        head = forest.node(top)
        parity = "even" if head.region % 2 == 0 else "odd"
        phase = parity if head.on_frontier else f"gap-{parity}"
        trees[phase].setdefault(head.region, []).append(top)

    # pushes are computed in the order they are replayed
    p_children = _children(forest, "P")
    removed: set[int] = set()
    staged: dict[str, dict[int, list[Push]]] = {phase: {} for phase in PHASES}
    for phase in PHASES:
        for region_id, tops in sorted(trees[phase].items()):
            pushes = staged[phase].setdefault(region_id, [])
            for top in tops:
                removed |= _push_tree(forest, top, p_children, chosen, removed, pushes)

    stages = []
    for phase in PHASES:
        entries = [RegionPushes(region=region, pushes=pushes)
                   for region, pushes in sorted(staged[phase].items()) if pushes]
        if entries:
            stages.append(PushStage(phase=phase, entries=entries))
    schedule = PushSchedule(
        stages=stages,
        assumptions=assumptions,
        removed=sorted(removed),
        remaining=sorted(node.id for node in forest.nodes if node.id not in removed),
    )
    logger.info(f"Scheduled {schedule.push_count} pushes in {len(stages)} stages; {len(removed)} curves removed")
    return schedule


def innermost_removal_oracle(
    forest: NestingForest,
    targets: Optional[Iterable[int]] = None,
    rng: Optional[random.Random] = None,
) -> list[int]:
    """Naive reference: remove any innermost target until none is left.

    Returns:
        Sorted ids of the curves that survive

    Raises:
        UnremovableTarget: If targets remain but none is innermost
    """
    chosen = _target_set(forest, targets)
    p_parents = _parents(forest, "P")
    q_parents = _parents(forest, "Q")
    present = {node.id for node in forest.nodes}

    def nested_in(node_id: int, parents: dict[int, Optional[int]]) -> set[int]:
        found = set()
        for other in present:
            up = parents[other]
            while up is not None:
                if up == node_id:
                    found.add(other)
                    break
                up = parents[up]
        return found

    while chosen & present:
        innermost = sorted(node_id for node_id in chosen & present if not nested_in(node_id, p_parents))
        if not innermost:
            raise UnremovableTarget(f"targets {sorted(chosen & present)} never become innermost")
        pick = rng.choice(innermost) if rng else innermost[0]
        present -= {pick} | nested_in(pick, q_parents)
    return sorted(present)


def replay_schedule(forest: NestingForest, schedule: PushSchedule) -> list[int]:
    """Apply a schedule to a forest, re-checking every push.

    Returns:
        Sorted ids of the curves left after the last push

    Raises:
        ScheduleMismatch: If a push is illegal, removes the wrong curves, or a
            stage holds entries in adjacent regions
    """
    present = {node.id for node in forest.nodes}
    p_children = _children(forest, "P")
    for position, stage in enumerate(schedule.stages):
        regions = [entry.region for entry in stage.entries]
        for a in regions:
            for b in regions:
                if a < b and b - a < 2:
                    raise ScheduleMismatch(f"stage {position} pushes in adjacent regions {a} and {b}")
        for entry in stage.entries:
            for push in entry.pushes:
                if push.node not in present:
                    raise ScheduleMismatch(f"stage {position}: curve {push.node} is already gone")
                inside = set()
                stack = list(p_children[push.node])
                while stack:
                    current = stack.pop()
                    inside.add(current)
                    stack.extend(p_children[current])
                if inside & present:
                    raise ScheduleMismatch(f"stage {position}: curve {push.node} is not innermost on P")
                expected = {push.node} | (descendants(forest, push.node, "Q") & present)
                if set(push.removes) != expected:
                    raise ScheduleMismatch(
                        f"stage {position}: push of {push.node} removes {push.removes}, expected {sorted(expected)}"
                    )
                present -= expected
    return sorted(present)


def check_schedule(forest: NestingForest, schedule: PushSchedule) -> tuple[bool, str]:
    """Replay a schedule and compare its outcome with the recorded one.

    Returns:
        Tuple of (is_valid, error_message)
    """
    try:
        remaining = replay_schedule(forest, schedule)
    except ScheduleMismatch as exc:
        return False, str(exc)
    if remaining != schedule.remaining:
        return False, f"replay leaves {remaining}, schedule records {schedule.remaining}"
    return True, ""


def _restrict(forest: NestingForest, keep: set[int]) -> NestingForest:
    """Drop curves, re-linking parents to the nearest surviving ancestor."""
    p_parents, q_parents = _parents(forest, "P"), _parents(forest, "Q")

    def surviving(parent: Optional[int], parents: dict[int, Optional[int]]) -> Optional[int]:
        while parent is not None and parent not in keep:
            parent = parents[parent]
        return parent

    nodes = [
        node.model_copy(update={"p_parent": surviving(node.p_parent, p_parents),
                                "q_parent": surviving(node.q_parent, q_parents)})
        for node in forest.nodes if node.id in keep
    ]
    return NestingForest(nodes=nodes, generator=forest.generator)


def normalize_position(forest: NestingForest, ladder: RegionLadder) -> NormalizationResult:
    """Delete curves trivial on both surfaces and pick the base curve.

    The base curve plays the role of the boundary of the first disk D_0 of
    the plane: the outermost surviving P-curve in the lowest region.
    """
    schedule = schedule_removal(forest, ladder)
    cleaned = _restrict(forest, set(schedule.remaining))
    roots = [node for node in cleaned.nodes if node.p_parent is None]
    base: Optional[CurveNode] = min(
        roots, key=lambda node: (node.region if node.region is not None else ladder.region_count, node.id),
        default=None,
    )
    return NormalizationResult(schedule=schedule, forest=cleaned, base_node=base.id if base else None)


# =============================================================================
# Plane traces
# =============================================================================

def _walk(levels: list[int], base_level: int) -> list[int]:
    """Slab of every annulus between consecutive circles.

    Raises:
        NotStandardPosition: If a step is not a crossing in the current
            direction or a return to the same level
    """
    if not levels or levels[0] != base_level:
        raise NotStandardPosition(f"trace must start with a circle on F_{base_level}")
    direction = 1
    slabs = []
    for k in range(1, len(levels)):
        step = levels[k] - levels[k - 1]
        if step == direction:
            slabs.append(min(levels[k], levels[k - 1]))
        elif step == 0:
            slabs.append(levels[k] if direction == 1 else levels[k] - 1)
            direction = -direction
        else:
            raise NotStandardPosition(f"circles {k - 1} and {k} jump from level {levels[k - 1]} to {levels[k]}")
        if levels[k] < base_level:
            raise NotStandardPosition(f"circle {k} dips below F_{base_level}")
    if len(levels) > 1 and (direction != 1 or levels[-1] != max(levels) or levels.count(levels[-1]) != 1):
        raise NotStandardPosition("trace must end on its outermost level, visited once")
    return slabs


def _redundant_pairs(levels: list[int]) -> list[tuple[int, int]]:
    """Pair the circles that are not the monotone representative of their level.

    The representative of level L is its first circle after every circle of
    a lower level; the others pair up consecutively.
    """
    pairs = []
    for level in sorted(set(levels)):
        last_lower = max((k for k, value in enumerate(levels) if value < level), default=-1)
        at_level = [k for k, value in enumerate(levels) if value == level]
        representative = next(k for k in at_level if k > last_lower)
        extra = [k for k in at_level if k != representative]
        if len(extra) % 2:
            raise NotStandardPosition(f"level {level} has an unpaired redundant circle")
        pairs.extend((extra[a], extra[a + 1]) for a in range(0, len(extra), 2))
    return sorted(pairs)


def annulus_trace_from_levels(levels: list[int], base_level: Optional[int] = None,
                              bounding: Iterable[int] = ()) -> AnnulusTrace:
    """Build a trace from the radial sequence of circle levels.

    Args:
        levels: Level of each circle J_0, J_1, ... in radial order
        base_level: n_0; the level of the first circle when omitted
        bounding: Positions of circles that bound disks in their frontier surface

    Raises:
        NotStandardPosition: If the sequence is not a trace in standard position
    """
    if not levels:
        raise NotStandardPosition("trace has no circles")
    base = levels[0] if base_level is None else base_level
    _walk(levels, base)
    marked = set(bounding)
    circles = [TraceCircle(id=k, level=level, bounds_disk_in_frontier=k in marked) for k, level in enumerate(levels)]
    return AnnulusTrace(base_level=base, circles=circles, redundant_pairs=_redundant_pairs(levels))


def _check_standard(trace: AnnulusTrace) -> tuple[list[int], list[int]]:
    for circle in trace.circles:
        if circle.bounds_disk_in_frontier:
            raise NotStandardPosition(f"circle {circle.id} bounds a disk in F_{circle.level}")
    levels = [circle.level for circle in trace.circles]
    slabs = _walk(levels, trace.base_level)
    if sorted(tuple(pair) for pair in trace.redundant_pairs) != _redundant_pairs(levels):
        raise NotStandardPosition("recorded redundant pairs do not match the circle levels")
    return levels, slabs


def _separation_indices(spans: dict[tuple[int, int], tuple[int, int]], levels: list[int],
                        base: int) -> list[int]:
    """n_0 < n_1 < ... so that annuli on F_{n_i} fit between n_{i-1} and n_{i+1}."""
    by_level: dict[int, list[tuple[int, int]]] = {}
    for (a, _), span in spans.items():
        by_level.setdefault(levels[a], []).append(span)
    top = max(levels)
    indices = [base]
    while indices[-1] < top:
        current = indices[-1]
        candidate = current + 1
        while True:
            reach_ok = all(high <= candidate for _, high in by_level.get(current, []))
            floor_ok = all(low >= current for low, _ in by_level.get(candidate, []))
            if reach_ok and floor_ok:
                break
            candidate += 1
        indices.append(candidate)
    return indices


def monotonize_plane_trace(trace: AnnulusTrace) -> PlaneMonotonization:
    """Remove every redundant annulus in disjointly supported stages.

    Stage "base" clears F_{n_0}, then "even" and "odd" clear the frontier
    surfaces F_{n_i} by the parity of i, and "gap" clears the levels strictly
    between consecutive separation indices. A move removes a redundant pair
    together with every circle between them.

    Raises:
        NotStandardPosition: If some circle bounds a disk in its frontier
            surface or the levels do not form a trace
    """
    levels, slabs = _check_standard(trace)
    pairs = _redundant_pairs(levels)
    spans = {}
    for a, b in pairs:
        inner_slabs = slabs[a:b]
        inner_levels = levels[a:b + 1]
        low = min(min(inner_slabs), min(inner_levels) - 1)
        high = max(max(inner_slabs), max(inner_levels)) + 1
        spans[(a, b)] = (low, high)
    separation = _separation_indices(spans, levels, trace.base_level)

    present = set(range(len(levels)))
    ids = [circle.id for circle in trace.circles]

    def sweep(selected: list[tuple[int, int]]) -> list:
        moves = []
        for a, b in selected:
            if a not in present or b not in present:
                continue
            gone = sorted(k for k in range(a, b + 1) if k in present)
            present.difference_update(gone)
            moves.append(AnnulusMove(level=levels[a], removed=[ids[k] for k in gone], span=spans[(a, b)]))
        return moves

    stages = []
    plan = [("base", [separation[0]]),
            ("even", [n for i, n in enumerate(separation) if i > 0 and i % 2 == 0]),
            ("odd", [n for i, n in enumerate(separation) if i % 2 == 1])]
    for phase, chosen_levels in plan:
        moves = sweep([pair for pair in pairs if levels[pair[0]] in chosen_levels])
        if moves:
            stages.append(TraceStage(index=len(stages), phase=phase, separation_levels=chosen_levels, moves=moves))
    gap_levels = sorted(set(levels) - set(separation))
    moves = sweep([pair for pair in pairs if levels[pair[0]] in gap_levels])
    if moves:
        stages.append(TraceStage(index=len(stages), phase="gap", separation_levels=gap_levels, moves=moves))

    kept = [circle for position, circle in enumerate(trace.circles) if position in present]
    result = AnnulusTrace(base_level=trace.base_level, circles=kept, redundant_pairs=[])
    final_levels = [circle.level for circle in kept]
    if final_levels != list(range(trace.base_level, trace.base_level + len(kept))):
        raise NotStandardPosition(f"monotonization left levels {final_levels}")
    logger.info(f"Monotonized trace: {len(pairs)} redundant pairs in {len(stages)} stages, separation {separation}")
    return PlaneMonotonization(separation_indices=separation, stages=stages, trace=result)


if __name__ == "__main__":
    forest = NestingForest(nodes=[
        CurveNode(id=0, region=2, target=True),
        CurveNode(id=1, p_parent=0, region=2, target=True),
        CurveNode(id=2, q_parent=1, region=3),
        CurveNode(id=3, region=5),
    ])
    print(schedule_removal(forest, RegionLadder(region_count=8)).model_dump())
    trace = annulus_trace_from_levels([0, 1, 2, 3, 4, 5, 5, 5, 6])
    print(monotonize_plane_trace(trace).model_dump())
