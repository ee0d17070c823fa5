"""Seeded random instances for property runs and CLI demos.

Every generator takes a ``random.Random`` so callers control the stream;
``rng_for`` builds one from POLYTANGLE_SEED when no seed is given.
"""

import random
from typing import Optional

from polytangle.utils.config import get_settings
from polytangle.utils.models import (
    AnnulusTrace,
    BinaryLabeling,
    CurveNode,
    EventuallyPeriodic,
    ExhaustionDescriptor,
    GroupBlockWord,
    NestingForest,
    Patch,
    PatchTree,
    PieceDescriptor,
    RegionLadder,
    SlotLabel,
    SurfaceDescriptor,
)
from polytangle.services.isotopy import annulus_trace_from_levels

MAX_CURVES = 100
MAX_REGIONS = 10
MAX_PATCHES = 200
MAX_DEPTH = 10


def rng_for(seed: Optional[int] = None) -> random.Random:
    return random.Random(get_settings().seed if seed is None else seed)


def random_subset(rng: random.Random, n: int) -> list[int]:
    """A non-empty sorted subset of [1, n]."""
    chosen = [j for j in range(1, n + 1) if rng.random() < 0.5]
    return chosen or [rng.randint(1, n)]


def random_group_word(rng: random.Random, n: int, length: int) -> GroupBlockWord:
    return GroupBlockWord(group_count=n, letters=[rng.randint(1, n - 1) for _ in range(length)])


# =============================================================================
# Nesting forests
# =============================================================================

def random_forest(rng: random.Random, curves: Optional[int] = None,
                  regions: Optional[int] = None) -> tuple[NestingForest, RegionLadder]:
    """A finite forest whose targets are all removable.

    A curve nested on P inside a target is itself a target, and every curve
    shares the region of its P-parent; Q-parents are drawn from the same
    region, so each push stays inside one region.
    """
    count = curves if curves is not None else rng.randint(1, MAX_CURVES)
    region_count = regions if regions is not None else rng.randint(1, MAX_REGIONS)
    nodes: list[CurveNode] = []
    by_region: dict[int, list[int]] = {}
    for node_id in range(count):
        p_parent = rng.choice(nodes) if nodes and rng.random() < 0.6 else None
        region = p_parent.region if p_parent else rng.randrange(region_count)
        pool = by_region.setdefault(region, [])
        q_parent = rng.choice(pool) if pool and rng.random() < 0.5 else None
        target = bool(p_parent and p_parent.target) or rng.random() < 0.4
        nodes.append(CurveNode(id=node_id, p_parent=p_parent.id if p_parent else None, q_parent=q_parent,
                               region=region, target=target, on_frontier=rng.random() < 0.8))
        pool.append(node_id)
    return NestingForest(nodes=nodes), RegionLadder(region_count=region_count)


# =============================================================================
# Patch trees
# =============================================================================

def random_patch_tree(rng: random.Random, depth: Optional[int] = None,
                      budget: int = MAX_PATCHES) -> PatchTree:
    """Union of random-walk paths from existing patches up to the truncation depth.

    Interior patches have every frontier arc inside the tree; each path ends
    in a leaf on the truncation level that carries one more arc beyond it.
    """
    depth = depth if depth is not None else rng.randint(1, MAX_DEPTH)
    level = {0: 0}
    edges: list[tuple[int, int]] = []
    for _ in range(rng.randint(1, 12)):
        start = rng.choice(sorted(level))
        if level[start] == depth:
            continue
        walk = [level[start]]
        while walk[-1] < depth and len(walk) <= 4 * depth:
            step = 1 if walk[-1] == 0 or rng.random() < 0.7 else -1
            walk.append(walk[-1] + step)
        if walk[-1] != depth or len(level) + len(walk) - 1 > budget:
            continue
        previous = start
        for height in walk[1:]:
            new_id = len(level)
            level[new_id] = height
            edges.append((previous, new_id))
            previous = new_id
    degree = {patch_id: 0 for patch_id in level}
    for a, b in edges:
        degree[a] += 1
        degree[b] += 1
    patches = [
        Patch(id=patch_id, level=height,
              order=degree[patch_id] + (1 if patch_id and degree[patch_id] == 1 else 0),
              nested_arcs=rng.random() < 0.3)
        for patch_id, height in sorted(level.items())
    ]
    return PatchTree(root=0, patches=patches, edges=edges, depth=depth)


# =============================================================================
# Plane traces
# =============================================================================

def random_trace_levels(rng: random.Random, base: int = 0, height: Optional[int] = None) -> list[int]:
    """Radial circle levels climbing from ``base``, with back-and-forth excursions."""
    height = height if height is not None else rng.randint(1, 8)
    levels = [base]
    floor = base
    for current in range(base, base + height):
        if rng.random() < 0.4:
            # excursions never reach back into an earlier one
            drop = rng.randint(0, current - floor)
            floor = current + 1
            levels.append(current)
            levels.extend(range(current - 1, current - drop - 1, -1))
            levels.append(current - drop)
            levels.extend(range(current - drop + 1, current + 1))
        levels.append(current + 1)
    return levels


def random_trace(rng: random.Random, base: int = 0) -> AnnulusTrace:
    return annulus_trace_from_levels(random_trace_levels(rng, base), base_level=base)


# =============================================================================
# Exhaustions and labelings
# =============================================================================

def random_frontier_surface(rng: random.Random, end: int) -> SurfaceDescriptor:
    """A closed surface with negative Euler characteristic, orientable of genus >= 1 otherwise."""
    if rng.random() < 0.7:
        return SurfaceDescriptor(orientable=True, genus_or_crosscaps=rng.randint(2, 4), end=end)
    return SurfaceDescriptor(orientable=False, genus_or_crosscaps=rng.randint(3, 6), end=end)


def random_exhaustion(rng: random.Random, ends: Optional[int] = None,
                      pieces: Optional[int] = None) -> ExhaustionDescriptor:
    """A plane-free exhaustion meeting the ray-carving preconditions."""
    ends = ends or rng.randint(1, 3)
    count = pieces or rng.randint(1, 4)
    levels = [[random_frontier_surface(rng, end) for end in range(1, ends + 1)] for _ in range(count + 1)]
    descriptors = [
        PieceDescriptor(index=index + 1, frontier_in=levels[index], frontier_out=levels[index + 1],
                        p2_irreducible=True, boundary_irreducible=True, anannular=True,
                        frontier_incompressible=True)
        for index in range(count)
    ]
    return ExhaustionDescriptor(pieces=descriptors, end_count=ends, planes_per_end=[0] * ends,
                                complement_components=[ends] * (count + 1))


def random_sequence(rng: random.Random, max_prefix: int = 6, max_period: int = 6) -> EventuallyPeriodic:
    return EventuallyPeriodic(prefix=[rng.randint(0, 1) for _ in range(rng.randint(0, max_prefix))],
                              period=[rng.randint(0, 1) for _ in range(rng.randint(1, max_period))])


def random_labeling(rng: random.Random, mu: Optional[int] = None,
                    nu: Optional[list[int]] = None) -> BinaryLabeling:
    mu = mu or rng.randint(1, 3)
    nu = nu or [rng.randint(1, 3) for _ in range(mu)]
    slots = [SlotLabel(i=i, j=j, sequence=random_sequence(rng))
             for i in range(1, mu + 1) for j in range(1, nu[i - 1] + 1)]
    return BinaryLabeling(mu=mu, nu=nu, slots=slots)
