"""Monotonization of partial planes through their patch trees.

A partial plane meets the frontier surfaces in arcs that cut it into
patches. The patch tree has one vertex per patch (its level is the slab
the patch sits in, its order the number of frontier arcs on its boundary)
and one edge per frontier arc. A non-root patch is falling when none of its
neighbours lies one level closer to the root; the tree is monotone when no
patch falls, i.e. every slice Γ_n of patches up to level n is connected.

Falling patches are collapsed with two moves:

- boundary slide: two lower neighbours of the falling patch merge into one
  patch of order o1 + o2 - 1, and the falling patch loses one arc.
- band push (band unfolding when the patch carries nested arcs): a falling
  patch of order 2 and its two neighbours become one patch one level down,
  of order o1 + o2 - 2.
"""

from typing import Optional

from polytangle.utils.exceptions import PatchTreeError
from polytangle.utils.logger import get_logger
from polytangle.utils.models import Patch, PatchMonotonization, PatchMove, PatchStage, PatchTree

logger = get_logger(__name__)


class _PatchState:
    """Mutable working copy of a patch tree."""

    def __init__(self, tree: PatchTree):
        self.root = tree.root
        self.depth = tree.depth
        self.level = {patch.id: patch.level for patch in tree.patches}
        self.order = {patch.id: patch.order for patch in tree.patches}
        self.nested = {patch.id: patch.nested_arcs for patch in tree.patches}
        self.adjacent: dict[int, set[int]] = {patch.id: set() for patch in tree.patches}
        for a, b in tree.edges:
            self.adjacent[a].add(b)
            self.adjacent[b].add(a)
        self.next_id = max(self.level) + 1

    def check(self) -> None:
        """Raise unless the state is a tree with root on the lowest level and orders at least two."""
        if not self.level:
            raise PatchTreeError("patch tree is empty")
        edge_count = sum(len(neighbours) for neighbours in self.adjacent.values()) // 2
        if edge_count != len(self.level) - 1:
            raise PatchTreeError(f"{len(self.level)} patches joined by {edge_count} arcs is not a tree")
        seen = {self.root}
        stack = [self.root]
        while stack:
            for neighbour in self.adjacent[stack.pop()]:
                if neighbour not in seen:
                    seen.add(neighbour)
                    stack.append(neighbour)
        if len(seen) != len(self.level):
            raise PatchTreeError("patch tree is not connected")
        root_level = self.level[self.root]
        for patch_id, level in self.level.items():
            if level < root_level:
                raise PatchTreeError(f"root is a falling patch: patch {patch_id} sits below it")
            if patch_id == self.root:
                continue
            if self.order[patch_id] < 2:
                raise PatchTreeError(f"patch {patch_id} has order {self.order[patch_id]}")
            if self.order[patch_id] < len(self.adjacent[patch_id]):
                raise PatchTreeError(f"patch {patch_id} has more neighbours than frontier arcs")

    def falling(self) -> list[int]:
        return sorted(
            (patch_id for patch_id, level in self.level.items()
             if patch_id != self.root
             and all(self.level[other] != level - 1 for other in self.adjacent[patch_id])),
            key=lambda patch_id: (self.level[patch_id], patch_id),
        )

    def _merge(self, parts: list[int], level: int, order: int, drop: Optional[int] = None) -> int:
        merged = self.next_id
        self.next_id += 1
        neighbours = set().union(*(self.adjacent[part] for part in parts)) - set(parts)
        if drop is not None:
            neighbours.discard(drop)
        nested = any(self.nested[part] for part in parts)
        for part in parts:
            for other in self.adjacent.pop(part):
                if other in self.adjacent:
                    self.adjacent[other].discard(part)
            del self.level[part], self.order[part], self.nested[part]
        self.level[merged] = level
        self.order[merged] = order
        self.nested[merged] = nested
        self.adjacent[merged] = neighbours
        for other in neighbours:
            self.adjacent[other].add(merged)
        return merged

    def slide(self, center: int) -> PatchMove:
        first, second = sorted(self.adjacent[center])[:2]
        order = self.order[first] + self.order[second] - 1
        level = self.level[first]
        merged = self._merge([first, second], level, order)
        self.adjacent[merged].add(center)
        self.adjacent[center].add(merged)
        self.order[center] -= 1
        return PatchMove(kind="boundary slide", center=center, level=self.level[center], merged=[first, second],
                         result=merged, result_order=order, center_order_after=self.order[center])

    def collapse(self, center: int) -> PatchMove:
        first, second = sorted(self.adjacent[center])
        kind = "band unfolding" if self.nested[center] else "band push"
        order = self.order[first] + self.order[second] - 2
        level = self.level[center]
        merged = self._merge([center, first, second], level + 1, order)
        return PatchMove(kind=kind, center=center, level=level, merged=[first, second],
                         result=merged, result_order=order)

    def to_tree(self) -> PatchTree:
        patches = [Patch(id=patch_id, level=self.level[patch_id], order=self.order[patch_id],
                         nested_arcs=self.nested[patch_id]) for patch_id in sorted(self.level)]
        edges = sorted((a, b) for a in self.adjacent for b in self.adjacent[a] if a < b)
        return PatchTree(root=self.root, patches=patches, edges=edges, depth=self.depth)


def falling_patches(tree: PatchTree) -> list[int]:
    """Non-root patches with no neighbour one level closer to the root."""
    return _PatchState(tree).falling()


def is_monotone(tree: PatchTree) -> bool:
    return not falling_patches(tree)


def monotonize_patch_tree(tree: PatchTree, depth: Optional[int] = None) -> PatchMonotonization:
    """Collapse falling patches until every slice of the tree is connected.

    Each stage treats the falling patches on the lowest falling level and
    every second level beyond it, so moves in one stage touch disjoint
    pairs of levels.

    Args:
        tree: Patch tree with its root on the lowest level
        depth: Truncation depth; the tree's own depth when omitted

    Returns:
        PatchMonotonization with the moves grouped by stage and the final tree

    Raises:
        PatchTreeError: If the input or any intermediate state is not a tree,
            a patch has order below two, or the root falls
    """
    if depth is not None:
        tree = tree.model_copy(update={"depth": depth})
    state = _PatchState(tree)
    if state.depth is not None and any(level > state.depth for level in state.level.values()):
        raise PatchTreeError(f"patches lie beyond the truncation depth {state.depth}")
    state.check()

    stages: list[PatchStage] = []
    while True:
        falling = state.falling()
        if not falling:
            break
        lowest = state.level[falling[0]]
        levels = sorted({state.level[p] for p in falling if (state.level[p] - lowest) % 2 == 0})
        moves: list[PatchMove] = []
        for center in falling:
            if center not in state.level or state.level[center] not in levels or center not in state.falling():
                continue
            if state.order[center] != len(state.adjacent[center]):
                raise PatchTreeError(f"falling patch {center} has frontier arcs outside the tree")
            while state.order[center] > 2:
                moves.append(state.slide(center))
                state.check()
            moves.append(state.collapse(center))
            state.check()
            logger.debug(f"Collapsed falling patch {center} at level {moves[-1].level}")
        stages.append(PatchStage(index=len(stages), levels=levels, moves=moves))

    result = PatchMonotonization(stages=stages, tree=state.to_tree())
    logger.info(f"Monotonized patch tree with {len(result.moves)} moves in {len(stages)} stages")
    return result


if __name__ == "__main__":
    star = PatchTree(
        root=0,
        patches=[Patch(id=0, level=0, order=1), Patch(id=1, level=1, order=2),
                 Patch(id=2, level=2, order=3), Patch(id=3, level=1, order=2),
                 Patch(id=4, level=2, order=2)],
        edges=[(0, 1), (1, 2), (2, 3), (3, 4)],
    )
    print(monotonize_patch_tree(star).model_dump())
