"""Block decomposition of the box, level tangles and the stacked tangle theta.

The box is [0, 9n + 1] x [-1, 1] x [0, 2m + 1] with z pointing down and
m = (n^2 - n)/2. Layer B_i occupies z in [2i, 2i + 1] and C_i occupies
[2i - 1, 2i]. Inside a layer, column j spans x in [9j - 9, 9j + 1]; the unit
strips [9g, 9g + 1] shared by neighbouring columns are the overlaps N_{i,g}
(in B-layers) and K_{i,g} (in C-layers), and what is left of a column is its
brick.

Cells (bricks and overlaps) are addressed on an integer grid (layer, slot):
layer L = 2i for B_i and 2i - 1 for C_i; slot s = 2g for overlap g and
2j - 1 for the brick of column j.
"""

from fractions import Fraction
from typing import Iterable

from polytangle.services.braid import half_twist_sequence, induced_group_permutation
from polytangle.utils.logger import get_logger
from polytangle.utils.models import (
    BlockId,
    BraidStrand,
    GroupBlockWord,
    LatticePoint,
    LevelSegment,
    LevelTangle,
    Subtangle,
    ThetaComplex,
    ThetaComponent,
)

logger = get_logger(__name__)

Cell = tuple[int, int]
Extent = tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction], tuple[Fraction, Fraction]]


def level_count(n: int) -> int:
    """m = (n^2 - n)/2, the number of braid layers."""
    return (n * n - n) // 2


# =============================================================================
# Block decomposition
# =============================================================================

def validate_block(block: BlockId, n: int) -> tuple[bool, str]:
    """Check a block against the ranges of the n-group box.

    Returns:
        Tuple of (is_valid, error_message)
    """
    m = level_count(n)
    i, j = block.level, block.column
    if block.kind in ("B-layer", "B-brick"):
        ok = 0 <= i <= m and 1 <= j <= n
    elif block.kind in ("C-layer", "C-brick"):
        ok = 1 <= i <= m and 1 <= j <= n
    elif block.kind == "N-overlap":
        ok = 0 <= i <= m and 0 <= j <= n
    else:
        ok = 1 <= i <= m and 0 <= j <= n
    if not ok:
        return False, f"{block.label()} lies outside the box for n={n}"
    return True, ""


def block_extent(block: BlockId, n: int) -> Extent:
    """Exact extent of a block as ((x0, x1), (y0, y1), (z0, z1)).

    Raises:
        ValueError: If the block is out of range
    """
    valid, message = validate_block(block, n)
    if not valid:
        raise ValueError(message)
    i, j = block.level, block.column
    if block.kind in ("B-layer", "C-layer"):
        x = (9 * j - 9, 9 * j + 1)
    elif block.kind in ("N-overlap", "K-overlap"):
        x = (9 * j, 9 * j + 1)
    else:
        x = (9 * j - 8, 9 * j)
    z = (2 * i, 2 * i + 1) if block.kind in ("B-layer", "N-overlap", "B-brick") else (2 * i - 1, 2 * i)
    return (
        (Fraction(x[0]), Fraction(x[1])),
        (Fraction(-1), Fraction(1)),
        (Fraction(z[0]), Fraction(z[1])),
    )


def cell_block(layer: int, slot: int) -> BlockId:
    """The brick or overlap at a grid cell."""
    if layer % 2 == 0:
        kind = "N-overlap" if slot % 2 == 0 else "B-brick"
        level = layer // 2
    else:
        kind = "K-overlap" if slot % 2 == 0 else "C-brick"
        level = (layer + 1) // 2
    column = slot // 2 if slot % 2 == 0 else (slot + 1) // 2
    return BlockId(kind=kind, level=level, column=column)


def block_cells(block: BlockId) -> list[Cell]:
    """Grid cells making up a block; layers split into overlap, brick, overlap."""
    layer = 2 * block.level if block.kind in ("B-layer", "N-overlap", "B-brick") else 2 * block.level - 1
    if block.kind in ("B-layer", "C-layer"):
        j = block.column
        return [(layer, 2 * j - 2), (layer, 2 * j - 1), (layer, 2 * j)]
    if block.kind in ("N-overlap", "K-overlap"):
        return [(layer, 2 * block.column)]
    return [(layer, 2 * block.column - 1)]


def all_cells(n: int) -> set[Cell]:
    """Every cell of the box."""
    m = level_count(n)
    return {(layer, slot) for layer in range(2 * m + 1) for slot in range(2 * n + 1)}


# =============================================================================
# Level tangles
# =============================================================================

def build_level(level: int, n: int, m: int) -> LevelTangle:
    """The level tangle Lambda_level with one copy of the 2n/3n-arc pattern per column."""
    kind = "top" if level == 0 else "bottom" if level == m else "middle"
    top, bottom = 2 * level, 2 * level + 1
    segments: list[LevelSegment] = []
    for j in range(1, n + 1):
        def point(role: str, p: int) -> LatticePoint:
            return LatticePoint.at(role, p, j)

        if kind == "top":
            pieces = [("alpha", point("a", top), point("a", bottom)),
                      ("gamma", point("b", bottom), point("c", bottom))]
        elif kind == "middle":
            pieces = [("delta", point("a", top), point("b", top)),
                      ("alpha", point("c", top), point("a", bottom)),
                      ("gamma", point("b", bottom), point("c", bottom))]
        else:
            pieces = [("delta", point("a", top), point("b", top)),
                      ("alpha", point("c", top), point("c", bottom))]
        for role, start, end in pieces:
            segments.append(LevelSegment(role=role, level=level, column=j, start=start, end=end))
    return LevelTangle(level=level, kind=kind, segments=segments)


def level_segment(theta: ThetaComplex, level: int, column: int, role: str) -> LevelSegment:
    for segment in theta.levels[level].segments:
        if segment.column == column and segment.role == role:
            return segment
    raise KeyError((level, column, role))


# =============================================================================
# The stacked tangle
# =============================================================================

def _phi_rows(word: GroupBlockWord) -> list[list[int]]:
    n = word.group_count
    rows = [list(range(1, n + 1))]
    for t in word.letters:
        swap = {t: t + 1, t + 1: t}
        rows.append([swap.get(value, value) for value in rows[-1]])
    return rows


def _component_chain(j: int, rows: list[list[int]], levels: list[LevelTangle]) -> ThetaComponent:
    m = len(rows) - 1

    def segment(level: int, column: int, role: str) -> LevelSegment:
        return next(s for s in levels[level].segments if s.column == column and s.role == role)

    first = rows[0][j - 1]
    links: list = [segment(0, first, "alpha")]
    for i in range(1, m + 1):
        above, below = rows[i - 1][j - 1], rows[i][j - 1]
        for role, direction in (("a", "down"), ("delta", None), ("b", "up"), ("gamma", None),
                                ("c", "down"), ("alpha", None)):
            if direction is None:
                level, column = (i, below) if role in ("delta", "alpha") else (i - 1, above)
                links.append(segment(level, column, role))
            else:
                links.append(BraidStrand(
                    braid=i,
                    role=role,
                    top=LatticePoint.at(role, 2 * i - 1, above),
                    bottom=LatticePoint.at(role, 2 * i, below),
                    direction=direction,
                ))
    return ThetaComponent(
        index=j,
        start=LatticePoint.at("a", 0, first),
        end=LatticePoint.at("c", 2 * m + 1, rows[m][j - 1]),
        links=links,
    )


def build_theta(n: int) -> ThetaComplex:
    """Stack the level tangles Lambda_0..Lambda_m with the half-twist braids between them.

    Args:
        n: Number of components, at least 2

    Returns:
        ThetaComplex whose component j runs from a_{0,j} to c_{2m+1,n+1-j}

    Raises:
        ValueError: If n < 2
    """
    if n < 2:
        raise ValueError(f"theta needs at least 2 components, got {n}")
    m = level_count(n)
    word = half_twist_sequence(n)
    rows = _phi_rows(word)
    levels = [build_level(i, n, m) for i in range(m + 1)]
    components = [_component_chain(j, rows, levels) for j in range(1, n + 1)]
    theta = ThetaComplex(n=n, m=m, levels=levels, braids=word, phi=rows, components=components)
    logger.info(f"Built theta for n={n}: m={m}, {sum(len(c.links) for c in components)} chain links")
    return theta


def phi_table(theta: ThetaComplex) -> list[list[int]]:
    """phi[i][j - 1]: the column occupied by theta_j in layer B_i."""
    return [list(row) for row in theta.phi]


def columns_of_component(theta: ThetaComplex, j: int) -> list[int]:
    """Column trajectory phi(0, j), ..., phi(m, j)."""
    return [row[j - 1] for row in theta.phi]


def chain_vertices(component: ThetaComponent) -> list[LatticePoint]:
    """Lattice points visited by a component, in order along the chain."""
    vertices = [component.start]
    for link in component.links:
        if link.link == "segment":
            ends = (link.start, link.end)
        else:
            ends = (link.top, link.bottom) if link.direction == "down" else (link.bottom, link.top)
        if ends[0] != vertices[-1]:
            raise ValueError(f"chain of theta_{component.index} breaks at {vertices[-1]}")
        vertices.append(ends[1])
    return vertices


def check_theta(theta: ThetaComplex) -> tuple[bool, str]:
    """Re-check the chain structure of theta against phi and the level tangles.

    Returns:
        Tuple of (is_valid, error_message)
    """
    n, m = theta.n, theta.m
    if induced_group_permutation(theta.braids).image != [n + 1 - j for j in range(1, n + 1)]:
        return False, "braid word is not a half twist"
    for component in theta.components:
        j = component.index
        try:
            vertices = chain_vertices(component)
        except ValueError as exc:
            return False, str(exc)
        if vertices[-1] != component.end:
            return False, f"theta_{j} does not end at its declared endpoint"
        if component.start != LatticePoint.at("a", 0, j) or component.end != LatticePoint.at("c", 2 * m + 1, n + 1 - j):
            return False, f"theta_{j} runs between the wrong endpoints"
        if len(component.links) != 1 + 6 * m:
            return False, f"theta_{j} has {len(component.links)} links, expected {1 + 6 * m}"
        kinds = [link.link for link in component.links]
        expected_kinds = ["segment"] + ["strand", "segment"] * 3 * m
        if kinds != expected_kinds:
            return False, f"theta_{j} does not alternate segments and strands"
        for i in range(m + 1):
            column = theta.phi[i][j - 1]
            own = {(s.role, s.column) for s in component.links if s.link == "segment" and s.level == i}
            expected = {(s.role, s.column) for s in theta.levels[i].segments if s.column == column}
            if own != expected:
                return False, f"level {i} portion of theta_{j} is not Lambda_{{{i},{column}}}"
    return True, ""


def select_subtangle(theta: ThetaComplex, subset: Iterable[int]) -> Subtangle:
    """Restrict theta to the components indexed by J0.

    Raises:
        ValueError: If J0 is empty or leaves [1, n]
    """
    chosen = sorted(set(subset))
    if not chosen:
        raise ValueError("J0 must be a non-empty subset")
    if chosen[0] < 1 or chosen[-1] > theta.n:
        raise ValueError(f"J0 must lie in [1, {theta.n}], got {chosen}")
    return Subtangle(parent=theta, subset=chosen)


def occupied_columns(subtangle: Subtangle, level: int) -> list[int]:
    """{phi(level, j) : j in J0}."""
    return sorted(subtangle.parent.phi[level][j - 1] for j in subtangle.subset)


def adjacency_witness(theta: ThetaComplex, j: int, j2: int) -> int:
    """Smallest level i with phi(i, j2) = phi(i, j) + 1.

    Raises:
        ValueError: If the pair is invalid or, impossibly for a half twist, never adjacent
    """
    if not 1 <= j < j2 <= theta.n:
        raise ValueError(f"need 1 <= j < j' <= {theta.n}, got ({j}, {j2})")
    for i, row in enumerate(theta.phi):
        if row[j2 - 1] == row[j - 1] + 1:
            return i
    raise ValueError(f"components {j} and {j2} are never adjacent")


def disk_incidence(theta: ThetaComplex, j: int, p: int) -> int:
    """Number of points in which theta_j meets the horizontal slice H_p.

    Counted from the chain's lattice points, so it re-derives rather than
    assumes the 3-per-slice pattern.

    Raises:
        ValueError: If p or j is out of range
    """
    if not 0 <= p <= 2 * theta.m + 1:
        raise ValueError(f"height {p} outside [0, {2 * theta.m + 1}]")
    if not 1 <= j <= theta.n:
        raise ValueError(f"component {j} outside [1, {theta.n}]")
    vertices = chain_vertices(theta.components[j - 1])
    return len({vertex for vertex in vertices if vertex.p == p})


def incidence_table(theta: ThetaComplex) -> dict[tuple[int, int], int]:
    """disk_incidence for every (component, height), walking each chain once."""
    table: dict[tuple[int, int], int] = {}
    for component in theta.components:
        heights: dict[int, set[LatticePoint]] = {}
        for vertex in chain_vertices(component):
            heights.setdefault(vertex.p, set()).add(vertex)
        for p in range(2 * theta.m + 2):
            table[(component.index, p)] = len(heights.get(p, ()))
    return table


if __name__ == "__main__":
    theta = build_theta(3)
    for row in phi_table(theta):
        print(row)
    print(check_theta(theta))
    print(adjacency_witness(theta, 1, 3), disk_incidence(theta, 1, 1))
