"""Mechanical verification of the engulfing induction for subtangles of theta.

For a subtangle theta-hat the verifier grows regions layer by layer. R_i is
the union of the full blocks B_{r,j}, C_{r,j} (r <= i) over the columns
T_i entered so far; its components are the column intervals of T_i. Each
step i -> i + 1 is classified by the Sigma letter t of beta_{i+1}:

    Case 1: t, t + 1 in J_i        Case 3: t in J_i, t + 1 not in J_i
    Case 2: t, t + 1 not in J_i    Case 4: t not in J_i, t + 1 in J_i

and realized as: one leaf per interval of J_{i+1} (its B-blocks plus the
C-blocks the moving components pass through), glued to every region it
touches along horizontal disks, followed by ball adjunctions of the
subtangle-free cells that complete R_{i+1}. Columns never entered are
adjoined in a final pass.

An interval of T_i may carry components that have never met. Their
union is then split by an unpunctured disk, so each linked group is
grown as a region of its own and the split is recorded in the
certificate notes. A leaf is glued only to the regions of the components
it carries; a region of another group that it merely touches stays
separate until the two groups share a leaf. A column belongs to the group
that visited it last.

Cells are the grid cells of ``services.tangle``. An interface is a set of
unit faces between two cell sets; a component of it is a disk portion when
its faces form a simple path in the (slot, layer) grid, and its punctures
are the points where theta-hat crosses it.
"""

from typing import Iterable, Optional

from polytangle.services.tangle import (
    all_cells,
    block_cells,
    build_theta,
    cell_block,
    incidence_table,
    level_count,
    select_subtangle,
)
from polytangle.utils.exceptions import (
    CaseMismatch,
    CertificateInvalid,
    InterfaceNotDisk,
    NonBallAdjunct,
    PunctureDeficit,
)
from polytangle.utils.logger import get_logger
from polytangle.utils.models import (
    BallAdjunctionNode,
    BlockId,
    ExcellenceCertificate,
    GlueNode,
    GluingCheck,
    InterfaceComponent,
    LeafNode,
    OccupancyTrace,
    StepCase,
    ThetaComplex,
)

logger = get_logger(__name__)

Cell = tuple[int, int]
Vertex = tuple[int, int]
# ("h", height, slot) between layers height-1 and height; ("v", layer, x) at grid line x
Face = tuple[str, int, int]

NEIGHBOURS = ((-1, 0), (1, 0), (0, -1), (0, 1))


# =============================================================================
# Occupancy
# =============================================================================

def intervals(columns: Iterable[int]) -> list[list[int]]:
    """Split a set of columns into maximal runs of consecutive integers."""
    runs: list[list[int]] = []
    for column in sorted(set(columns)):
        if runs and column == runs[-1][-1] + 1:
            runs[-1].append(column)
        else:
            runs.append([column])
    return runs


def classify_step(occupied: Iterable[int], t: int, index: int = 0) -> StepCase:
    """Classify a step by the membership of t and t + 1 in J_i.

    Subcase "a" is the one without a second region to absorb: t + 2 not in
    J_i for Case 3, t - 1 not in J_i for Case 4.
    """
    J = set(occupied)
    has_t, has_next = t in J, t + 1 in J
    if has_t and has_next:
        return StepCase(index=index, t=t, case=1)
    if not has_t and not has_next:
        return StepCase(index=index, t=t, case=2)
    below, above = t - 1 in J, t + 2 in J
    if has_t:
        return StepCase(index=index, t=t, case=3, subcase="b" if above else "a",
                        t_minus_one_occupied=below, t_plus_two_occupied=above)
    return StepCase(index=index, t=t, case=4, subcase="b" if below else "a",
                    t_minus_one_occupied=below, t_plus_two_occupied=above)


def check_transition_rules(trace: OccupancyTrace) -> tuple[bool, str]:
    """Check every step of a trace against the transition rule of its case.

    Returns:
        Tuple of (is_valid, error_message)
    """
    for i, t in enumerate(trace.letters):
        J_i, J_next, I_next = set(trace.J[i]), set(trace.J[i + 1]), set(trace.I[i])
        case = classify_step(J_i, t).case
        if case in (1, 2):
            expected_I, expected_J = J_i, J_i
        elif case == 3:
            expected_I = J_i | {t + 1}
            expected_J = expected_I - {t}
        else:
            expected_I = J_i | {t}
            expected_J = expected_I - {t + 1}
        if I_next != expected_I or J_next != expected_J:
            return False, f"step {i} (case {case}, t={t}) breaks its transition rule"
        if set(trace.S[i]) != set(trace.T[i + 1]):
            return False, f"S_{i + 1} differs from T_{i + 1}"
    return True, ""


def occupancy_trace(theta: ThetaComplex, subset: Iterable[int]) -> OccupancyTrace:
    """Columns met by theta-hat in every layer.

    Raises:
        ValueError: If J0 is not a valid subset
        CaseMismatch: If the trace breaks a transition rule
    """
    chosen = select_subtangle(theta, subset).subset
    J = [sorted(row[j - 1] for j in chosen) for row in theta.phi]
    I = [sorted(set(J[i]) | set(J[i + 1])) for i in range(theta.m)]
    T, S = [], []
    running: set[int] = set()
    for row in J:
        running |= set(row)
        T.append(sorted(running))
    running = set()
    for row in I:
        running |= set(row)
        S.append(sorted(running))
    trace = OccupancyTrace(n=theta.n, subset=chosen, letters=list(theta.braids.letters),
                           J=J, I=I, T=T, S=S)
    valid, message = check_transition_rules(trace)
    if not valid:
        raise CaseMismatch(message)
    return trace


def region_intervals(trace: OccupancyTrace, i: int) -> list[list[int]]:
    """Column intervals of the components of R_i."""
    return intervals(trace.T[i])


def occupied_cells(trace: OccupancyTrace) -> set[Cell]:
    """Cells met by theta-hat.

    A brick meets theta-hat when its column is occupied. An overlap N_{i,g}
    holds the linking of two neighbouring level arcs, so it is met when
    both g and g + 1 are occupied; K_{i,g} is met when the braid beta_i
    moves an occupied group across it.
    """
    n, m = trace.n, len(trace.letters)
    cells: set[Cell] = set()
    for i in range(m + 1):
        J = set(trace.J[i])
        for j in J:
            cells.add((2 * i, 2 * j - 1))
        for g in range(1, n):
            if g in J and g + 1 in J:
                cells.add((2 * i, 2 * g))
    for i in range(1, m + 1):
        for j in trace.I[i - 1]:
            cells.add((2 * i - 1, 2 * j - 1))
        g = trace.letters[i - 1]
        if g in trace.J[i - 1] or g + 1 in trace.J[i - 1]:
            cells.add((2 * i - 1, 2 * g))
    return cells


# =============================================================================
# Cell geometry
# =============================================================================

def column_cells(columns: Iterable[int], layers: Iterable[int]) -> set[Cell]:
    """Cells of the full blocks over the given columns and layers."""
    layer_list = list(layers)
    return {(layer, slot) for c in columns for slot in (2 * c - 2, 2 * c - 1, 2 * c) for layer in layer_list}


def edge_components(cells: set[Cell]) -> list[set[Cell]]:
    """Edge-connected components, ordered by their first cell."""
    remaining = set(cells)
    components = []
    for start in sorted(cells):
        if start not in remaining:
            continue
        remaining.discard(start)
        stack, component = [start], {start}
        while stack:
            layer, slot = stack.pop()
            for dl, ds in NEIGHBOURS:
                neighbour = (layer + dl, slot + ds)
                if neighbour in remaining:
                    remaining.discard(neighbour)
                    component.add(neighbour)
                    stack.append(neighbour)
        components.append(component)
    return components


def is_disk(cells: set[Cell]) -> bool:
    """True when the union of the closed cells is a disk (so, times [-1, 1], a ball)."""
    if not cells or len(edge_components(cells)) != 1:
        return False
    vertices: set[Vertex] = set()
    edges: set[tuple[Vertex, Vertex]] = set()
    for layer, slot in cells:
        corners = [(slot, layer), (slot + 1, layer), (slot + 1, layer + 1), (slot, layer + 1)]
        vertices.update(corners)
        for a, b in zip(corners, corners[1:] + corners[:1]):
            edges.add((min(a, b), max(a, b)))
    for x, z in vertices:
        around = [(z - 1, x - 1) in cells, (z - 1, x) in cells, (z, x) in cells, (z, x - 1) in cells]
        # two cells meeting only at this corner
        if around in ([True, False, True, False], [False, True, False, True]):
            return False
    return len(vertices) - len(edges) + len(cells) == 1


def interface_faces(cells: set[Cell], region: set[Cell]) -> list[Face]:
    """Unit faces shared by two disjoint cell sets."""
    faces = []
    for layer, slot in cells:
        if (layer - 1, slot) in region:
            faces.append(("h", layer, slot))
        if (layer + 1, slot) in region:
            faces.append(("h", layer + 1, slot))
        if (layer, slot - 1) in region:
            faces.append(("v", layer, slot))
        if (layer, slot + 1) in region:
            faces.append(("v", layer, slot + 1))
    return sorted(faces)


def _face_ends(face: Face) -> tuple[Vertex, Vertex]:
    kind, a, b = face
    if kind == "h":
        return (b, a), (b + 1, a)
    return (b, a), (b, a + 1)


def face_components(faces: list[Face]) -> list[tuple[list[Face], bool]]:
    """Group faces into connected components and flag the simple paths.

    Returns:
        List of (faces, is_path) in order of first face
    """
    touching: dict[Vertex, list[int]] = {}
    for index, face in enumerate(faces):
        for vertex in _face_ends(face):
            touching.setdefault(vertex, []).append(index)
    seen: set[int] = set()
    components = []
    for start in range(len(faces)):
        if start in seen:
            continue
        seen.add(start)
        stack, members = [start], [start]
        while stack:
            current = stack.pop()
            for vertex in _face_ends(faces[current]):
                for other in touching[vertex]:
                    if other not in seen:
                        seen.add(other)
                        members.append(other)
                        stack.append(other)
        vertex_set = {v for index in members for v in _face_ends(faces[index])}
        is_path = (len(members) == len(vertex_set) - 1
                   and all(len(touching[v]) <= 2 for v in vertex_set))
        components.append((sorted(faces[index] for index in members), is_path))
    return components


class PunctureCounter:
    """Counts the points where theta-hat crosses interface faces."""

    def __init__(self, theta: ThetaComplex, trace: OccupancyTrace, occupied: set[Cell]):
        self.trace = trace
        self.occupied = occupied
        self.incidence = incidence_table(theta)
        self.phi = theta.phi

    def horizontal(self, height: int, slot: int) -> int:
        # lattice points sit inside bricks
        if slot % 2 == 0:
            return 0
        column = (slot + 1) // 2
        row = self.phi[height // 2]
        return sum(self.incidence[(k, height)] for k in self.trace.subset if row[k - 1] == column)

    def vertical(self, layer: int, x: int) -> int:
        # face on grid line x separates slot x - 1 from slot x
        overlap = x - 1 if (x - 1) % 2 == 0 else x
        gap = overlap // 2
        if layer % 2 == 0:
            if (layer, overlap) in self.occupied:
                raise InterfaceNotDisk(f"interface runs through the clasp region of {cell_block(layer, overlap).label()}")
            return 0
        i = (layer + 1) // 2
        if self.trace.letters[i - 1] != gap:
            return 0
        above = set(self.trace.J[i - 1])
        return 3 * (gap in above) + 3 * (gap + 1 in above)

    def count(self, faces: list[Face]) -> int:
        total = 0
        for kind, a, b in faces:
            total += self.horizontal(a, b) if kind == "h" else self.vertical(a, b)
        return total


# =============================================================================
# Gluing checks
# =============================================================================

def check_gluing(interfaces: list[InterfaceComponent]) -> GluingCheck:
    """Negative Euler characteristic test for a gluing surface.

    Passes iff the surface is non-empty, every disk portion has at least two
    punctures (chi = 1 - punctures < 0), and every other component declares
    a negative Euler characteristic.
    """
    if not interfaces:
        return GluingCheck(interfaces=[], verdict="fail", reason="gluing surface is empty")
    for position, component in enumerate(interfaces):
        if component.is_disk_portion and component.puncture_count < 2:
            return GluingCheck(
                interfaces=interfaces, verdict="fail",
                reason=f"component {position} is a disk with {component.puncture_count} punctures",
            )
        if not component.is_disk_portion and (component.euler_characteristic is None
                                              or component.euler_characteristic >= 0):
            return GluingCheck(
                interfaces=interfaces, verdict="fail",
                reason=f"component {position} has non-negative Euler characteristic",
            )
    return GluingCheck(interfaces=interfaces, verdict="pass")


def _cell_ids(cells: Iterable[Cell]) -> list[BlockId]:
    return [cell_block(layer, slot) for layer, slot in sorted(cells)]


def _stack(columns: Iterable[int], top: int) -> list[BlockId]:
    blocks = []
    for c in sorted(columns):
        for r in range(top + 1):
            if r >= 1:
                blocks.append(BlockId(kind="C-layer", level=r, column=c))
            blocks.append(BlockId(kind="B-layer", level=r, column=c))
    return blocks


def _layer(kind: str, level: int, columns: Iterable[int]) -> list[BlockId]:
    return [BlockId(kind=kind, level=level, column=c) for c in sorted(columns)]


def _cells_of(blocks: Iterable[BlockId]) -> set[Cell]:
    return {cell for block in blocks for cell in block_cells(block)}


# =============================================================================
# Certificate construction
# =============================================================================

class _CertificateBuilder:
    """Runs the induction and records certificate nodes.

    Components of theta-hat that have shared a leaf form a linked group, and
    every group owns exactly one region. A group's region grows over the
    columns its components have visited, and a column revisited by another
    group passes to that group. A free overlap between two groups goes to
    the group on its left.
    """

    def __init__(self, theta: ThetaComplex, trace: OccupancyTrace):
        self.theta = theta
        self.trace = trace
        self.n, self.m = theta.n, theta.m
        self.occupied = occupied_cells(trace)
        self.punctures = PunctureCounter(theta, trace, self.occupied)
        self.nodes: list = []
        self.region_cells: dict[int, set[Cell]] = {}
        self.owner: dict[Cell, int] = {}
        self.steps: list[StepCase] = []
        self.notes: list[str] = []
        self.untouched: list[int] = []
        self.parent: dict[int, int] = {k: k for k in trace.subset}
        self.visited: dict[int, set[int]] = {k: set() for k in trace.subset}
        self.last_visitor: dict[int, int] = {}
        self.level = 0

    # -- linked groups --------------------------------------------------------

    def _find(self, k: int) -> int:
        while self.parent[k] != k:
            self.parent[k] = self.parent[self.parent[k]]
            k = self.parent[k]
        return k

    def _groups(self) -> dict[int, list[int]]:
        groups: dict[int, list[int]] = {}
        for k in self.trace.subset:
            groups.setdefault(self._find(k), []).append(k)
        return groups

    def _visit(self, level: int, runs: list[list[int]]) -> None:
        row = self.theta.phi[level]
        for k in self.trace.subset:
            self.visited[k].add(row[k - 1])
            self.last_visitor[row[k - 1]] = k
        for run in runs:
            roots = sorted({self._find(k) for k in self.trace.subset if row[k - 1] in run})
            for other in roots[1:]:
                self.parent[other] = roots[0]
        self.level = level

    def _column_owners(self) -> dict[int, int]:
        return {column: self._find(k) for column, k in self.last_visitor.items()}

    def _region_of_group(self, root: int) -> int:
        column = self.theta.phi[self.level][root - 1]
        return self.owner[(2 * self.level, 2 * column - 1)]

    # -- node helpers ---------------------------------------------------------

    def _new_region(self, node, cells: set[Cell]) -> int:
        self.nodes.append(node)
        self.region_cells[node.id] = cells
        for cell in cells:
            self.owner[cell] = node.id
        return node.id

    def _arcs_per_column(self, level: int) -> int:
        return 2 if level in (0, self.m) else 3

    def _leaf(self, level: int, columns: list[int], cells: set[Cell]) -> int:
        arcs = self._arcs_per_column(level)
        node = LeafNode(id=len(self.nodes), level=level, first_column=columns[0], last_column=columns[-1],
                        arcs_per_column=arcs, width=arcs * len(columns), column_width=len(columns),
                        cells=_cell_ids(cells))
        logger.debug(f"Leaf {node.id}: level {level}, columns {columns}, {node.width} arcs")
        return self._new_region(node, cells)

    def _gluing(self, first: int, second: int) -> GluingCheck:
        """Check the gluing surface of two regions without gluing them.

        Raises:
            InterfaceNotDisk: If the surface or the union is not as required
        """
        cells_a, cells_b = self.region_cells[first], self.region_cells[second]
        interfaces = []
        for component, is_path in face_components(interface_faces(cells_a, cells_b)):
            if not is_path:
                raise InterfaceNotDisk(f"gluing regions {first} and {second}: interface component is not a disk")
            interfaces.append(InterfaceComponent(puncture_count=self.punctures.count(component),
                                                 is_disk_portion=True))
        check = check_gluing(interfaces)
        if check.verdict == "pass" and not is_disk(cells_a | cells_b):
            raise InterfaceNotDisk(f"gluing regions {first} and {second} does not give a ball")
        return check

    def _glue(self, first: int, second: int, check: Optional[GluingCheck] = None) -> int:
        if check is None:
            check = self._gluing(first, second)
        if check.verdict != "pass":
            raise PunctureDeficit(f"gluing regions {first} and {second}: {check.reason}")
        cells_a, cells_b = self.region_cells[first], self.region_cells[second]
        interfaces = check.interfaces
        node = GlueNode(id=len(self.nodes), children=[first, second], check=check)
        del self.region_cells[first], self.region_cells[second]
        logger.debug(f"Glue {node.id}: {first} + {second}, punctures {[c.puncture_count for c in interfaces]}")
        return self._new_region(node, cells_a | cells_b)

    def _try_adjoin(self, cells: set[Cell], region: int, final_pass: bool) -> Optional[int]:
        if cells & self.occupied:
            raise NonBallAdjunct(f"cells {sorted(cells & self.occupied)} meet the subtangle but belong to no leaf")
        if not is_disk(cells):
            return None
        components = face_components(interface_faces(cells, self.region_cells[region]))
        if len(components) != 1 or not components[0][1]:
            return None
        node = BallAdjunctionNode(id=len(self.nodes), child=region, blocks=_cell_ids(cells),
                                  interface_count=1, final_pass=final_pass)
        merged = self.region_cells.pop(region) | cells
        logger.debug(f"Ball {node.id}: {len(cells)} cells onto region {region}")
        return self._new_region(node, merged)

    def _adjoin_remaining(self, target: set[Cell], final_pass: bool) -> set[Cell]:
        """Adjoin every unowned target cell to the region of the group owning its column."""
        owners = self._column_owners()
        groups = self._groups()
        pending: dict[int, set[Cell]] = {}
        for layer, slot in sorted(target - set(self.owner)):
            if slot % 2:
                root = owners.get((slot + 1) // 2)
            else:
                root = owners.get(slot // 2, owners.get(slot // 2 + 1))
            if root is None:
                if len(groups) != 1:
                    raise CaseMismatch(f"cell {(layer, slot)} lies outside the columns of every group")
                root = next(iter(groups))
            pending.setdefault(root, set()).add((layer, slot))

        adjoined: set[Cell] = set()
        for root, cells in sorted(pending.items()):
            adjoined |= cells
            while cells:
                progress = False
                for component in edge_components(cells):
                    if self._try_adjoin(component, self._region_of_group(root), final_pass) is not None:
                        cells -= component
                        progress = True
                if progress:
                    continue
                # a cell the owning region cannot take may sit against another group's region
                home = self._region_of_group(root)
                candidates = [home] + sorted(region for region in self.region_cells if region != home)
                for cell in sorted(cells):
                    if any(self._try_adjoin({cell}, region, final_pass) is not None for region in candidates):
                        cells.discard(cell)
                        progress = True
                        break
                if not progress:
                    raise NonBallAdjunct(f"cells {sorted(cells)} cannot be adjoined as balls along one disk")
        return adjoined

    # -- induction ------------------------------------------------------------

    def _start(self) -> None:
        runs = intervals(self.trace.J[0])
        for run in runs:
            self._leaf(0, run, column_cells(run, [0]))
        self._visit(0, runs)

    def _leaves_for_step(self, i: int) -> list[tuple[list[int], list[int], int]]:
        t = self.trace.letters[i]
        swap = {t: t + 1, t + 1: t}
        J_i = set(self.trace.J[i])
        top, layer = 2 * i, 2 * i + 1
        created = []
        for run in intervals(self.trace.J[i + 1]):
            span = sorted(set(run) | {swap[c] for c in run if c in swap and swap[c] in J_i})
            cells = column_cells(run, [2 * i + 2]) | {(layer, s) for s in range(2 * span[0] - 1, 2 * span[-1])}
            # an end overlap joins the leaf unless it sits under another region
            for end, brick in ((2 * span[0] - 2, 2 * span[0] - 1), (2 * span[-1], 2 * span[-1] - 1)):
                above = self.owner.get((top, end))
                if above is None or above == self.owner.get((top, brick)):
                    cells.add((layer, end))
            cells -= set(self.owner)
            leaf = self._leaf(i + 1, run, cells)
            carried = [k for k in self.trace.subset if self.theta.phi[i + 1][k - 1] in run]
            pending = sorted(
                {self.owner[(top, 2 * self.theta.phi[i][k - 1] - 1)] for k in carried},
                key=lambda region: min(slot for _, slot in self.region_cells[region]),
            )
            self._glue_all(leaf, pending)
            created.append((run, span, leaf))
        return created

    def _glue_all(self, current: int, pending: list[int]) -> int:
        """Glue a leaf to the regions of the components it carries.

        Regions are taken left to right; one whose surface fails is retried
        after the others have grown the leaf.
        """
        while pending:
            failed = None
            for region in pending:
                check = self._gluing(current, region)
                if check.verdict == "pass":
                    current = self._glue(current, region, check)
                    pending = [other for other in pending if other != region]
                    break
                failed = failed or (region, check)
            else:
                region, check = failed
                raise PunctureDeficit(f"gluing regions {current} and {region}: {check.reason}")
        return current

    def _note_split_intervals(self, level: int) -> None:
        for run in intervals(self.trace.T[level]):
            roots = {self._find(k) for k in self.trace.subset if self.visited[k] & set(run)}
            if len(roots) > 1:
                note = (f"level {level}: columns {run[0]}..{run[-1]} of R_{level} hold {len(roots)} unlinked "
                        f"groups; each group is certified as its own region")
                self.notes.append(note)
                logger.info(note)

    def _step(self, i: int) -> None:
        trace, t = self.trace, self.trace.letters[i]
        case = classify_step(trace.J[i], t, index=i)
        T_i, T_next = set(trace.T[i]), set(trace.T[i + 1])
        new_columns = T_next - T_i
        allowed = {1: set(), 2: set(), 3: {t + 1}, 4: {t}}[case.case]
        if not new_columns <= allowed:
            raise CaseMismatch(f"step {i}: case {case.case} enters columns {sorted(new_columns)}")

        leaves = self._leaves_for_step(i)
        self._visit(i + 1, intervals(trace.J[i + 1]))
        groups = self._groups()
        if len({self._region_of_group(root) for root in groups}) != len(groups) \
                or len(self.region_cells) != len(groups):
            raise CaseMismatch(f"step {i}: {len(self.region_cells)} regions for {len(groups)} linked groups")
        adjoined = self._adjoin_remaining(column_cells(T_next, range(2 * i + 3)), final_pass=False)
        self._note_split_intervals(i + 1)
        self.steps.append(case.model_copy(update={"scratch": self._scratch(i, case, leaves, adjoined)}))

    def _scratch(self, i: int, case: StepCase, leaves, adjoined: set[Cell]) -> dict[str, list[BlockId]]:
        trace, t = self.trace, case.t
        J_i, J_next, I_next = set(trace.J[i]), set(trace.J[i + 1]), set(trace.I[i])
        T_i, T_next = set(trace.T[i]), set(trace.T[i + 1])
        new_columns = sorted(T_next - T_i)
        P = _stack(T_i, i) + _layer("C-layer", i + 1, I_next) + _layer("B-layer", i + 1, J_next)
        U = _stack(new_columns, i)
        Q = P + U
        L = _layer("C-layer", i + 1, T_next - I_next) + _layer("B-layer", i + 1, T_next - J_next)
        scratch: dict[str, list[BlockId]] = {"P": P, "Q": Q, "L": L}

        def region_of(column: int) -> list[BlockId]:
            for run in intervals(T_i):
                if column in run:
                    return _stack(run, i)
            return []

        if case.case == 1:
            leaf = next((entry for entry in leaves if t in entry[0] and t + 1 in entry[0]), None)
            if leaf is None:
                raise CaseMismatch(f"step {i}: no leaf carries both columns {t} and {t + 1}")
            scratch["Z"] = _layer("C-layer", i + 1, leaf[1]) + _layer("B-layer", i + 1, leaf[0])
            return scratch
        if case.case == 2:
            return scratch

        # Case 3 moves a component from t to t + 1; Case 4 is its mirror image.
        source, arrival = (t, t + 1) if case.case == 3 else (t + 1, t)
        step = 1 if case.case == 3 else -1
        leaf = next((entry for entry in leaves if arrival in entry[0]), None)
        if leaf is None:
            raise CaseMismatch(f"step {i}: no leaf receives column {arrival}")
        run, span, _ = leaf
        edge = run[0] if case.case == 3 else run[-1]
        if edge != arrival or source not in span:
            raise CaseMismatch(f"step {i}: leaf {run} does not start at the arriving column {arrival}")
        if (len(run) == 1) != (case.subcase == "a"):
            raise CaseMismatch(f"step {i}: leaf width {len(run)} contradicts subcase {case.subcase}")
        if (2 * i + 2, 2 * source - 1) not in adjoined:
            raise CaseMismatch(f"step {i}: vacated brick of column {source} was not adjoined")

        interval = next(r for r in intervals(I_next) if arrival in r)
        Y = _layer("C-layer", i + 1, interval) + _layer("B-layer", i + 1, [c for c in interval if c in J_next])
        Z = _layer("C-layer", i + 1, span) + _layer("B-layer", i + 1, run)
        Y_rest = [block for block in Y if block not in Z]
        beyond = source - step
        if bool(Y_rest) != (beyond in J_i):
            raise CaseMismatch(f"step {i}: Y - Z is {'non-' if Y_rest else ''}empty against J_i")

        scratch.update({"X": region_of(source), "Y": Y, "Y~": Y_rest, "Z": Z, "W": _layer("B-layer", i + 1, run),
                        "U": U})
        if new_columns:
            column = new_columns[0]
            scratch["U'"] = ([BlockId(kind="B-brick", level=r, column=column) for r in range(i + 1)]
                             + [BlockId(kind="C-brick", level=r, column=column) for r in range(1, i + 1)])
        lower, upper = (t, t + 1) if case.case == 3 else (t - 1, t)
        names = ("U_t", "U_t+1") if case.case == 3 else ("U_t-1", "U_t")
        for name, gap in zip(names, (lower, upper)):
            if 0 <= gap <= self.n:
                scratch[name] = ([BlockId(kind="N-overlap", level=r, column=gap) for r in range(i + 1)]
                                 + [BlockId(kind="K-overlap", level=r, column=gap) for r in range(1, i + 1)])
        if case.subcase == "b":
            scratch["V"] = region_of(arrival + step)
        return scratch

    def _finish(self) -> None:
        untouched = sorted(set(range(1, self.n + 1)) - set(self.trace.T[-1]))
        if untouched:
            message = (f"columns {untouched} are never entered: T_m = {self.trace.T[-1]} is not [1, {self.n}]; "
                       f"they are adjoined in a final pass")
            self.notes.append(message)
            logger.warning(message)
        self._adjoin_remaining(all_cells(self.n), final_pass=True)
        if len(self.region_cells) != 1:
            raise CaseMismatch(f"{len(self.region_cells)} regions remain after the final pass")
        self.untouched = untouched

    def run(self) -> ExcellenceCertificate:
        self._start()
        for i in range(self.m):
            self._step(i)
        self._finish()
        root = next(iter(self.region_cells))
        return ExcellenceCertificate(
            n=self.n, subset=list(self.trace.subset), steps=self.steps, nodes=self.nodes,
            root=root, untouched_columns=self.untouched, notes=self.notes,
        )


def engulf_verify(theta: ThetaComplex, subset: Iterable[int]) -> ExcellenceCertificate:
    """Build the excellence certificate of a subtangle.

    Args:
        theta: The stacked tangle
        subset: J0, the indices of the chosen components

    Returns:
        ExcellenceCertificate whose root covers every cell of the box

    Raises:
        ValueError: If J0 is empty or out of range
        CaseMismatch: If a step's bookkeeping deviates from its case
        PunctureDeficit: If a gluing disk has fewer than two punctures
        InterfaceNotDisk: If a gluing interface is not a union of disks
        NonBallAdjunct: If the remaining cells cannot be adjoined as balls
    """
    trace = occupancy_trace(theta, subset)
    certificate = _CertificateBuilder(theta, trace).run()
    logger.info(
        f"Certified n={theta.n} J0={trace.subset}: {len(certificate.nodes)} nodes, "
        f"untouched columns {certificate.untouched_columns}"
    )
    return certificate


# =============================================================================
# Independent validation
# =============================================================================

def _validate(certificate: ExcellenceCertificate) -> None:
    n = certificate.n
    theta = build_theta(n)
    m = level_count(n)
    try:
        trace = occupancy_trace(theta, certificate.subset)
    except (ValueError, CaseMismatch) as exc:
        raise CertificateInvalid(None, f"subset rejected: {exc}") from exc
    occupied = occupied_cells(trace)
    counter = PunctureCounter(theta, trace, occupied)

    if len(certificate.steps) != m:
        raise CertificateInvalid(None, f"expected {m} steps, found {len(certificate.steps)}")
    for i, step in enumerate(certificate.steps):
        expected = classify_step(trace.J[i], trace.letters[i], index=i)
        recorded = (step.index, step.t, step.case, step.subcase, step.t_minus_one_occupied, step.t_plus_two_occupied)
        wanted = (expected.index, expected.t, expected.case, expected.subcase,
                  expected.t_minus_one_occupied, expected.t_plus_two_occupied)
        if recorded != wanted:
            raise CertificateInvalid(None, f"step {i} is recorded as {recorded}, recomputed {wanted}")

    box = all_cells(n)
    cells: dict[int, set[Cell]] = {}
    used: set[int] = set()

    def take(node_id: int, child: int) -> set[Cell]:
        if child not in cells:
            raise CertificateInvalid(node_id, f"child {child} is not an earlier node")
        if child in used:
            raise CertificateInvalid(node_id, f"child {child} is used twice")
        used.add(child)
        return cells[child]

    for position, node in enumerate(certificate.nodes):
        if node.id != position:
            raise CertificateInvalid(node.id, f"node stored at position {position}")
        if node.kind == "leaf":
            arcs = 2 if node.level in (0, m) else 3
            columns = list(range(node.first_column, node.last_column + 1))
            if node.arcs_per_column != arcs or node.width != arcs * len(columns) or node.column_width != len(columns):
                raise CertificateInvalid(node.id, f"leaf width {node.width} does not match {len(columns)} columns")
            if node.width < 2:
                raise CertificateInvalid(node.id, f"leaf width {node.width} is below 2")
            if node.level > m or not set(columns) <= set(trace.J[node.level]):
                raise CertificateInvalid(node.id, f"leaf columns {columns} are not occupied at level {node.level}")
            own = _cells_of(node.cells)
            if not own <= box:
                raise CertificateInvalid(node.id, "leaf reaches outside the box")
            layers = {0} if node.level == 0 else {2 * node.level - 1, 2 * node.level}
            if {layer for layer, _ in own} - layers:
                raise CertificateInvalid(node.id, "leaf reaches outside its level")
            if not column_cells(columns, [2 * node.level]) <= own:
                raise CertificateInvalid(node.id, "leaf misses part of its level blocks")
            if not is_disk(own):
                raise CertificateInvalid(node.id, "leaf region is not a ball")
            cells[node.id] = own
        elif node.kind == "glue":
            if len(node.children) != 2:
                raise CertificateInvalid(node.id, "glue needs exactly two children")
            first, second = (take(node.id, child) for child in node.children)
            if first & second:
                raise CertificateInvalid(node.id, "glued regions overlap")
            recomputed = []
            try:
                for component, is_path in face_components(interface_faces(first, second)):
                    if not is_path:
                        raise CertificateInvalid(node.id, "gluing interface is not a union of disks")
                    recomputed.append((counter.count(component), True))
            except InterfaceNotDisk as exc:
                raise CertificateInvalid(node.id, str(exc)) from exc
            stored = [(c.puncture_count, c.is_disk_portion) for c in node.check.interfaces]
            if sorted(stored) != sorted(recomputed):
                raise CertificateInvalid(node.id, f"recorded punctures {stored}, recounted {recomputed}")
            verdict = check_gluing(node.check.interfaces).verdict
            if node.check.verdict != "pass" or verdict != "pass":
                raise CertificateInvalid(node.id, "gluing check does not pass")
            merged = first | second
            if not is_disk(merged):
                raise CertificateInvalid(node.id, "glued region is not a ball")
            cells[node.id] = merged
        else:
            region = take(node.id, node.child)
            own = _cells_of(node.blocks)
            if not own <= box:
                raise CertificateInvalid(node.id, "adjoined blocks reach outside the box")
            if own & region:
                raise CertificateInvalid(node.id, "adjoined blocks overlap the region")
            if own & occupied:
                raise CertificateInvalid(node.id, "adjoined blocks meet the subtangle")
            if not is_disk(own):
                raise CertificateInvalid(node.id, "adjoined blocks are not a ball")
            components = face_components(interface_faces(own, region))
            if node.interface_count != 1 or len(components) != 1 or not components[0][1]:
                raise CertificateInvalid(
                    node.id, f"adjunction meets its region in {len(components)} components "
                             f"(recorded {node.interface_count}), expected one disk")
            cells[node.id] = own | region

    if certificate.root not in cells:
        raise CertificateInvalid(certificate.root, "root is not a node")
    if used | {certificate.root} != set(cells):
        dangling = sorted(set(cells) - used - {certificate.root})
        raise CertificateInvalid(dangling[0] if dangling else certificate.root, "node is never used")
    if cells[certificate.root] != all_cells(n):
        raise CertificateInvalid(certificate.root, "root does not cover the box")
    untouched = sorted(set(range(1, n + 1)) - set(trace.T[-1]))
    if certificate.untouched_columns != untouched:
        raise CertificateInvalid(None, f"untouched columns recorded {certificate.untouched_columns}, found {untouched}")


def validate_certificate(certificate: ExcellenceCertificate) -> tuple[bool, str]:
    """Re-check every node of a certificate independently of its producer.

    Returns:
        Tuple of (is_valid, error_message naming the first violated node)
    """
    try:
        _validate(certificate)
    except CertificateInvalid as exc:
        logger.error(f"Certificate for n={certificate.n} J0={certificate.subset} rejected: {exc}")
        return False, str(exc)
    return True, ""


if __name__ == "__main__":
    theta = build_theta(3)
    certificate = engulf_verify(theta, [2])
    print(len(certificate.nodes), certificate.untouched_columns, certificate.notes)
    print(validate_certificate(certificate))
