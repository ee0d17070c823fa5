"""Pydantic models for every public polytangle value.

This module contains all data models shared by the services, the CLI and
the document store, including:
- Braid words and permutations
- Blocks, lattice points, level tangles and the stacked tangle
- Quotient wirings of the solid-torus constructions
- Occupancy traces, gluing checks and excellence certificates
- Nesting forests, push schedules, annulus traces and patch trees
- Surface and exhaustion descriptors
- Binary labelings and the twist-knot catalog
- Realized polylines, projections and diagram codes
- CLI requests

Values that the domain treats as immutable are frozen models.
"""

from fractions import Fraction
from typing import Annotated, Any, Literal, Optional, Union

from pydantic import (
    BaseModel,
    BeforeValidator,
    ConfigDict,
    Field,
    PlainSerializer,
    field_validator,
    model_validator,
)


def _to_fraction(value: Any) -> Fraction:
    """Coerce ints and "p/q" strings into exact rationals."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational: {value!r}") from exc
    raise ValueError(f"expected an exact rational, got {type(value).__name__}")


Rational = Annotated[
    Fraction,
    BeforeValidator(_to_fraction),
    PlainSerializer(lambda value: str(value), return_type=str),
]

Point3 = tuple[Rational, Rational, Rational]
Point2 = tuple[Rational, Rational]


# =============================================================================
# Braid Models
# =============================================================================

class BraidLetter(BaseModel):
    """One Artin generator sigma_k or its inverse."""

    model_config = ConfigDict(frozen=True)

    generator: int = Field(..., ge=1, description="Generator index k of sigma_k")
    sign: Literal[1, -1] = Field(1, description="+1 for sigma_k, -1 for its inverse")


class BraidWord(BaseModel):
    """A braid word on ``strand_count`` strands, stored unreduced."""

    model_config = ConfigDict(frozen=True)

    strand_count: int = Field(..., gt=0, description="Number of strands k")
    letters: list[BraidLetter] = Field(default_factory=list, description="Letters, top to bottom")

    @model_validator(mode="after")
    def check_generators(self) -> "BraidWord":
        for position, letter in enumerate(self.letters):
            if letter.generator >= self.strand_count:
                raise ValueError(
                    f"letter {position}: generator {letter.generator} needs at least "
                    f"{letter.generator + 1} strands, word has {self.strand_count}"
                )
        return self


class GroupBlockWord(BaseModel):
    """A word in the composite block generators Sigma_t acting on groups of three strands."""

    model_config = ConfigDict(frozen=True)

    group_count: int = Field(..., gt=0, description="Number of groups n")
    letters: list[int] = Field(default_factory=list, description="Group indices t, top to bottom")

    @model_validator(mode="after")
    def check_letters(self) -> "GroupBlockWord":
        for position, t in enumerate(self.letters):
            if not 1 <= t < self.group_count:
                raise ValueError(
                    f"letter {position}: group index {t} outside [1, {self.group_count - 1}]"
                )
        return self


class StrandPermutation(BaseModel):
    """A bijection of [1, size]; ``image[k - 1]`` is where k goes."""

    model_config = ConfigDict(frozen=True)

    size: int = Field(..., gt=0)
    image: list[int]

    @model_validator(mode="after")
    def check_bijection(self) -> "StrandPermutation":
        if len(self.image) != self.size:
            raise ValueError(f"image has {len(self.image)} entries, expected {self.size}")
        if sorted(self.image) != list(range(1, self.size + 1)):
            raise ValueError(f"image is not a bijection on [1, {self.size}]")
        return self

    def apply(self, k: int) -> int:
        return self.image[k - 1]

    def is_identity(self) -> bool:
        return self.image == list(range(1, self.size + 1))


# =============================================================================
# Tangle Models
# =============================================================================

BlockKind = Literal["B-layer", "C-layer", "N-overlap", "K-overlap", "B-brick", "C-brick"]
CELL_KINDS = ("N-overlap", "K-overlap", "B-brick", "C-brick")


class BlockId(BaseModel):
    """A block, overlap or brick of the box decomposition.

    ``level`` is i for B_i / C_i and ``column`` is j (or the gap index for
    overlaps). Range checks against n and m live in ``services.tangle``.
    """

    model_config = ConfigDict(frozen=True)

    kind: BlockKind
    level: int = Field(..., ge=0)
    column: int

    @model_validator(mode="after")
    def check_local_ranges(self) -> "BlockId":
        if self.kind in ("C-layer", "K-overlap", "C-brick") and self.level < 1:
            raise ValueError(f"{self.kind} blocks start at level 1")
        if self.kind in ("N-overlap", "K-overlap"):
            if self.column < 0:
                raise ValueError("overlap gap index must be non-negative")
        elif self.column < 1:
            raise ValueError(f"{self.kind} column must be at least 1")
        return self

    def label(self) -> str:
        return f"{self.kind}[{self.level},{self.column}]"


class LatticePoint(BaseModel):
    """The lattice point x_{p,q}, realized at (3q - 1, 0, p)."""

    model_config = ConfigDict(frozen=True)

    p: int = Field(..., ge=0, description="Height (horizontal slice H_p)")
    q: int = Field(..., ge=1, description="Slot in [1, 3n]")

    @property
    def role(self) -> Literal["a", "b", "c"]:
        return ("a", "b", "c")[(self.q - 1) % 3]

    @property
    def column(self) -> int:
        return (self.q + 2) // 3

    @property
    def coordinate(self) -> tuple[int, int, int]:
        return (3 * self.q - 1, 0, self.p)

    @classmethod
    def at(cls, role: str, p: int, column: int) -> "LatticePoint":
        offset = {"a": 2, "b": 1, "c": 0}[role]
        return cls(p=p, q=3 * column - offset)


class LevelSegment(BaseModel):
    """One arc of a level tangle, between two lattice points of one column."""

    model_config = ConfigDict(frozen=True)

    link: Literal["segment"] = "segment"
    role: Literal["alpha", "gamma", "delta"]
    level: int = Field(..., ge=0)
    column: int = Field(..., ge=1)
    start: LatticePoint
    end: LatticePoint

    @model_validator(mode="after")
    def check_column(self) -> "LevelSegment":
        if self.start.column != self.column or self.end.column != self.column:
            raise ValueError(f"{self.role} segment leaves block column {self.column}")
        return self


class LevelTangle(BaseModel):
    """The level tangle Lambda_i: a copy of the true lover's tangle per column."""

    model_config = ConfigDict(frozen=True)

    level: int = Field(..., ge=0)
    kind: Literal["top", "middle", "bottom"]
    segments: list[LevelSegment]

    @model_validator(mode="after")
    def check_segments(self) -> "LevelTangle":
        roles = {"top": ("alpha", "gamma"), "middle": ("delta", "alpha", "gamma"),
                 "bottom": ("delta", "alpha")}[self.kind]
        per_column: dict[int, list[str]] = {}
        for segment in self.segments:
            if segment.level != self.level:
                raise ValueError(f"segment of level {segment.level} in level {self.level}")
            per_column.setdefault(segment.column, []).append(segment.role)
        for column, found in per_column.items():
            if tuple(found) != roles:
                raise ValueError(f"column {column} of a {self.kind} level has roles {found}")
        return self


class BraidStrand(BaseModel):
    """One strand of the braid beta_i in C_i, from height 2i - 1 down to 2i."""

    model_config = ConfigDict(frozen=True)

    link: Literal["strand"] = "strand"
    braid: int = Field(..., ge=1, description="Index i of beta_i")
    role: Literal["a", "b", "c"]
    top: LatticePoint
    bottom: LatticePoint
    direction: Literal["down", "up"]

    @model_validator(mode="after")
    def check_heights(self) -> "BraidStrand":
        if self.top.p != 2 * self.braid - 1 or self.bottom.p != 2 * self.braid:
            raise ValueError(f"strand of beta_{self.braid} must run from H_{2 * self.braid - 1} to H_{2 * self.braid}")
        if self.top.role != self.role or self.bottom.role != self.role:
            raise ValueError("braid strands keep their within-group role")
        return self


ChainLink = Annotated[Union[LevelSegment, BraidStrand], Field(discriminator="link")]


class ThetaComponent(BaseModel):
    """The component theta_j as an alternating chain of level segments and strands."""

    model_config = ConfigDict(frozen=True)

    index: int = Field(..., ge=1)
    start: LatticePoint
    end: LatticePoint
    links: list[ChainLink]


class ThetaComplex(BaseModel):
    """The stacked tangle theta with its occupancy table phi."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=2)
    m: int = Field(..., ge=1)
    levels: list[LevelTangle]
    braids: GroupBlockWord
    phi: list[list[int]] = Field(..., description="phi[i][j - 1] = column of theta_j in B_i")
    components: list[ThetaComponent]

    @model_validator(mode="after")
    def check_structure(self) -> "ThetaComplex":
        n, m = self.n, self.m
        if m != (n * n - n) // 2:
            raise ValueError(f"m must be (n^2 - n)/2 = {(n * n - n) // 2}, got {m}")
        if len(self.levels) != m + 1:
            raise ValueError(f"expected {m + 1} levels, got {len(self.levels)}")
        if self.braids.group_count != n or len(self.braids.letters) != m:
            raise ValueError("braids must hold one Sigma letter per C-layer")
        if len(self.phi) != m + 1 or any(len(row) != n for row in self.phi):
            raise ValueError("phi must have m + 1 rows of n entries")
        if self.phi[0] != list(range(1, n + 1)):
            raise ValueError("phi row 0 must be the identity")
        for i, t in enumerate(self.braids.letters):
            swap = {t: t + 1, t + 1: t}
            expected = [swap.get(value, value) for value in self.phi[i]]
            if self.phi[i + 1] != expected:
                raise ValueError(f"phi row {i + 1} is not row {i} composed with ({t} {t + 1})")
        if [c.index for c in self.components] != list(range(1, n + 1)):
            raise ValueError("components must be theta_1 .. theta_n in order")
        return self


class Subtangle(BaseModel):
    """The subtangle theta-hat made of the components indexed by J0."""

    model_config = ConfigDict(frozen=True)

    parent: ThetaComplex
    subset: list[int] = Field(..., description="J0, sorted")

    @model_validator(mode="after")
    def check_subset(self) -> "Subtangle":
        if not self.subset:
            raise ValueError("J0 must be non-empty")
        if self.subset != sorted(set(self.subset)):
            raise ValueError("J0 must be sorted without repeats")
        if self.subset[0] < 1 or self.subset[-1] > self.parent.n:
            raise ValueError(f"J0 must lie in [1, {self.parent.n}]")
        return self

    @property
    def components(self) -> list[ThetaComponent]:
        return [self.parent.components[j - 1] for j in self.subset]


# =============================================================================
# Quotient Wiring Models
# =============================================================================

QuotientGroup = Literal["beta", "gamma", "delta", "omega"]


class QuotientArc(BaseModel):
    """A grouped arc of the ball tangle with its endpoint sites."""

    model_config = ConfigDict(frozen=True)

    group: QuotientGroup
    index: int = Field(..., ge=1)
    source_component: int = Field(..., ge=1, description="Component of the poly-excellent tangle")
    start: str = Field(..., description="Endpoint mark, e.g. 'outer:beta_1' or 'G1:beta_1'")
    end: str

    @property
    def name(self) -> str:
        return f"{self.group}_{self.index}"


class Identification(BaseModel):
    """A pair of marked endpoints glued by the identification of G_1 with G_2."""

    model_config = ConfigDict(frozen=True)

    first: str
    second: str


class QuotientComponent(BaseModel):
    """The arc rho_j obtained after identification."""

    model_config = ConfigDict(frozen=True)

    index: int = Field(..., ge=1)
    arcs: list[str]
    meridian_crossings: int = Field(..., ge=0)
    disk_crossings: list[int] = Field(default_factory=list, description="Crossings with D_1 .. D_nu")


class CompanionTorus(BaseModel):
    """Companion torus slot T_j with its compressing disk mark D_j."""

    model_config = ConfigDict(frozen=True)

    index: int = Field(..., ge=1)
    disk_mark: str
    label: Optional[str] = None
    ball_slot: bool = Field(False, description="Q_j union a neighborhood of D_j is a 3-ball")


class QuotientTangle(BaseModel):
    """The ball tangle of a solid torus construction and its identification data."""

    model_config = ConfigDict(frozen=True)

    scheme: Literal["three-group", "four-group"]
    nu: int = Field(..., ge=1)
    arcs: list[QuotientArc]
    identifications: list[Identification]
    components: list[QuotientComponent]
    tori: list[CompanionTorus] = Field(default_factory=list)

    @model_validator(mode="after")
    def check_scheme(self) -> "QuotientTangle":
        groups = 3 if self.scheme == "three-group" else 4
        if len(self.arcs) != groups * self.nu:
            raise ValueError(f"{self.scheme} wiring needs {groups * self.nu} arcs")
        if self.scheme == "three-group" and self.tori:
            raise ValueError("three-group wirings carry no companion tori")
        if self.scheme == "four-group" and len(self.tori) != self.nu:
            raise ValueError("four-group wirings carry one companion torus per arc")
        marks = [mark for pair in self.identifications for mark in (pair.first, pair.second)]
        if len(marks) != len(set(marks)):
            raise ValueError("identification must be a bijection of marked endpoints")
        return self


# =============================================================================
# Engulfing and Certificate Models
# =============================================================================

class OccupancyTrace(BaseModel):
    """Columns met by the subtangle at every layer, with running unions."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=2)
    subset: list[int]
    letters: list[int] = Field(..., description="Sigma index t of beta_i, i = 1..m")
    J: list[list[int]] = Field(..., description="J_0 .. J_m")
    I: list[list[int]] = Field(..., description="I_1 .. I_m")
    T: list[list[int]] = Field(..., description="T_0 .. T_m")
    S: list[list[int]] = Field(..., description="S_1 .. S_m")

    @model_validator(mode="after")
    def check_lengths(self) -> "OccupancyTrace":
        m = len(self.letters)
        if len(self.J) != m + 1 or len(self.T) != m + 1:
            raise ValueError("J and T need m + 1 entries")
        if len(self.I) != m or len(self.S) != m:
            raise ValueError("I and S need m entries")
        return self


class StepCase(BaseModel):
    """Classification and scratch block-sets of one inductive step i -> i + 1."""

    model_config = ConfigDict(frozen=True)

    index: int = Field(..., ge=0)
    t: int = Field(..., ge=1)
    case: Literal[1, 2, 3, 4]
    subcase: Optional[Literal["a", "b"]] = None
    t_minus_one_occupied: Optional[bool] = None
    t_plus_two_occupied: Optional[bool] = None
    scratch: dict[str, list[BlockId]] = Field(default_factory=dict)


class InterfaceComponent(BaseModel):
    """One component of a gluing surface."""

    model_config = ConfigDict(frozen=True)

    puncture_count: int = Field(..., ge=0)
    is_disk_portion: bool = True
    euler_characteristic: Optional[int] = Field(
        None, description="Euler characteristic of a component that is not a punctured disk"
    )

    @property
    def chi(self) -> Optional[int]:
        if self.is_disk_portion:
            return 1 - self.puncture_count
        return self.euler_characteristic


class GluingCheck(BaseModel):
    """Outcome of the negative Euler characteristic gluing test."""

    model_config = ConfigDict(frozen=True)

    interfaces: list[InterfaceComponent]
    verdict: Literal["pass", "fail"]
    reason: Optional[str] = None


class LeafNode(BaseModel):
    """Axiom leaf: consecutive components of one level tangle."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["leaf"] = "leaf"
    id: int = Field(..., ge=0)
    level: int = Field(..., ge=0)
    first_column: int = Field(..., ge=1)
    last_column: int = Field(..., ge=1)
    arcs_per_column: int = Field(..., ge=1)
    width: int = Field(..., ge=0, description="Number of consecutive level arcs met")
    column_width: int = Field(..., ge=1, description="Number of consecutive columns met")
    cells: list[BlockId]


class GlueNode(BaseModel):
    """Amalgamation of two regions along a gluing surface."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["glue"] = "glue"
    id: int = Field(..., ge=0)
    children: list[int]
    check: GluingCheck


class BallAdjunctionNode(BaseModel):
    """Adjunction of a ball disjoint from the subtangle along one disk."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["ball"] = "ball"
    id: int = Field(..., ge=0)
    child: int = Field(..., ge=0)
    blocks: list[BlockId]
    interface_count: int = Field(..., ge=0)
    final_pass: bool = False


CertificateNode = Annotated[Union[LeafNode, GlueNode, BallAdjunctionNode], Field(discriminator="kind")]


class ExcellenceCertificate(BaseModel):
    """Derivation tree proving the subtangle exterior excellent, stored flat."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=2)
    subset: list[int]
    steps: list[StepCase]
    nodes: list[CertificateNode]
    root: int = Field(..., ge=0)
    untouched_columns: list[int] = Field(default_factory=list)
    notes: list[str] = Field(default_factory=list)


# =============================================================================
# Isotopy Models
# =============================================================================

class RegionLadder(BaseModel):
    """Regions Y_0, Y_1, ... where Y_a meets Y_b only if |a - b| <= 1."""

    model_config = ConfigDict(frozen=True)

    region_count: int = Field(..., ge=1)
    unbounded: bool = False

    def contains(self, region: int) -> bool:
        return region >= 0 and (self.unbounded or region < self.region_count)

    def adjacent(self, a: int, b: int) -> bool:
        return abs(a - b) <= 1


class CurveNode(BaseModel):
    """An intersection curve with its nesting parents on both surfaces."""

    model_config = ConfigDict(frozen=True)

    id: int
    kind: Literal["circle", "arc"] = "circle"
    p_parent: Optional[int] = None
    q_parent: Optional[int] = None
    region: Optional[int] = None
    target: bool = False
    boundary_region: bool = False
    on_frontier: bool = True


class ParentRef(BaseModel):
    """Parent reference inside a periodic generator; ``shift`` counts periods."""

    model_config = ConfigDict(frozen=True)

    node: int
    shift: int = 0


class GeneratorNode(BaseModel):
    """A node of one period of an eventually periodic nesting pattern."""

    model_config = ConfigDict(frozen=True)

    id: int
    kind: Literal["circle", "arc"] = "circle"
    p_parent: Optional[ParentRef] = None
    q_parent: Optional[ParentRef] = None
    target: bool = False


class PeriodicNestingGenerator(BaseModel):
    """One period of a per-level generator, repeated every ``period`` levels."""

    model_config = ConfigDict(frozen=True)

    period: int = Field(..., ge=1)
    nodes: list[GeneratorNode]


class NestingForest(BaseModel):
    """Intersection curves of two surfaces with P-side and Q-side nesting."""

    model_config = ConfigDict(frozen=True)

    nodes: list[CurveNode] = Field(default_factory=list)
    generator: Optional[PeriodicNestingGenerator] = None

    @model_validator(mode="after")
    def check_forests(self) -> "NestingForest":
        ids = [node.id for node in self.nodes]
        if len(ids) != len(set(ids)):
            raise ValueError("node ids must be unique")
        known = set(ids)
        for side in ("p_parent", "q_parent"):
            parent = {node.id: getattr(node, side) for node in self.nodes}
            for node_id, parent_id in parent.items():
                if parent_id is not None and parent_id not in known:
                    raise ValueError(f"node {node_id}: unknown {side} {parent_id}")
            for start in ids:
                seen = {start}
                current = parent[start]
                while current is not None:
                    if current in seen:
                        raise ValueError(f"{side} links contain a cycle through node {current}")
                    seen.add(current)
                    current = parent[current]
        return self

    def node(self, node_id: int) -> CurveNode:
        for node in self.nodes:
            if node.id == node_id:
                return node
        raise KeyError(node_id)


class Push(BaseModel):
    """One local move removing a target node and whatever it carries along."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["disk push", "halfdisk push", "band push"]
    node: int
    removes: list[int]


class RegionPushes(BaseModel):
    model_config = ConfigDict(frozen=True)

    region: int
    pushes: list[Push]


class PushStage(BaseModel):
    model_config = ConfigDict(frozen=True)

    phase: Literal["even", "odd", "gap-even", "gap-odd"]
    entries: list[RegionPushes]


class PushSchedule(BaseModel):
    """Staged push list; entries of one stage have disjoint supports."""

    model_config = ConfigDict(frozen=True)

    stages: list[PushStage] = Field(default_factory=list)
    assumptions: list[str] = Field(default_factory=list)
    removed: list[int] = Field(default_factory=list)
    remaining: list[int] = Field(default_factory=list)

    @property
    def push_count(self) -> int:
        return sum(len(entry.pushes) for stage in self.stages for entry in stage.entries)


class NormalizationResult(BaseModel):
    """Standard position reached by deleting trivial curves."""

    model_config = ConfigDict(frozen=True)

    schedule: PushSchedule
    forest: NestingForest
    base_node: Optional[int] = None


class TraceCircle(BaseModel):
    """An intersection circle of a plane with the frontier surface F_level."""

    model_config = ConfigDict(frozen=True)

    id: int
    level: int
    bounds_disk_in_frontier: bool = False


class AnnulusTrace(BaseModel):
    """Intersection circles of a plane, in radial (nesting) order from J_0 outward."""

    model_config = ConfigDict(frozen=True)

    base_level: int
    circles: list[TraceCircle]
    redundant_pairs: list[tuple[int, int]] = Field(default_factory=list)

    def circles_at(self, level: int) -> list[TraceCircle]:
        return [circle for circle in self.circles if circle.level == level]


class AnnulusMove(BaseModel):
    """Removal of a redundant annulus together with everything nested inside it."""

    model_config = ConfigDict(frozen=True)

    level: int
    removed: list[int]
    span: tuple[int, int]


class TraceStage(BaseModel):
    model_config = ConfigDict(frozen=True)

    index: int
    phase: Literal["base", "even", "odd", "gap"]
    separation_levels: list[int]
    moves: list[AnnulusMove]


class PlaneMonotonization(BaseModel):
    model_config = ConfigDict(frozen=True)

    separation_indices: list[int]
    stages: list[TraceStage]
    trace: AnnulusTrace

    @property
    def moves(self) -> list[AnnulusMove]:
        return [move for stage in self.stages for move in stage.moves]


class Patch(BaseModel):
    """A patch of a partial plane between two frontier surfaces."""

    model_config = ConfigDict(frozen=True)

    id: int
    level: int = Field(..., ge=0)
    order: int = Field(..., ge=0, description="Number of frontier arcs")
    nested_arcs: bool = Field(False, description="Unfold instead of push when collapsing")


class PatchTree(BaseModel):
    """The dual tree of a partial plane, truncated at a depth."""

    model_config = ConfigDict(frozen=True)

    root: int
    patches: list[Patch]
    edges: list[tuple[int, int]]
    depth: Optional[int] = None

    @model_validator(mode="after")
    def check_edges(self) -> "PatchTree":
        level = {patch.id: patch.level for patch in self.patches}
        if len(level) != len(self.patches):
            raise ValueError("patch ids must be unique")
        if self.root not in level:
            raise ValueError(f"root {self.root} is not a patch")
        for a, b in self.edges:
            if a not in level or b not in level:
                raise ValueError(f"edge ({a}, {b}) references an unknown patch")
            if abs(level[a] - level[b]) != 1:
                raise ValueError(f"edge ({a}, {b}) joins non-adjacent levels")
        return self


class PatchMove(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["boundary slide", "band push", "band unfolding"]
    center: int
    level: int
    merged: list[int]
    result: int
    result_order: int
    center_order_after: Optional[int] = None


class PatchStage(BaseModel):
    model_config = ConfigDict(frozen=True)

    index: int
    levels: list[int]
    moves: list[PatchMove]


class PatchMonotonization(BaseModel):
    model_config = ConfigDict(frozen=True)

    stages: list[PatchStage]
    tree: PatchTree

    @property
    def moves(self) -> list[PatchMove]:
        return [move for stage in self.stages for move in stage.moves]


# =============================================================================
# Exhaustion Models
# =============================================================================

class SurfaceDescriptor(BaseModel):
    """A compact surface up to homeomorphism, tagged with the end it faces."""

    model_config = ConfigDict(frozen=True)

    orientable: bool = True
    genus_or_crosscaps: int = Field(..., ge=0)
    boundary_circles: int = Field(0, ge=0)
    end: int = Field(1, ge=1)

    @model_validator(mode="after")
    def check_crosscaps(self) -> "SurfaceDescriptor":
        if not self.orientable and self.genus_or_crosscaps < 1:
            raise ValueError("non-orientable surfaces need at least one crosscap")
        return self

    def euler_characteristic(self) -> int:
        if self.orientable:
            return 2 - 2 * self.genus_or_crosscaps - self.boundary_circles
        return 2 - self.genus_or_crosscaps - self.boundary_circles

    def is_disk(self) -> bool:
        return self.orientable and self.genus_or_crosscaps == 0 and self.boundary_circles == 1

    def is_planar(self) -> bool:
        return self.orientable and self.genus_or_crosscaps == 0


class SplittingRecord(BaseModel):
    """Splitting surface and residual surface recorded when planes are deleted."""

    model_config = ConfigDict(frozen=True)

    end: int
    splitting_surface: SurfaceDescriptor
    residual_surface: SurfaceDescriptor
    check: GluingCheck


class PieceDescriptor(BaseModel):
    """The piece X_{n+1} between two frontier levels, with declared flags."""

    model_config = ConfigDict(frozen=True)

    index: int = Field(..., ge=1)
    frontier_in: list[SurfaceDescriptor]
    frontier_out: list[SurfaceDescriptor]
    boundary_annuli_per_plane: list[int] = Field(default_factory=list)
    p2_irreducible: bool = False
    boundary_irreducible: bool = False
    anannular: bool = False
    is_product: bool = False
    excellent: bool = False
    frontier_incompressible: bool = False
    provenance: dict[str, str] = Field(default_factory=dict)
    splittings: list[SplittingRecord] = Field(default_factory=list)


class ExhaustionDescriptor(BaseModel):
    """An exhaustion C_0 ⊂ C_1 ⊂ ... described by its pieces."""

    model_config = ConfigDict(frozen=True)

    pieces: list[PieceDescriptor] = Field(..., min_length=1)
    end_count: int = Field(..., ge=1)
    planes_per_end: list[int]
    complement_components: list[int] = Field(default_factory=list)

    @model_validator(mode="after")
    def check_pieces(self) -> "ExhaustionDescriptor":
        if len(self.planes_per_end) != self.end_count:
            raise ValueError("planes_per_end needs one entry per end")
        if any(count < 0 for count in self.planes_per_end):
            raise ValueError("plane counts are non-negative")
        for previous, following in zip(self.pieces, self.pieces[1:]):
            if previous.frontier_out != following.frontier_in:
                raise ValueError(
                    f"pieces {previous.index} and {following.index} do not share a frontier"
                )
        return self

    def frontier_levels(self) -> list[list[SurfaceDescriptor]]:
        return [self.pieces[0].frontier_in] + [piece.frontier_out for piece in self.pieces]


class PiercingEntry(BaseModel):
    """Ray ``ray`` of end ``end`` crosses frontier level ``level`` in ``component``."""

    model_config = ConfigDict(frozen=True)

    level: int = Field(..., ge=0)
    end: int = Field(..., ge=1)
    ray: int = Field(..., ge=1)
    component: int = Field(..., ge=0, description="Index among that end's components")


class ExhaustionReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["good", "nice"]
    passed: bool
    failures: list[str] = Field(default_factory=list)
    implied: list[str] = Field(default_factory=list)


# =============================================================================
# Labeling Models
# =============================================================================

Bit = Literal[0, 1]


class TripleIndex(BaseModel):
    model_config = ConfigDict(frozen=True)

    i: int = Field(..., ge=1)
    j: int = Field(..., ge=1)
    n: int = Field(..., ge=1)


class EventuallyPeriodic(BaseModel):
    """Bit sequence indexed from 1: a finite prefix then a repeating period."""

    model_config = ConfigDict(frozen=True)

    prefix: list[Bit] = Field(default_factory=list)
    period: list[Bit] = Field(..., min_length=1)

    def value(self, index: int) -> int:
        if index < 1:
            raise ValueError("sequences are indexed from 1")
        if index <= len(self.prefix):
            return self.prefix[index - 1]
        return self.period[(index - len(self.prefix) - 1) % len(self.period)]


class SlotLabel(BaseModel):
    model_config = ConfigDict(frozen=True)

    i: int = Field(..., ge=1)
    j: int = Field(..., ge=1)
    sequence: EventuallyPeriodic


class BinaryLabeling(BaseModel):
    """A label function on triples (i, j, n), one sequence per plane slot (i, j)."""

    model_config = ConfigDict(frozen=True)

    mu: int = Field(..., ge=1)
    nu: list[int]
    slots: list[SlotLabel]

    @model_validator(mode="after")
    def check_shape(self) -> "BinaryLabeling":
        if len(self.nu) != self.mu or any(count < 1 for count in self.nu):
            raise ValueError("nu needs one positive entry per end")
        expected = [(i, j) for i in range(1, self.mu + 1) for j in range(1, self.nu[i - 1] + 1)]
        found = sorted((slot.i, slot.j) for slot in self.slots)
        if found != expected:
            raise ValueError("labeling must define exactly one sequence per slot (i, j)")
        return self

    def sequence(self, i: int, j: int) -> EventuallyPeriodic:
        for slot in self.slots:
            if slot.i == i and slot.j == j:
                return slot.sequence
        raise KeyError((i, j))


class TwistKnot(BaseModel):
    model_config = ConfigDict(frozen=True)

    parameter: int = Field(..., ge=3, description="Number of half-twists")
    name: str
    index: TripleIndex
    p: Bit


class TwistKnotCatalog(BaseModel):
    model_config = ConfigDict(frozen=True)

    entries: list[TwistKnot]


class AgreementResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    slot: tuple[int, int]
    agrees_from: Optional[int] = None
    infinite_disagreement: bool = False
    witness_residues: list[int] = Field(default_factory=list)
    modulus: int = Field(..., ge=1)


class ObstructionReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    obstructed: bool
    slots: list[tuple[int, int]]
    results: list[AgreementResult]


# =============================================================================
# Geometry and Diagram Models
# =============================================================================

class Polyline3(BaseModel):
    """A PL arc with exact rational vertices."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    component: int = Field(..., ge=1)
    vertices: list[Point3] = Field(..., min_length=2)

    @field_validator("vertices")
    @classmethod
    def check_distinct(cls, vertices: list[Point3]) -> list[Point3]:
        for position in range(1, len(vertices)):
            if vertices[position] == vertices[position - 1]:
                raise ValueError(f"vertices {position - 1} and {position} coincide")
        return vertices


class ProjectedArc(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    component: int = Field(..., ge=1)
    points: list[Point2] = Field(..., min_length=2)


class CrossingEnd(BaseModel):
    """Where a crossing sits on an arc: segment index and parameter in (0, 1)."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    component: int
    segment: int = Field(..., ge=0)
    parameter: Rational


class Crossing(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    id: int = Field(..., ge=1)
    over: CrossingEnd
    under: CrossingEnd
    x: Rational
    z: Rational
    sign: Literal[1, -1]


class DiagramProjection(BaseModel):
    """Projection along y of realized arcs, with crossings resolved by y-order."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    arcs: list[ProjectedArc] = Field(default_factory=list)
    crossings: list[Crossing] = Field(default_factory=list)
    shear: Rational = Fraction(0)
    width: Rational = Fraction(1)
    height: Rational = Fraction(1)


class PDCrossing(BaseModel):
    """Arc labels around a crossing, counterclockwise from the incoming under-strand."""

    model_config = ConfigDict(frozen=True)

    crossing: int
    ends: tuple[int, int, int, int]
    sign: Literal[1, -1]


class OpenEnd(BaseModel):
    model_config = ConfigDict(frozen=True)

    component: int
    start_label: int
    end_label: int


class DiagramCode(BaseModel):
    model_config = ConfigDict(frozen=True)

    crossings: list[PDCrossing] = Field(default_factory=list)
    open_ends: list[OpenEnd] = Field(default_factory=list)
    gauss: list[list[int]] = Field(default_factory=list)


# =============================================================================
# CLI Models
# =============================================================================

class CommandRequest(BaseModel):
    """A parsed command line."""

    subcommand: str = Field(..., min_length=1)
    action: Optional[str] = None
    parameters: dict[str, Any] = Field(default_factory=dict)
    input_path: Optional[str] = None
    output_path: Optional[str] = None
    verbosity: int = Field(0, ge=0)
