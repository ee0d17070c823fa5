"""Exhaustion descriptors: good/nice validators and frontier bookkeeping.

An exhaustion C_0 ⊂ C_1 ⊂ ... of a non-compact 3-manifold is described by
its pieces X_{n+1} = C_{n+1} - Int C_n together with the frontier surfaces
between them. Topological properties of a piece (irreducibility,
anannularity, excellence) are declared flags with provenance strings; this
module checks only what Euler characteristic, genus and count arithmetic
can check.
"""

from typing import Optional

from polytangle.services.engulf import check_gluing
from polytangle.utils.exceptions import ExhaustionPreconditionError
from polytangle.utils.logger import get_logger
from polytangle.utils.models import (
    ExhaustionDescriptor,
    ExhaustionReport,
    GluingCheck,
    InterfaceComponent,
    PieceDescriptor,
    PiercingEntry,
    SplittingRecord,
    SurfaceDescriptor,
)

logger = get_logger(__name__)

GOOD_IMPLIED = ("eventually end-irreducible", "eventually P²-irreducible", "not almost compact")
NICE_IMPLIED = ("anannular at infinity", "good exhaustion")


def euler_characteristic(surface: SurfaceDescriptor) -> int:
    """2 - 2g - b for orientable surfaces, 2 - c - b otherwise."""
    return surface.euler_characteristic()


def _frontier_failures(ex: ExhaustionDescriptor, strict: bool) -> list[str]:
    failures = []
    for level, components in enumerate(ex.frontier_levels()):
        for position, surface in enumerate(components):
            where = f"frontier level {level}, component {position}"
            chi = surface.euler_characteristic()
            if surface.is_disk():
                failures.append(f"{where} is a disk")
            elif surface.boundary_circles == 0 and chi == 2:
                failures.append(f"{where} is a sphere")
            if strict:
                if chi >= 0 and not surface.is_disk():
                    failures.append(f"{where} has Euler characteristic {chi} >= 0")
                if surface.orientable and surface.genus_or_crosscaps == 0:
                    failures.append(f"{where} is orientable of genus 0")
    return failures


def check_good(ex: ExhaustionDescriptor) -> ExhaustionReport:
    """Check the conditions of a good exhaustion.

    No frontier component may be a disk or a sphere, every piece must be
    declared P²-irreducible with incompressible frontier, and no piece may
    be a product. Boundary-irreducibility of a piece counts as frontier
    incompressibility.

    Returns:
        ExhaustionReport naming every failed condition
    """
    failures = _frontier_failures(ex, strict=False)
    for piece in ex.pieces:
        if not piece.p2_irreducible:
            failures.append(f"piece {piece.index} is not declared P²-irreducible")
        if piece.is_product:
            failures.append(f"piece {piece.index} has the form F × I")
        if not (piece.frontier_incompressible or piece.boundary_irreducible):
            failures.append(f"piece {piece.index} does not declare its frontier incompressible")
    passed = not failures
    return ExhaustionReport(kind="good", passed=passed, failures=failures,
                            implied=list(GOOD_IMPLIED) if passed else [])


def check_nice(ex: ExhaustionDescriptor) -> ExhaustionReport:
    """Check the conditions of a nice exhaustion.

    Every frontier component has negative Euler characteristic and positive
    genus when orientable, each piece meets each boundary plane in exactly
    one annulus, the complement of every C_n has one component per end, and
    each piece is declared P²-irreducible, ∂-irreducible and anannular.

    Returns:
        ExhaustionReport naming every failed condition
    """
    failures = _frontier_failures(ex, strict=True)
    planes = sum(ex.planes_per_end)
    for piece in ex.pieces:
        annuli = piece.boundary_annuli_per_plane
        if len(annuli) != planes:
            failures.append(f"piece {piece.index} records annuli for {len(annuli)} of {planes} boundary planes")
        for plane, count in enumerate(annuli, start=1):
            if count != 1:
                failures.append(f"piece {piece.index} meets boundary plane {plane} in {count} annuli")
        for flag, label in (("p2_irreducible", "P²-irreducible"), ("boundary_irreducible", "∂-irreducible"),
                            ("anannular", "anannular")):
            if not getattr(piece, flag):
                failures.append(f"piece {piece.index} is not declared {label}")
        if piece.is_product:
            failures.append(f"piece {piece.index} is declared a product, which is never anannular")
    levels = len(ex.frontier_levels())
    if len(ex.complement_components) != levels:
        failures.append(f"complement component counts recorded for {len(ex.complement_components)} of {levels} levels")
    for level, count in enumerate(ex.complement_components):
        if count != ex.end_count:
            failures.append(f"M - Int C_{level} has {count} components, expected {ex.end_count}")
    passed = not failures
    return ExhaustionReport(kind="nice", passed=passed, failures=failures,
                            implied=list(NICE_IMPLIED) if passed else [])


# =============================================================================
# Ray carving
# =============================================================================

def _default_piercing(ex: ExhaustionDescriptor, nu: list[int]) -> list[PiercingEntry]:
    entries = []
    for level, components in enumerate(ex.frontier_levels()):
        for end in range(1, ex.end_count + 1):
            if nu[end - 1] == 0:
                continue
            facing = [surface for surface in components if surface.end == end]
            if len(facing) != 1:
                raise ValueError(
                    f"frontier level {level} has {len(facing)} components facing end {end}; "
                    "the piercing map must be given explicitly"
                )
            entries.extend(PiercingEntry(level=level, end=end, ray=ray, component=0)
                           for ray in range(1, nu[end - 1] + 1))
    return entries


def carve_rays(
    ex: ExhaustionDescriptor,
    nu: list[int],
    piercing: Optional[list[PiercingEntry]] = None,
) -> ExhaustionDescriptor:
    """Remove nu_i proper rays from each end and return the exterior's exhaustion.

    Every frontier component gains one boundary circle per ray piercing it.
    The pieces of the exterior are excellent and meet each new boundary
    plane in one annulus.

    Args:
        ex: Nice exhaustion of the manifold before carving
        nu: Number of rays per end
        piercing: Where each ray crosses each frontier level; defaults to
            the unique component facing the ray's end

    Returns:
        Descriptor of the exterior

    Raises:
        ValueError: If nu has the wrong length or the piercing map is incomplete
        ExhaustionPreconditionError: If a frontier component has non-negative
            Euler characteristic or is an orientable genus-0 surface
    """
    if len(nu) != ex.end_count or any(count < 0 for count in nu):
        raise ValueError(f"nu needs {ex.end_count} non-negative entries, got {nu}")
    if not any(nu):
        return ex
    frontiers = ex.frontier_levels()
    for level, components in enumerate(frontiers):
        for position, surface in enumerate(components):
            if nu[surface.end - 1] == 0:
                continue
            chi = surface.euler_characteristic()
            where = f"frontier level {level}, end {surface.end}, component {position}"
            if chi >= 0:
                raise ExhaustionPreconditionError(f"{where} has Euler characteristic {chi} >= 0")
            if surface.orientable and surface.genus_or_crosscaps == 0:
                raise ExhaustionPreconditionError(f"{where} has genus 0")

    entries = piercing if piercing is not None else _default_piercing(ex, nu)
    expected = {(level, end, ray) for level in range(len(frontiers))
                for end in range(1, ex.end_count + 1) for ray in range(1, nu[end - 1] + 1)}
    found = [(entry.level, entry.end, entry.ray) for entry in entries]
    if sorted(found) != sorted(expected):
        raise ValueError("piercing map must place every ray exactly once on every frontier level")

    holes: dict[tuple[int, int], int] = {}
    for entry in entries:
        facing = [position for position, surface in enumerate(frontiers[entry.level]) if surface.end == entry.end]
        if entry.component >= len(facing):
            raise ValueError(f"frontier level {entry.level} has no component {entry.component} facing end {entry.end}")
        key = (entry.level, facing[entry.component])
        holes[key] = holes.get(key, 0) + 1

    carved = [
        [surface.model_copy(update={"boundary_circles": surface.boundary_circles + holes.get((level, position), 0)})
         for position, surface in enumerate(components)]
        for level, components in enumerate(frontiers)
    ]
    provenance = {
        "excellent": "exterior of rays homotopic rel boundary to an excellent 1-manifold",
        "p2_irreducible": "implied by excellence",
        "boundary_irreducible": "implied by excellence",
        "anannular": "implied by excellence",
    }
    pieces = [
        piece.model_copy(update={
            "frontier_in": carved[position],
            "frontier_out": carved[position + 1],
            "boundary_annuli_per_plane": [1] * sum(nu),
            "excellent": True,
            "p2_irreducible": True,
            "boundary_irreducible": True,
            "anannular": True,
            "frontier_incompressible": True,
            "is_product": False,
            "provenance": {**piece.provenance, **provenance},
        })
        for position, piece in enumerate(ex.pieces)
    ]
    result = ExhaustionDescriptor(pieces=pieces, end_count=ex.end_count, planes_per_end=list(nu),
                                  complement_components=[ex.end_count] * len(frontiers))
    logger.info(f"Carved {sum(nu)} rays through {len(frontiers)} frontier levels")
    return result


# =============================================================================
# Plane deletion
# =============================================================================

def splitting_check(surfaces: list[SurfaceDescriptor]) -> GluingCheck:
    """Negative Euler characteristic check on closed-up splitting surfaces."""
    interfaces = [
        InterfaceComponent(puncture_count=surface.boundary_circles, is_disk_portion=False,
                           euler_characteristic=surface.euler_characteristic())
        for surface in surfaces
    ]
    return check_gluing(interfaces)


def residual_surface(kept: int, end: int = 1) -> SurfaceDescriptor:
    """Orientable surface of genus kept - 1 with two boundary circles."""
    if kept < 1:
        raise ValueError(f"at least one plane must be kept, got {kept}")
    return SurfaceDescriptor(orientable=True, genus_or_crosscaps=kept - 1, boundary_circles=2, end=end)


def delete_planes(ex: ExhaustionDescriptor, kept: list[int]) -> ExhaustionDescriptor:
    """Fill in all but nu'_i boundary planes of each end.

    For every end that loses planes, each piece records the surface along
    which the modified piece splits (a torus or Klein bottle minus two
    disks) and the residual surface, and the splitting surface is checked
    to have negative Euler characteristic.

    Args:
        ex: Nice exhaustion of the exterior
        kept: nu'_i per end, 1 <= nu'_i <= nu_i

    Returns:
        Descriptor with planes_per_end = kept; the input itself when nothing
        is deleted

    Raises:
        ValueError: If a kept count is out of range
        ExhaustionPreconditionError: If a splitting surface fails the check
    """
    if len(kept) != ex.end_count:
        raise ValueError(f"kept needs one entry per end ({ex.end_count}), got {kept}")
    for end, (count, total) in enumerate(zip(kept, ex.planes_per_end), start=1):
        if not 1 <= count <= total:
            raise ValueError(f"end {end}: kept plane count {count} outside [1, {total}]")
    if list(kept) == list(ex.planes_per_end):
        return ex

    pieces = []
    for piece in ex.pieces:
        records = list(piece.splittings)
        for end, (count, total) in enumerate(zip(kept, ex.planes_per_end), start=1):
            if count == total:
                continue
            facing = [surface for surface in piece.frontier_in + piece.frontier_out if surface.end == end]
            orientable = all(surface.orientable for surface in facing)
            splitting = SurfaceDescriptor(orientable=orientable, genus_or_crosscaps=1 if orientable else 2,
                                          boundary_circles=2, end=end)
            check = splitting_check([splitting])
            if check.verdict != "pass":
                raise ExhaustionPreconditionError(f"piece {piece.index}, end {end}: {check.reason}")
            records.append(SplittingRecord(end=end, splitting_surface=splitting,
                                           residual_surface=residual_surface(count, end), check=check))
        annuli = [1] * sum(kept) if piece.boundary_annuli_per_plane else []
        pieces.append(piece.model_copy(update={"splittings": records, "boundary_annuli_per_plane": annuli}))
    logger.info(f"Deleted planes: kept {kept} of {ex.planes_per_end}")
    return ex.model_copy(update={"pieces": pieces, "planes_per_end": list(kept)})


if __name__ == "__main__":
    genus_two = SurfaceDescriptor(orientable=True, genus_or_crosscaps=2)
    piece = PieceDescriptor(index=1, frontier_in=[genus_two], frontier_out=[genus_two],
                            p2_irreducible=True, frontier_incompressible=True)
    exhaustion = ExhaustionDescriptor(pieces=[piece], end_count=1, planes_per_end=[0])
    print(check_good(exhaustion).model_dump())
    carved = carve_rays(exhaustion, [3])
    print(check_nice(carved).model_dump())
    print(delete_planes(carved, [2]).pieces[0].splittings[0].model_dump())
