"""Solid-torus quotient wirings and knot-space insertion.

A ball B carries a poly-excellent tangle whose components are split into
groups. Two disks G_1, G_2 on the boundary of B are identified to produce a
solid torus whose meridian disk is their common image G. Every quotient arc
rho_j is the union of the j-th arcs of each group.

Three-group wiring: beta_j and gamma_j run from int G_1 to the rest of the
boundary, delta_j runs from int G_2 back to int G_2; rho_j meets G twice.

Four-group wiring: G_1 and G_2 meet the ball in disks D_{1,j}, D_{2,j} and a
holed disk H_1, H_2; beta_j runs from the outer boundary to D_{1,j},
gamma_j from D_{2,j} to D_{2,j}, delta_j from D_{1,j} to H_1 and omega_j
from H_2 to the outer boundary. rho_j meets G three times and the disk
D_j (image of D_{1,j}) twice, and misses D_i for i != j.
"""

from typing import Iterable

from polytangle.services.engulf import check_gluing
from polytangle.utils.exceptions import PolytangleError
from polytangle.utils.logger import get_logger
from polytangle.utils.models import (
    CompanionTorus,
    GluingCheck,
    Identification,
    InterfaceComponent,
    QuotientArc,
    QuotientComponent,
    QuotientTangle,
    SurfaceDescriptor,
)

logger = get_logger(__name__)

THREE_GROUPS = ("beta", "gamma", "delta")
FOUR_GROUPS = ("beta", "gamma", "delta", "omega")


def _three_group(nu: int) -> QuotientTangle:
    arcs: list[QuotientArc] = []
    identifications: list[Identification] = []
    for j in range(1, nu + 1):
        base = 3 * (j - 1)
        arcs.append(QuotientArc(group="beta", index=j, source_component=base + 1,
                                start=f"outer:beta_{j}", end=f"G1:beta_{j}"))
        arcs.append(QuotientArc(group="gamma", index=j, source_component=base + 2,
                                start=f"G1:gamma_{j}", end=f"outer:gamma_{j}"))
        arcs.append(QuotientArc(group="delta", index=j, source_component=base + 3,
                                start=f"G2:delta_{j}:0", end=f"G2:delta_{j}:1"))
        identifications.append(Identification(first=f"G1:beta_{j}", second=f"G2:delta_{j}:0"))
        identifications.append(Identification(first=f"G1:gamma_{j}", second=f"G2:delta_{j}:1"))
    components = _trace_components(nu, arcs, identifications, THREE_GROUPS)
    return QuotientTangle(scheme="three-group", nu=nu, arcs=arcs,
                          identifications=identifications, components=components)


def _four_group(nu: int) -> QuotientTangle:
    arcs: list[QuotientArc] = []
    identifications: list[Identification] = []
    for j in range(1, nu + 1):
        base = 4 * (j - 1)
        arcs.append(QuotientArc(group="beta", index=j, source_component=base + 1,
                                start=f"outer:beta_{j}", end=f"D1_{j}:beta_{j}"))
        arcs.append(QuotientArc(group="gamma", index=j, source_component=base + 2,
                                start=f"D2_{j}:gamma_{j}:0", end=f"D2_{j}:gamma_{j}:1"))
        arcs.append(QuotientArc(group="delta", index=j, source_component=base + 3,
                                start=f"D1_{j}:delta_{j}", end=f"H1:delta_{j}"))
        arcs.append(QuotientArc(group="omega", index=j, source_component=base + 4,
                                start=f"H2:omega_{j}", end=f"outer:omega_{j}"))
        identifications.append(Identification(first=f"D1_{j}:beta_{j}", second=f"D2_{j}:gamma_{j}:0"))
        identifications.append(Identification(first=f"D1_{j}:delta_{j}", second=f"D2_{j}:gamma_{j}:1"))
        identifications.append(Identification(first=f"H1:delta_{j}", second=f"H2:omega_{j}"))
    components = _trace_components(nu, arcs, identifications, FOUR_GROUPS)
    tori = [CompanionTorus(index=j, disk_mark=f"D_{j}") for j in range(1, nu + 1)]
    return QuotientTangle(scheme="four-group", nu=nu, arcs=arcs, identifications=identifications,
                          components=components, tori=tori)


def _disk_of(mark: str) -> str:
    """Which disk of the meridian a marked endpoint lies on, after identification."""
    site = mark.split(":", 1)[0]
    if site in ("G1", "G2"):
        return "G"
    if site in ("H1", "H2"):
        return "H"
    return "D_" + site.split("_", 1)[1]


def _trace_components(nu: int, arcs: list[QuotientArc], identifications: list[Identification],
                      groups: tuple[str, ...]) -> list[QuotientComponent]:
    """Follow arcs through identified endpoints from one outer endpoint to the other."""
    partner = {}
    for pair in identifications:
        partner[pair.first] = pair.second
        partner[pair.second] = pair.first
    arc_at = {}
    for arc in arcs:
        arc_at[arc.start] = (arc, arc.end)
        arc_at[arc.end] = (arc, arc.start)
    components = []
    for j in range(1, nu + 1):
        mark = f"outer:beta_{j}"
        order: list[str] = []
        crossings: list[str] = []
        while True:
            arc, far = arc_at[mark]
            order.append(arc.name)
            if far.startswith("outer:"):
                break
            crossings.append(_disk_of(far))
            mark = partner[far]
        if sorted(order) != sorted(f"{group}_{j}" for group in groups):
            raise PolytangleError(f"rho_{j} picks up arcs {order}")
        disk_crossings = [crossings.count(f"D_{i}") for i in range(1, nu + 1)] if "omega" in groups else []
        components.append(QuotientComponent(index=j, arcs=order, meridian_crossings=len(crossings),
                                            disk_crossings=disk_crossings))
    return components


def wire_solid_torus(scheme: str, nu: int) -> QuotientTangle:
    """Wire a three-group or four-group quotient tangle with nu quotient arcs.

    Args:
        scheme: "three-group" or "four-group"
        nu: Number of quotient arcs, at least 1

    Returns:
        QuotientTangle with identification data and traced components

    Raises:
        ValueError: If nu < 1 or the scheme is unknown
        PolytangleError: If the wiring does not check out
    """
    if nu < 1:
        raise ValueError(f"nu must be at least 1, got {nu}")
    if scheme == "three-group":
        tangle = _three_group(nu)
    elif scheme == "four-group":
        tangle = _four_group(nu)
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    valid, message = check_wiring(tangle)
    if not valid:
        raise PolytangleError(message)
    logger.info(f"Wired {scheme} quotient tangle with nu={nu}")
    return tangle


def check_wiring(tangle: QuotientTangle) -> tuple[bool, str]:
    """Re-check crossing counts of a wiring.

    Returns:
        Tuple of (is_valid, error_message)
    """
    for component in tangle.components:
        if tangle.scheme == "three-group":
            if component.meridian_crossings != 2:
                return False, f"rho_{component.index} meets the meridian disk {component.meridian_crossings} times"
            continue
        if component.meridian_crossings != 3:
            return False, f"rho_{component.index} meets the meridian disk {component.meridian_crossings} times"
        for i, count in enumerate(component.disk_crossings, start=1):
            expected = 2 if i == component.index else 0
            if count != expected:
                return False, f"D_{i} meets rho_{component.index} {count} times, expected {expected}"
    return True, ""


def splitting_surfaces(tangle: QuotientTangle, subset: Iterable[int]) -> list[SurfaceDescriptor]:
    """Surfaces along which the exterior of a k-subset of the rho_j splits.

    Three-group: the meridian disk with 2k holes. Four-group: k disks D_j
    with two holes each, and the rest of the meridian with 2k holes.

    Raises:
        ValueError: If the subset is empty or out of range
    """
    chosen = sorted(set(subset))
    if not chosen or chosen[0] < 1 or chosen[-1] > tangle.nu:
        raise ValueError(f"subset must be a non-empty subset of [1, {tangle.nu}]")
    k = len(chosen)
    holed = SurfaceDescriptor(orientable=True, genus_or_crosscaps=0, boundary_circles=2 * k + 1)
    if tangle.scheme == "three-group":
        return [holed]
    disks = [SurfaceDescriptor(orientable=True, genus_or_crosscaps=0, boundary_circles=3) for _ in chosen]
    return disks + [holed]


def check_quotient_gluing(tangle: QuotientTangle, subset: Iterable[int]) -> GluingCheck:
    """Negative Euler characteristic check on the splitting surfaces of a subset."""
    interfaces = [
        InterfaceComponent(puncture_count=surface.boundary_circles - 1, is_disk_portion=True)
        for surface in splitting_surfaces(tangle, subset)
    ]
    return check_gluing(interfaces)


def insert_knot_spaces(tangle: QuotientTangle, labels: list[str]) -> QuotientTangle:
    """Attach one knot label per companion torus, in order.

    Each labeled slot records that Q_j together with a neighborhood of D_j
    is a 3-ball.

    Raises:
        ValueError: If the scheme is three-group or the label count is wrong
    """
    if tangle.scheme != "four-group":
        raise ValueError("knot spaces are inserted into four-group wirings only")
    if len(labels) != len(tangle.tori):
        raise ValueError(f"expected {len(tangle.tori)} labels, got {len(labels)}")
    tori = [torus.model_copy(update={"label": label, "ball_slot": True})
            for torus, label in zip(tangle.tori, labels)]
    return tangle.model_copy(update={"tori": tori})
