"""Diagram codes and SVG rendering for projected tangles.

Edge labels run along each component in order: component 1 starts at
label 1 and every crossing passage bumps the label, so a component with k
passages uses labels L .. L + k and leaves open ends L and L + k.

PD tuples list the four edge labels counterclockwise in the drawing plane
(x to the right, z downward on the page), starting from the incoming
under-edge.
"""

import math
from pathlib import Path
from typing import Optional, Union

from jinja2 import Environment, FileSystemLoader, select_autoescape

from polytangle.services.geometry import project, realize
from polytangle.utils.config import get_settings
from polytangle.utils.logger import get_logger
from polytangle.utils.models import (
    Crossing,
    DiagramCode,
    DiagramProjection,
    OpenEnd,
    PDCrossing,
    ProjectedArc,
    Subtangle,
    ThetaComplex,
)

logger = get_logger(__name__)

TEMPLATE_DIR = Path(__file__).resolve().parent.parent / "templates"
SVG_TEMPLATE = "diagram.svg.j2"
SVG_MARGIN = 1.0
PALETTE = ("#1f4e79", "#a23b2a", "#2e7d32", "#6a1b9a", "#b26a00", "#00695c", "#4e342e", "#37474f")

_environment = Environment(
    loader=FileSystemLoader(str(TEMPLATE_DIR)),
    autoescape=select_autoescape(["svg", "j2"]),
    trim_blocks=True,
    lstrip_blocks=True,
    keep_trailing_newline=True,
)


# =============================================================================
# Codes
# =============================================================================

def _passages(projection: DiagramProjection) -> dict[int, list[tuple]]:
    """Per component, the crossing passages sorted along the arc."""
    arcs = {arc.component: arc for arc in projection.arcs}
    if len(arcs) != len(projection.arcs):
        raise ValueError("diagram lists a component twice")
    seen: set[int] = set()
    passages: dict[int, list[tuple]] = {component: [] for component in arcs}
    for crossing in projection.crossings:
        if crossing.id in seen:
            raise ValueError(f"crossing id {crossing.id} is repeated")
        seen.add(crossing.id)
        for role, end in (("over", crossing.over), ("under", crossing.under)):
            arc = arcs.get(end.component)
            if arc is None:
                raise ValueError(f"crossing {crossing.id} refers to missing component {end.component}")
            if end.segment >= len(arc.points) - 1:
                raise ValueError(f"crossing {crossing.id} refers to segment {end.segment} past the end of "
                                 f"component {end.component}")
            if not 0 < end.parameter < 1:
                raise ValueError(f"crossing {crossing.id} sits at a segment endpoint")
            passages[end.component].append((end.segment, end.parameter, crossing.id, role))
    for component in passages:
        passages[component].sort()
    return passages


def _direction(arc: ProjectedArc, segment: int) -> tuple:
    p, q = arc.points[segment], arc.points[segment + 1]
    return q[0] - p[0], p[1] - q[1]


def encode_diagram(projection: DiagramProjection) -> DiagramCode:
    """PD tuples, open ends and Gauss sequences of a generic diagram.

    Raises:
        ValueError: If a crossing refers to a missing arc or segment, sits on
            a vertex, or an id repeats
    """
    passages = _passages(projection)
    arcs = {arc.component: arc for arc in projection.arcs}
    labels: dict[tuple[int, str], tuple[int, int]] = {}
    open_ends, gauss = [], []
    label = 1
    for arc in projection.arcs:
        start = label
        sequence = []
        for _, _, crossing_id, role in passages[arc.component]:
            labels[(crossing_id, role)] = (label, label + 1)
            sequence.append(crossing_id if role == "over" else -crossing_id)
            label += 1
        open_ends.append(OpenEnd(component=arc.component, start_label=start, end_label=label))
        gauss.append(sequence)
        label += 1

    crossings = []
    for crossing in sorted(projection.crossings, key=lambda item: item.id):
        under_in, under_out = labels[(crossing.id, "under")]
        over_in, over_out = labels[(crossing.id, "over")]
        u = _direction(arcs[crossing.under.component], crossing.under.segment)
        v = _direction(arcs[crossing.over.component], crossing.over.segment)
        if u[0] * v[1] - u[1] * v[0] > 0:
            ends = (under_in, over_in, under_out, over_out)
        else:
            ends = (under_in, over_out, under_out, over_in)
        crossings.append(PDCrossing(crossing=crossing.id, ends=ends, sign=crossing.sign))
    code = DiagramCode(crossings=crossings, open_ends=open_ends, gauss=gauss)
    logger.debug(f"Encoded {len(crossings)} crossings on {len(open_ends)} arcs")
    return code


def arc_end_count(code: DiagramCode) -> int:
    return sum(len(crossing.ends) for crossing in code.crossings)


def pd_text(code: DiagramCode) -> str:
    """One ``X[a,b,c,d]`` line per crossing, then one ``P[start,end]`` line per open arc."""
    lines = [f"X[{','.join(str(label) for label in crossing.ends)}]" for crossing in code.crossings]
    lines += [f"P[{end.start_label},{end.end_label}]" for end in code.open_ends]
    return "\n".join(lines) + "\n" if lines else ""


def gauss_text(code: DiagramCode) -> str:
    """One line per component: its signed crossing sequence, over positive."""
    return "".join(" ".join(str(entry) for entry in sequence) + "\n" for sequence in code.gauss)


def diagram_from_theta(source: Union[ThetaComplex, Subtangle]) -> tuple[DiagramProjection, DiagramCode]:
    """Realize, project and encode in one call."""
    projection = project(realize(source))
    return projection, encode_diagram(projection)


# =============================================================================
# SVG
# =============================================================================

def _under_cuts(projection: DiagramProjection) -> dict[tuple[int, int], list[float]]:
    cuts: dict[tuple[int, int], list[float]] = {}
    for crossing in projection.crossings:
        key = (crossing.under.component, crossing.under.segment)
        cuts.setdefault(key, []).append(float(crossing.under.parameter))
    return cuts


def _strokes(arc: ProjectedArc, cuts: dict[tuple[int, int], list[float]], gap: float) -> list[list[tuple]]:
    """Split an arc into drawn pieces, leaving a gap around each under-passage."""
    points = [(float(x), float(z)) for x, z in arc.points]
    pieces: list[list[tuple]] = [[points[0]]]
    for segment, (p, q) in enumerate(zip(points, points[1:])):
        length = math.hypot(q[0] - p[0], q[1] - p[1])
        half = min(gap / length, 0.5) if length else 0.0
        for t in sorted(cuts.get((arc.component, segment), ())):
            stop, resume = max(t - half, 0.0), min(t + half, 1.0)
            pieces[-1].append((p[0] + (q[0] - p[0]) * stop, p[1] + (q[1] - p[1]) * stop))
            pieces.append([(p[0] + (q[0] - p[0]) * resume, p[1] + (q[1] - p[1]) * resume)])
        pieces[-1].append(q)
    return [piece for piece in pieces if len(piece) > 1]


def _path_data(piece: list[tuple], scale: float) -> str:
    coordinates = [f"{SVG_MARGIN * scale + x * scale:.3f} {SVG_MARGIN * scale + z * scale:.3f}" for x, z in piece]
    return "M " + " L ".join(coordinates)


def render_svg(projection: DiagramProjection, scale: Optional[float] = None, title: Optional[str] = None) -> str:
    """SVG 1.1 document of the diagram, under-strands broken at every crossing.

    Output depends only on the projection and the rendering settings.
    """
    settings = get_settings()
    scale = scale or settings.svg_scale
    gap = float(settings.gap_fraction)
    cuts = _under_cuts(projection)
    strands = []
    for position, arc in enumerate(projection.arcs):
        strands.append({
            "component": arc.component,
            "color": PALETTE[position % len(PALETTE)],
            "paths": [_path_data(piece, scale) for piece in _strokes(arc, cuts, gap)],
        })
    document = _environment.get_template(SVG_TEMPLATE).render(
        width=f"{(float(projection.width) + 2 * SVG_MARGIN) * scale:.3f}",
        height=f"{(float(projection.height) + 2 * SVG_MARGIN) * scale:.3f}",
        stroke_width=f"{settings.svg_stroke_width:.3f}",
        title=title or "polytangle diagram",
        strands=strands,
        crossing_count=len(projection.crossings),
    )
    logger.info(f"Rendered {len(strands)} strands and {len(projection.crossings)} crossings")
    return document


def crossings_on(projection: DiagramProjection, component: int) -> list[Crossing]:
    return [c for c in projection.crossings if component in (c.over.component, c.under.component)]


if __name__ == "__main__":
    from polytangle.services.tangle import build_theta

    projection, code = diagram_from_theta(build_theta(2))
    print(pd_text(code))
    print(gauss_text(code))
