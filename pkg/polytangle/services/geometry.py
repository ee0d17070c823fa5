"""PL realization of theta on the integer lattice and its projection along y.

Every coordinate is an exact rational. Each level segment is drawn as a
long trefoil: a three-crossing template placed inside its block column and
joined to the segment's lattice endpoints. Braid strands run straight down
their slot except inside a letter, where the strand moving right crosses in
front (y = 1/2) and the strand moving left behind (y = -1/2).

Projection drops y: a point (x, y, z) lands at (x + s * y, z) where the
shear s is 0 unless the plain projection is degenerate.
"""

from fractions import Fraction
from typing import Iterable, Optional, Union

from polytangle.services.braid import expand_group_letter
from polytangle.utils.config import get_settings
from polytangle.utils.exceptions import NonGenericProjection, TemplateFailure
from polytangle.utils.logger import get_logger
from polytangle.utils.models import (
    BraidStrand,
    Crossing,
    CrossingEnd,
    DiagramProjection,
    LevelSegment,
    Point3,
    Polyline3,
    ProjectedArc,
    Subtangle,
    ThetaComplex,
)

logger = get_logger(__name__)

F = Fraction
Point2 = tuple[Fraction, Fraction]

# Long trefoil in local (u, v, y): enters at (0, 0), leaves at (3, 0), three
# alternating crossings at u = 1/2, 3/2, 5/2, closing loop over the top.
TEMPLATE = (
    (F(0), F(0), F(1, 2)),
    (F(1), F(1), F(0)),
    (F(2), F(0), F(-1, 2)),
    (F(3), F(1), F(3, 4)),
    (F(3, 2), F(2), F(0)),
    (F(0), F(1), F(-1, 2)),
    (F(1), F(0), F(0)),
    (F(2), F(1), F(1, 2)),
    (F(3), F(0), F(-1, 2)),
)
TEMPLATE_CROSSINGS = 3
LETTER_SLOTS = 10
LETTER_HALF = F(1, 20)
LETTER_RAMP = F(1, 40)


# =============================================================================
# Realization
# =============================================================================

def lattice_point(p: int, q: int) -> Point3:
    """The lattice point x_{p,q} = (3q - 1, 0, p)."""
    return (F(3 * q - 1), F(0), F(p))


def _template(x0: Fraction, su: Fraction, z0: Fraction, sv: Fraction) -> list[Point3]:
    return [(x0 + su * u, y, z0 + sv * v) for u, v, y in TEMPLATE]


def _top_alpha(level: int, column: int) -> list[Point3]:
    top, j = 2 * level, column
    return ([(F(9 * j - 7), F(0), F(top))]
            + _template(F(18 * j - 13, 2), F(2, 3), top + F(1, 4), F(1, 8))
            + [(F(9 * j - 4), F(0), top + F(7, 12)), (F(9 * j - 7), F(0), top + F(7, 12)),
               (F(9 * j - 7), F(0), F(top + 1))])


def segment_path(kind: str, segment: LevelSegment) -> list[Point3]:
    """Polyline of a level segment, from its start point to its end point.

    Within column j the delta arc hangs from the top face over
    x in [9j - 13/2, 9j - 9/2], gamma rises from the bottom face over
    [9j - 7/2, 9j - 3/2], and the middle alpha crosses the layer through the
    band z in [2i + 5/12, 2i + 7/12].
    """
    i, j = segment.level, segment.column
    top = 2 * i
    start = lattice_point(segment.start.p, segment.start.q)
    end = lattice_point(segment.end.p, segment.end.q)
    if segment.role == "delta":
        body = _template(F(18 * j - 13, 2), F(2, 3), top + F(1, 12), F(1, 8))
        return [start] + body + [end]
    if segment.role == "gamma":
        body = _template(F(18 * j - 7, 2), F(2, 3), top + F(11, 12), F(-1, 8))
        return [start] + body + [end]
    if kind == "top":
        return _top_alpha(i, j)
    if kind == "bottom":
        # top alpha turned half-way round inside the block column
        mirrored = [(F(18 * j - 8) - x, y, F(4 * i + 1) - z) for x, y, z in _top_alpha(i, j)]
        return list(reversed(mirrored))
    band = top + F(5, 12)
    body = _template(F(9 * j - 2), F(-4, 3), band, F(1, 12))
    return ([start, (F(9 * j - 1), F(0), band)] + body
            + [(F(9 * j - 7), F(0), band), end])


def strand_path(theta: ThetaComplex, strand: BraidStrand) -> list[Point3]:
    """Polyline of a braid strand from its top lattice point down to its bottom one.

    Raises:
        TemplateFailure: If the letters do not carry the strand to its declared bottom slot
    """
    i = strand.braid
    word = expand_group_letter(theta.braids.letters[i - 1], theta.n)
    q = strand.top.q
    upper = F(2 * i - 1)
    path: list[Point3] = [lattice_point(2 * i - 1, q)]
    for slot, letter in enumerate(word.letters, start=1):
        k = letter.generator
        if q not in (k, k + 1):
            continue
        za = upper + F(slot, LETTER_SLOTS) - LETTER_HALF
        zb = upper + F(slot, LETTER_SLOTS) + LETTER_HALF
        target, y = (k + 1, F(1, 2)) if q == k else (k, F(-1, 2))
        x, x_new = F(3 * q - 1), F(3 * target - 1)
        path += [(x, F(0), za), (x, y, za + LETTER_RAMP), (x_new, y, zb - LETTER_RAMP), (x_new, F(0), zb)]
        q = target
    if q != strand.bottom.q:
        raise TemplateFailure(f"strand {strand.role} of beta_{i} lands in slot {q}, not {strand.bottom.q}")
    path.append(lattice_point(2 * i, q))
    return path


def _append(path: list[Point3], piece: list[Point3]) -> None:
    for point in piece:
        if not path or path[-1] != point:
            path.append(point)


def realize(source: Union[ThetaComplex, Subtangle], check: bool = True) -> list[Polyline3]:
    """Realize every component of theta, or of a subtangle, as an exact polyline.

    Args:
        source: The stacked tangle or one of its subtangles
        check: Verify that the arcs are simple and pairwise disjoint

    Returns:
        One Polyline3 per component, in component order

    Raises:
        TemplateFailure: If an arc meets itself or another arc
    """
    theta = source.parent if isinstance(source, Subtangle) else source
    components = source.components
    kinds = {level.level: level.kind for level in theta.levels}
    polylines = []
    for component in components:
        path: list[Point3] = []
        for link in component.links:
            if link.link == "segment":
                _append(path, segment_path(kinds[link.level], link))
            else:
                piece = strand_path(theta, link)
                _append(path, piece if link.direction == "down" else list(reversed(piece)))
        polylines.append(Polyline3(component=component.index, vertices=path))
    if check:
        for polyline in polylines:
            if not is_simple(polyline):
                raise TemplateFailure(f"component {polyline.component} meets itself")
        if len(polylines) > 1 and min_arc_distance(polylines) == 0:
            raise TemplateFailure("realized components intersect")
    logger.info(f"Realized {len(polylines)} arcs with {sum(len(p.vertices) for p in polylines)} vertices")
    return polylines


def box_bounds(n: int) -> tuple[Point3, Point3]:
    """Corners of the box [0, 9n + 1] x [-1, 1] x [0, n^2 - n + 1]."""
    return (F(0), F(-1), F(0)), (F(9 * n + 1), F(1), F(n * n - n + 1))


# =============================================================================
# Exact distances
# =============================================================================

def _sub(a: Point3, b: Point3) -> Point3:
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def _dot(a: Point3, b: Point3) -> Fraction:
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def _clamp(value: Fraction) -> Fraction:
    return min(max(value, F(0)), F(1))


def segment_distance2(p1: Point3, q1: Point3, p2: Point3, q2: Point3) -> Fraction:
    """Exact squared distance between segments [p1, q1] and [p2, q2]."""
    d1, d2, r = _sub(q1, p1), _sub(q2, p2), _sub(p1, p2)
    a, e, f = _dot(d1, d1), _dot(d2, d2), _dot(d2, r)
    c, b = _dot(d1, r), _dot(d1, d2)
    denominator = a * e - b * b
    s = _clamp((b * f - c * e) / denominator) if denominator != 0 else F(0)
    t = (b * s + f) / e
    if t < 0:
        t, s = F(0), _clamp(-c / a)
    elif t > 1:
        t, s = F(1), _clamp((b - c) / a)
    closest1 = tuple(p1[k] + d1[k] * s for k in range(3))
    closest2 = tuple(p2[k] + d2[k] * t for k in range(3))
    gap = _sub(closest1, closest2)
    return _dot(gap, gap)


def _segments(polyline: Polyline3) -> list[tuple[Point3, Point3]]:
    return list(zip(polyline.vertices, polyline.vertices[1:]))


def _z_buckets(segments: list[tuple[Point3, Point3]]) -> dict[int, list[int]]:
    buckets: dict[int, list[int]] = {}
    for position, (p, q) in enumerate(segments):
        for bucket in range(int(min(p[2], q[2])), int(max(p[2], q[2])) + 1):
            buckets.setdefault(bucket, []).append(position)
    return buckets


def _nearby_pairs(first: list[tuple[Point3, Point3]], second: list[tuple[Point3, Point3]]) -> set[tuple[int, int]]:
    """Index pairs whose unit z-buckets are equal or adjacent."""
    left, right = _z_buckets(first), _z_buckets(second)
    pairs = set()
    for bucket, members in left.items():
        for other in (bucket - 1, bucket, bucket + 1):
            for a in members:
                for b in right.get(other, ()):
                    pairs.add((a, b))
    return pairs


def _pair_minimum(first: list[tuple[Point3, Point3]], second: list[tuple[Point3, Point3]]) -> Fraction:
    best: Optional[Fraction] = None
    for a, b in _nearby_pairs(first, second):
        value = segment_distance2(*first[a], *second[b])
        if best is None or value < best:
            best = value
    # pairs more than one bucket apart are at least 1 apart in z
    if best is not None and best <= 1:
        return best
    for p1, q1 in first:
        for p2, q2 in second:
            value = segment_distance2(p1, q1, p2, q2)
            if best is None or value < best:
                best = value
    return best


def min_arc_distance(polylines: list[Polyline3]) -> Fraction:
    """Exact minimum squared distance between distinct arcs.

    Raises:
        ValueError: If fewer than two arcs are given
    """
    if len(polylines) < 2:
        raise ValueError("need at least two arcs")
    pieces = [_segments(polyline) for polyline in polylines]
    return min(_pair_minimum(pieces[a], pieces[b])
               for a in range(len(pieces)) for b in range(a + 1, len(pieces)))


def is_simple(polyline: Polyline3) -> bool:
    """True when no two non-adjacent segments meet and no segment folds back on its neighbour."""
    segments = _segments(polyline)
    for (p, q), (_, r) in zip(segments, segments[1:]):
        d1, d2 = _sub(q, p), _sub(r, q)
        cross = (d1[1] * d2[2] - d1[2] * d2[1], d1[2] * d2[0] - d1[0] * d2[2], d1[0] * d2[1] - d1[1] * d2[0])
        if cross == (0, 0, 0) and _dot(d1, d2) < 0:
            return False
    for a, b in _nearby_pairs(segments, segments):
        if b > a + 1 and segment_distance2(*segments[a], *segments[b]) == 0:
            return False
    return True


# =============================================================================
# Projection
# =============================================================================

def _project(polylines: list[Polyline3], shear: Fraction) -> list[ProjectedArc]:
    return [ProjectedArc(component=p.component, points=[(x + shear * y, z) for x, y, z in p.vertices])
            for p in polylines]


def _cross2(a: Point2, b: Point2) -> Fraction:
    return a[0] * b[1] - a[1] * b[0]


def _on_segment(point: Point2, p: Point2, q: Point2) -> bool:
    d, r = (q[0] - p[0], q[1] - p[1]), (point[0] - p[0], point[1] - p[1])
    if _cross2(d, r) != 0:
        return False
    return min(p[0], q[0]) <= point[0] <= max(p[0], q[0]) and min(p[1], q[1]) <= point[1] <= max(p[1], q[1])


class _Degenerate(Exception):
    pass


def _intersect(p: Point2, q: Point2, r: Point2, s: Point2) -> Optional[tuple[Fraction, Fraction]]:
    """Parameters (t, u) of a transverse interior crossing, None if the segments miss.

    Raises:
        _Degenerate: On overlaps or when a vertex touches the other segment
    """
    d1, d2 = (q[0] - p[0], q[1] - p[1]), (s[0] - r[0], s[1] - r[1])
    denominator = _cross2(d1, d2)
    offset = (r[0] - p[0], r[1] - p[1])
    if denominator == 0:
        if _cross2(d1, offset) == 0 and (_on_segment(r, p, q) or _on_segment(s, p, q)
                                         or _on_segment(p, r, s)):
            raise _Degenerate("collinear overlap")
        return None
    t = _cross2(offset, d2) / denominator
    u = _cross2(offset, d1) / denominator
    if t < 0 or t > 1 or u < 0 or u > 1:
        return None
    if t in (0, 1) or u in (0, 1):
        raise _Degenerate("vertex on another segment")
    return t, u


def _find_crossings(arcs: list[ProjectedArc], polylines: list[Polyline3]) -> list[dict]:
    segments = []
    for arc_position, arc in enumerate(arcs):
        for index, (p, q) in enumerate(zip(arc.points, arc.points[1:])):
            segments.append((min(p[1], q[1]), max(p[1], q[1]), arc_position, index, p, q))
    segments.sort(key=lambda item: (item[0], item[2], item[3]))
    found = []
    points: set[Point2] = set()
    active: list[tuple] = []
    for current in segments:
        active = [other for other in active if other[1] >= current[0]]
        for other in active:
            first, second = other, current
            if first[2] == second[2] and abs(first[3] - second[3]) == 1:
                low, high = sorted((first, second), key=lambda item: item[3])
                d1 = (low[5][0] - low[4][0], low[5][1] - low[4][1])
                d2 = (high[5][0] - high[4][0], high[5][1] - high[4][1])
                if _cross2(d1, d2) == 0 and d1[0] * d2[0] + d1[1] * d2[1] < 0:
                    raise _Degenerate("segment folds back")
                continue
            hit = _intersect(first[4], first[5], second[4], second[5])
            if hit is None:
                continue
            t, u = hit
            point = (first[4][0] + (first[5][0] - first[4][0]) * t, first[4][1] + (first[5][1] - first[4][1]) * t)
            if point in points:
                raise _Degenerate("triple point")
            points.add(point)
            y_first = _height(polylines[first[2]], first[3], t)
            y_second = _height(polylines[second[2]], second[3], u)
            if y_first == y_second:
                raise _Degenerate("arcs meet in space")
            found.append({"a": (first[2], first[3], t), "b": (second[2], second[3], u),
                          "point": point, "a_over": y_first > y_second})
        active.append(current)
    return found


def _height(polyline: Polyline3, segment: int, t: Fraction) -> Fraction:
    start, end = polyline.vertices[segment], polyline.vertices[segment + 1]
    return start[1] + (end[1] - start[1]) * t


def _direction(arc: ProjectedArc, segment: int) -> Point2:
    """Direction in the drawing plane (x, -z)."""
    p, q = arc.points[segment], arc.points[segment + 1]
    return (q[0] - p[0], p[1] - q[1])


def project(polylines: list[Polyline3], shear_denominator: Optional[int] = None,
            max_attempts: Optional[int] = None) -> DiagramProjection:
    """Project along y and resolve crossings by y-order.

    Crossings are numbered in the order they are first met walking the
    components in order.

    Raises:
        NonGenericProjection: If every shear attempt leaves a degenerate picture
    """
    settings = get_settings()
    denominator = shear_denominator or settings.shear_denominator
    attempts = max_attempts or settings.max_shear_attempts
    for attempt in range(attempts + 1):
        shear = F(attempt, denominator)
        arcs = _project(polylines, shear)
        try:
            raw = _find_crossings(arcs, polylines)
        except _Degenerate as exc:
            logger.warning(f"Projection with shear {shear} is degenerate ({exc}); retrying")
            continue
        return _assemble(arcs, raw, shear)
    raise NonGenericProjection(f"projection stayed degenerate after {attempts} shear attempts")


def _assemble(arcs: list[ProjectedArc], raw: list[dict], shear: Fraction) -> DiagramProjection:
    def order_key(item: dict) -> tuple:
        return min(item["a"], item["b"])

    crossings = []
    for number, item in enumerate(sorted(raw, key=order_key), start=1):
        over, under = (item["a"], item["b"]) if item["a_over"] else (item["b"], item["a"])
        over_dir = _direction(arcs[over[0]], over[1])
        under_dir = _direction(arcs[under[0]], under[1])
        crossings.append(Crossing(
            id=number,
            over=CrossingEnd(component=arcs[over[0]].component, segment=over[1], parameter=over[2]),
            under=CrossingEnd(component=arcs[under[0]].component, segment=under[1], parameter=under[2]),
            x=item["point"][0],
            z=item["point"][1],
            sign=1 if _cross2(over_dir, under_dir) > 0 else -1,
        ))
    xs = [point[0] for arc in arcs for point in arc.points] or [F(0)]
    zs = [point[1] for arc in arcs for point in arc.points] or [F(0)]
    logger.info(f"Projected {len(arcs)} arcs with {len(crossings)} crossings (shear {shear})")
    return DiagramProjection(arcs=arcs, crossings=crossings, shear=shear,
                             width=max(max(xs), F(1)), height=max(max(zs), F(1)))


def crossing_count(polylines: Iterable[Polyline3]) -> int:
    return len(project(list(polylines)).crossings)


if __name__ == "__main__":
    from polytangle.services.tangle import build_theta

    arcs = realize(build_theta(2))
    print([len(arc.vertices) for arc in arcs], min_arc_distance(arcs))
    print(len(project(arcs).crossings))
