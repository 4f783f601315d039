"""Planar and linear-referenced geometry primitives.

Coordinates are planar meters in a projected CRS. A :class:`MeasuredPolyline`
carries the cumulative arc length ("measure") at each vertex, which is what
every network position is expressed in.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from typing import NamedTuple, Sequence

import shapely.wkt
from shapely.geometry import LineString, Point

from .errors import DegeneratePoints, EmptyInterval, InvalidGeometry, MeasureOutOfRange

EPS_M = 1e-9
EPS_SIDE = 1e-9


class PlanarPoint(NamedTuple):
    x: float
    y: float

    def distance(self, other) -> float:
        return math.hypot(other[0] - self.x, other[1] - self.y)


class Projection(NamedTuple):
    measure: float
    distance: float
    side: int


class MeasuredPolyline:
    """Immutable polyline with cumulative measures per vertex."""

    __slots__ = ("vertices", "cumulative_measure")

    def __init__(self, vertices: Sequence[Sequence[float]]):
        pts = tuple(PlanarPoint(float(x), float(y)) for x, y in vertices)
        if len(pts) < 2:
            raise InvalidGeometry("a polyline needs at least two vertices")
        cum = [0.0]
        for a, b in zip(pts, pts[1:]):
            if not (math.isfinite(b.x) and math.isfinite(b.y)):
                raise InvalidGeometry("non-finite coordinate")
            seg = math.hypot(b.x - a.x, b.y - a.y)
            if seg == 0.0:
                raise InvalidGeometry(f"repeated vertex {a}")
            cum.append(cum[-1] + seg)
        if not (math.isfinite(pts[0].x) and math.isfinite(pts[0].y)):
            raise InvalidGeometry("non-finite coordinate")
        self.vertices = pts
        self.cumulative_measure = tuple(cum)

    @classmethod
    def from_points(cls, points):
        """Build a polyline, silently dropping exact consecutive duplicates."""
        cleaned = []
        for p in points:
            p = (float(p[0]), float(p[1]))
            if not cleaned or cleaned[-1] != p:
                cleaned.append(p)
        return cls(cleaned)

    @property
    def length(self) -> float:
        return self.cumulative_measure[-1]

    @property
    def start(self) -> PlanarPoint:
        return self.vertices[0]

    @property
    def end(self) -> PlanarPoint:
        return self.vertices[-1]

    def reversed(self) -> "MeasuredPolyline":
        return MeasuredPolyline(self.vertices[::-1])

    def __len__(self):
        return len(self.vertices)

    def __eq__(self, other):
        return isinstance(other, MeasuredPolyline) and self.vertices == other.vertices

    def __hash__(self):
        return hash(self.vertices)

    def __repr__(self):
        return f"MeasuredPolyline({to_wkt(self)})"


def polyline_length(p: MeasuredPolyline) -> float:
    return p.cumulative_measure[-1]


def _check_measure(p, m, eps):
    if m < -eps or m > p.length + eps or math.isnan(m):
        raise MeasureOutOfRange(f"measure {m} outside [0, {p.length}]")
    return min(max(m, 0.0), p.length)


def _segment_at(p, m):
    # index i such that cum[i] <= m <= cum[i+1]
    i = bisect_right(p.cumulative_measure, m) - 1
    return min(max(i, 0), len(p.vertices) - 2)


def locate_point(p: MeasuredPolyline, m: float, eps: float = EPS_M) -> PlanarPoint:
    """Planar position at measure ``m`` (clamped within ``eps`` of the ends)."""
    m = _check_measure(p, m, eps)
    cum = p.cumulative_measure
    if m == 0.0:
        return p.vertices[0]
    if m == cum[-1]:
        return p.vertices[-1]
    i = _segment_at(p, m)
    if m == cum[i]:
        return p.vertices[i]
    a, b = p.vertices[i], p.vertices[i + 1]
    f = (m - cum[i]) / (cum[i + 1] - cum[i])
    return PlanarPoint(a.x + f * (b.x - a.x), a.y + f * (b.y - a.y))


def project_point(p: MeasuredPolyline, q, eps_side: float = EPS_SIDE) -> Projection:
    """Nearest point of ``p`` to ``q`` as (measure, distance, side).

    side is +1 when ``q`` lies right of the increasing-measure direction,
    -1 when left, 0 when it is within ``eps_side`` of the line.
    """
    qx, qy = float(q[0]), float(q[1])
    best = None
    verts, cum = p.vertices, p.cumulative_measure
    for i in range(len(verts) - 1):
        a, b = verts[i], verts[i + 1]
        dx, dy = b.x - a.x, b.y - a.y
        seg2 = dx * dx + dy * dy
        t = ((qx - a.x) * dx + (qy - a.y) * dy) / seg2
        t = min(max(t, 0.0), 1.0)
        fx, fy = a.x + t * dx, a.y + t * dy
        d = math.hypot(qx - fx, qy - fy)
        if best is None or d < best[1]:
            cross = dx * (qy - fy) - dy * (qx - fx)
            best = (cum[i] + t * (cum[i + 1] - cum[i]), d, cross)
    m, d, cross = best
    if d < eps_side or cross == 0.0:
        side = 0
    else:
        side = -1 if cross > 0 else 1
    return Projection(m, d, side)


def sub_polyline(p: MeasuredPolyline, m1: float, m2: float, eps: float = EPS_M) -> MeasuredPolyline:
    """Part of ``p`` between two measures, ordered from ``m1`` towards ``m2``."""
    if abs(m1 - m2) < eps:
        raise EmptyInterval(f"interval [{m1}, {m2}] is empty")
    a = _check_measure(p, m1, eps)
    b = _check_measure(p, m2, eps)
    lo, hi = min(a, b), max(a, b)
    cum = p.cumulative_measure
    pts = [locate_point(p, lo)]
    for v, c in zip(p.vertices, cum):
        if lo + eps < c < hi - eps:
            pts.append(v)
    end = locate_point(p, hi)
    if end != pts[-1]:
        pts.append(end)
    if len(pts) < 2:
        raise EmptyInterval(f"interval [{m1}, {m2}] collapses to a point")
    if a > b:
        pts.reverse()
    return MeasuredPolyline(pts)


def azimuth(src, dst) -> float:
    """Counterclockwise angle from +x, in degrees within [0, 360)."""
    dx, dy = dst[0] - src[0], dst[1] - src[1]
    if dx == 0 and dy == 0:
        raise DegeneratePoints(f"coincident points {tuple(src)}")
    deg = math.degrees(math.atan2(dy, dx)) % 360.0
    return 0.0 if deg == 360.0 else deg


def parse_wkt(text: str):
    """Parse a 2-D ``POINT`` or ``LINESTRING`` literal."""
    try:
        geom = shapely.wkt.loads(text)
    except Exception as exc:  # shapely raises GEOSException / WKTReadingError
        raise InvalidGeometry(f"bad WKT {text!r}: {exc}") from None
    if geom.has_z:
        raise InvalidGeometry("only 2-D geometry is supported")
    if isinstance(geom, Point):
        return PlanarPoint(geom.x, geom.y)
    if isinstance(geom, LineString):
        return MeasuredPolyline.from_points(geom.coords)
    raise InvalidGeometry(f"unsupported geometry type {geom.geom_type}")


def to_wkt(geom) -> str:
    if isinstance(geom, MeasuredPolyline):
        shape = LineString(geom.vertices)
    else:
        shape = Point(geom[0], geom[1])
    return shapely.wkt.dumps(shape, rounding_precision=-1, trim=True)
