"""Moving points on the network and their query operations.

A moving point is stored as a sequence of units. Within a unit the object
stays on one route and moves with constant acceleration, so its measure at
``tau`` seconds after the unit start is ``pos1 + v0*tau + a*tau**2/2`` and its
velocity ``v0 + a*tau``. Units are half-open ``[t1, t2)`` in integer
milliseconds, except the last unit of an object which also covers ``t2``.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, replace
from typing import Iterable, Optional

from .errors import (
    ContinuityViolation,
    NoNearbyRoute,
    TemporalOverlap,
    UndefinedAtTime,
    UnitInvariantViolation,
)
from .geometry import EPS_M, azimuth, locate_point, project_point, sub_polyline
from .temporal import Period, Periods, format_timestamp
from .values import GLine, GPoint, Intime, RouteInterval, sides_match

EPS_A = 1e-12


def _fmt(x: float) -> str:
    return repr(float(x))


@dataclass(frozen=True)
class MGPointUnit:
    moid: int
    netid: int
    rid: int
    side: int
    t1: int
    t2: int
    pos1: float
    pos2: float
    v0: float
    a: float

    def __post_init__(self):
        if not self.t1 < self.t2:
            raise UnitInvariantViolation(f"unit of {self.moid} has t1={self.t1} >= t2={self.t2}")
        if self.side not in (-1, 0, 1):
            raise UnitInvariantViolation(f"bad side {self.side}")
        for v in (self.pos1, self.pos2, self.v0, self.a):
            if not math.isfinite(v):
                raise UnitInvariantViolation(f"non-finite value in unit of {self.moid}")

    @property
    def seconds(self) -> float:
        return (self.t2 - self.t1) / 1000.0

    def measure_at(self, t) -> float:
        if t == self.t1:
            return self.pos1
        if t == self.t2:
            return self.pos2
        tau = (t - self.t1) / 1000.0
        return self.pos1 + self.v0 * tau + 0.5 * self.a * tau * tau

    def velocity_at(self, t) -> float:
        return self.v0 + self.a * (t - self.t1) / 1000.0

    @property
    def v_end(self) -> float:
        return self.v0 + self.a * self.seconds

    def predicted_pos2(self) -> float:
        tau = self.seconds
        return self.pos1 + self.v0 * tau + 0.5 * self.a * tau * tau

    def extent(self):
        """Smallest and largest measure reached during the unit."""
        lo, hi = min(self.pos1, self.pos2), max(self.pos1, self.pos2)
        if abs(self.a) > EPS_A:
            tau = -self.v0 / self.a
            if 0.0 < tau < self.seconds:
                x = self.pos1 + self.v0 * tau + 0.5 * self.a * tau * tau
                lo, hi = min(lo, x), max(hi, x)
        return lo, hi

    def check(self, route_length: Optional[float] = None, eps_m: float = EPS_M):
        """Raise :class:`UnitInvariantViolation` unless the unit is kinematically valid."""
        scale = max(1.0, route_length if route_length is not None else abs(self.pos1))
        err = abs(self.predicted_pos2() - self.pos2)
        if err > eps_m * scale:
            raise UnitInvariantViolation(
                f"unit of {self.moid} at t1={format_timestamp(self.t1)}: pos2={self.pos2} "
                f"disagrees with the motion law by {err:.3g} m")
        if route_length is not None:
            lo, hi = self.extent()
            if lo < -eps_m * scale or hi > route_length + eps_m * scale:
                raise UnitInvariantViolation(
                    f"unit of {self.moid} leaves route {self.rid} ([{lo}, {hi}] vs length {route_length})")

    def to_row(self):
        return [self.moid, self.netid, self.rid, self.side, format_timestamp(self.t1),
                format_timestamp(self.t2), _fmt(self.pos1), _fmt(self.pos2), _fmt(self.v0),
                _fmt(self.a)]

    def __str__(self):
        return "MGPOINT(" + ",".join(str(v) for v in self.to_row()) + ")"


def check_sequence(units, net=None, eps_m: float = EPS_M):
    """Validate ordering and continuity of one object's time-sorted units."""
    for prev, cur in zip(units, units[1:]):
        if cur.t1 < prev.t2:
            raise TemporalOverlap(
                f"unit of {cur.moid} starting {format_timestamp(cur.t1)} overlaps the one ending "
                f"{format_timestamp(prev.t2)}")
        if cur.t1 != prev.t2:
            continue
        if cur.rid == prev.rid:
            scale = max(1.0, net.routes[cur.rid].length if net is not None and cur.rid in net.routes
                        else abs(prev.pos2))
            if abs(cur.pos1 - prev.pos2) > eps_m * scale:
                raise ContinuityViolation(
                    f"object {cur.moid} jumps from {prev.pos2} to {cur.pos1} on route {cur.rid} "
                    f"at {format_timestamp(cur.t1)}")
        elif net is not None:
            p = locate_point(net.route(prev.rid).curve, prev.pos2, net.eps_m)
            q = locate_point(net.route(cur.rid).curve, cur.pos1, net.eps_m)
            if p.distance(q) > net.snap:
                raise ContinuityViolation(
                    f"object {cur.moid} jumps from route {prev.rid} to {cur.rid} "
                    f"at {format_timestamp(cur.t1)} ({p} vs {q})")


class UGPoint:
    """All units of one moving object, sorted by start time."""

    __slots__ = ("moid", "units", "_starts")

    def __init__(self, units: Iterable[MGPointUnit] = (), moid: Optional[int] = None,
                 net=None, validate: bool = True):
        units = tuple(sorted(units, key=lambda u: u.t1))
        moids = {u.moid for u in units}
        if len(moids) > 1:
            raise ValueError(f"units of several objects: {sorted(moids)}")
        self.moid = moid if moid is not None else (units[0].moid if units else None)
        if validate:
            check_sequence(units, net)
        self.units = units
        self._starts = [u.t1 for u in units]

    def __len__(self):
        return len(self.units)

    def __iter__(self):
        return iter(self.units)

    def __bool__(self):
        return bool(self.units)

    def __eq__(self, other):
        return isinstance(other, UGPoint) and self.moid == other.moid and self.units == other.units

    def __repr__(self):
        return f"UGPoint(moid={self.moid}, units={len(self.units)})"

    def __str__(self):
        return "\n".join(str(u) for u in self.units) if self.units else "UGPOINT()"

    @property
    def netid(self):
        return self.units[0].netid if self.units else None

    def unit_at(self, t) -> MGPointUnit:
        i = bisect_right(self._starts, t) - 1
        if i >= 0:
            u = self.units[i]
            if t < u.t2 or (t == u.t2 and i == len(self.units) - 1):
                return u
        raise UndefinedAtTime(f"object {self.moid} is not defined at {format_timestamp(t)}")


# ---------------------------------------------------------------------------
# network <-> space
# ---------------------------------------------------------------------------

def in_space(net, p: GPoint):
    return locate_point(net.route(p.rid).curve, p.measure, net.eps_m)


def in_space_line(net, g: GLine):
    """Planar polyline of every non-degenerate interval, in interval order."""
    out = []
    for iv in g.intervals:
        if iv.span > net.eps_m:
            out.append(sub_polyline(net.route(iv.rid).curve, iv.pos1, iv.pos2, net.eps_m))
    return out


def in_network(net, q, max_dist: float = 100.0) -> GPoint:
    best = None
    for rid in sorted(net.routes):
        proj = project_point(net.routes[rid].curve, q, net.eps_side)
        if best is None or proj.distance < best[1].distance:
            best = (rid, proj)
    if best is None or best[1].distance > max_dist:
        raise NoNearbyRoute(f"no route within {max_dist} m of {tuple(q)}")
    rid, proj = best
    return GPoint(net.net_id, rid, proj.measure, proj.side)


# ---------------------------------------------------------------------------
# temporal projections
# ---------------------------------------------------------------------------

def deftime(u: UGPoint) -> Periods:
    return Periods(Period(x.t1, x.t2) for x in u.units)


def trajectory(u: UGPoint, eps_m: float = EPS_M) -> GLine:
    """Network part covered by the object, merged per route side.

    Intervals are sorted by route id then lower bound; the GLine id is the
    object id.
    """
    spans: dict = {}
    for x in u.units:
        spans.setdefault((x.rid, x.side), []).append(x.extent())
    out = []
    for (rid, side), items in spans.items():
        items.sort()
        lo, hi = items[0]
        for a, b in items[1:]:
            if a <= hi + eps_m:
                hi = max(hi, b)
            else:
                out.append(RouteInterval(rid, lo, hi, side))
                lo, hi = a, b
        out.append(RouteInterval(rid, lo, hi, side))
    out.sort(key=lambda iv: (iv.rid, iv.pos1, iv.side))
    netid = u.netid if u.netid is not None else 1
    return GLine(netid, u.moid if u.moid is not None else 0, tuple(out))


def atinstant(u: UGPoint, t: int) -> Intime:
    x = u.unit_at(t)
    return Intime(GPoint(x.netid, x.rid, x.measure_at(t), x.side), t)


def _slice(x: MGPointUnit, s: int, e: int) -> MGPointUnit:
    if s == x.t1 and e == x.t2:
        return x
    return replace(x, t1=s, t2=e, pos1=x.measure_at(s), pos2=x.measure_at(e),
                   v0=x.velocity_at(s))


def atperiods(u: UGPoint, periods: Periods) -> UGPoint:
    out = []
    for x in u.units:
        for p in periods:
            s, e = max(x.t1, p.t_start), min(x.t2, p.t_end)
            if e > s:
                out.append(_slice(x, s, e))
    return UGPoint(out, moid=u.moid, validate=False)


def _roots(x: MGPointUnit, level: float):
    """Times (s) in (0, duration) at which the unit passes ``level``."""
    c = x.pos1 - level
    qa, qb = 0.5 * x.a, x.v0
    dur = x.seconds
    if abs(x.a) < EPS_A:
        if qb == 0.0:
            return []
        roots = [-c / qb]
    else:
        disc = qb * qb - 4.0 * qa * c
        if disc < 0.0:
            return []
        q = -0.5 * (qb + math.copysign(math.sqrt(disc), qb))
        roots = [q / qa]
        if q != 0.0:
            roots.append(c / q)
    return sorted(r for r in roots if 0.0 < r < dur)


def _times_within(x: MGPointUnit, lo: float, hi: float, eps: float):
    dur = x.seconds
    cuts = sorted({0.0, dur, *_roots(x, lo), *_roots(x, hi)})
    pieces = []
    for a, b in zip(cuts, cuts[1:]):
        mid = (a + b) / 2.0
        m = x.pos1 + x.v0 * mid + 0.5 * x.a * mid * mid
        if lo - eps <= m <= hi + eps:
            if pieces and pieces[-1][1] == a:
                pieces[-1] = (pieces[-1][0], b)
            else:
                pieces.append((a, b))
    return pieces


def _union(pieces):
    out = []
    for a, b in sorted(pieces):
        if out and a <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], b))
        else:
            out.append((a, b))
    return out


def at(u: UGPoint, g: GLine, eps_m: float = EPS_M) -> UGPoint:
    """Restrict ``u`` to the times its position lies inside ``g``.

    Crossing times are rounded inwards to whole milliseconds so every kept
    instant is inside ``g``.
    """
    out = []
    for x in u.units:
        pieces = []
        for iv in g.intervals:
            if iv.rid == x.rid and sides_match(iv.side, x.side):
                pieces.extend(_times_within(x, iv.lo, iv.hi, eps_m))
        for a, b in _union(pieces):
            s = x.t1 + math.ceil(a * 1000.0 - 1e-6)
            e = x.t1 + math.floor(b * 1000.0 + 1e-6)
            s, e = max(s, x.t1), min(e, x.t2)
            if e > s:
                out.append(_slice(x, s, e))
    return UGPoint(out, moid=u.moid, validate=False)


def inside(u: UGPoint, g: GLine, t: int, eps_m: float = EPS_M) -> bool:
    p = atinstant(u, t).position
    return any(
        iv.rid == p.rid and sides_match(iv.side, p.side) and iv.lo - eps_m <= p.measure <= iv.hi + eps_m
        for iv in g.intervals
    )


def direction(net, u1: UGPoint, u2: UGPoint, t: int) -> float:
    """Azimuth in degrees from the first object to the second at ``t``."""
    p = in_space(net, atinstant(u1, t).position)
    q = in_space(net, atinstant(u2, t).position)
    return azimuth(p, q)


def shortest_path_mo(net, u1: UGPoint, u2: UGPoint, t: int) -> GLine:
    from .routing import shortest_path

    return shortest_path(net, atinstant(u1, t).position, atinstant(u2, t).position)


def size(g: GLine) -> float:
    return math.fsum(iv.span for iv in g.intervals)


def duration(u: UGPoint) -> float:
    if not u.units:
        return 0.0
    return (max(x.t2 for x in u.units) - u.units[0].t1) / 1000.0


def now(u: UGPoint) -> int:
    if not u.units:
        raise UndefinedAtTime(f"object {u.moid} has no units")
    return u.units[-1].t2


def current(u: UGPoint) -> GPoint:
    return atinstant(u, now(u)).position


def val(i: Intime) -> GPoint:
    return i.position


def inst(i: Intime) -> int:
    return i.t
