"""Network-constrained trajectory generator.

Trips are drawn between uniformly chosen nodes and follow the turn-legal
shortest path. Along the path a vehicle accelerates to cruise speed, slows
down before every junction it passes (stopping for a red light with some
probability) and stops at its destination. Every piece of constant
acceleration becomes one stored unit, and so does every route change.

Unit boundaries must fall on whole milliseconds. Each stretch between two
control points (start, junctions, end) is therefore planned with
millisecond-rounded phase durations and a re-solved peak speed, which keeps
positions exact at every control point and velocities continuous across
unit boundaries.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional, Sequence

import numpy as np

from .errors import NoPath, TooFewNodes
from .geometry import locate_point
from .motion import MGPointUnit
from .routing import shortest_path
from .temporal import format_timestamp, parse_timestamp
from .values import GLine, GPoint

log = logging.getLogger(__name__)

DEFAULT_START = parse_timestamp("2011-01-21T00:00:00.000Z")
MAX_ATTEMPTS = 100
FIRST_MOID = 1000


@dataclass(frozen=True)
class GenParams:
    periods: int
    interval: float
    per_period: int
    seed: int
    cruise_speed: float = 14.0
    accel: float = 2.0
    decel: float = 3.0
    red_prob: float = 0.3
    red_wait: float = 20.0
    sample_step: float = 2.0
    start_time: int = DEFAULT_START

    def __post_init__(self):
        if self.periods < 1 or self.per_period < 1:
            raise ValueError("periods and per_period must be at least 1")
        if not self.interval > 0:
            raise ValueError("interval must be positive")
        if min(self.cruise_speed, self.accel, self.decel) <= 0:
            raise ValueError("speeds and accelerations must be positive")
        if not 0.0 <= self.red_prob <= 1.0:
            raise ValueError("red_prob must lie in [0, 1]")
        if self.red_wait < 0 or self.sample_step <= 0:
            raise ValueError("red_wait must be >= 0 and sample_step > 0")


@dataclass(frozen=True)
class Trip:
    moid: int
    start_node: int
    end_node: int
    start_time: int
    path: GLine


class Phase(NamedTuple):
    t1: int
    t2: int
    s1: float  # arc length along the trip at t1
    s2: float
    v0: float  # speed along the trip (>= 0)
    a: float
    leg: int


class _Leg(NamedTuple):
    rid: int
    pos1: float
    pos2: float
    s1: float
    s2: float

    def measure(self, s: float) -> float:
        if s == self.s1:
            return self.pos1
        if s == self.s2:
            return self.pos2
        sign = 1.0 if self.pos2 > self.pos1 else -1.0
        return self.pos1 + sign * (s - self.s1)

    @property
    def sign(self) -> float:
        return 1.0 if self.pos2 > self.pos1 else -1.0


@dataclass
class Motion:
    """Continuous motion profile of one trip, in arc length along its path."""

    trip: Trip
    legs: List[_Leg]
    phases: List[Phase] = field(default_factory=list)

    @property
    def end_time(self) -> int:
        return self.phases[-1].t2

    def phase_at(self, t: int) -> Phase:
        for i, ph in enumerate(self.phases):
            if ph.t1 <= t < ph.t2 or (t == ph.t2 and i == len(self.phases) - 1):
                return ph
        raise ValueError(f"trip {self.trip.moid} is not under way at {t}")

    def position(self, t: int, phase: Optional[Phase] = None):
        """(rid, measure) at ``t``."""
        ph = phase if phase is not None else self.phase_at(t)
        leg = self.legs[ph.leg]
        if t == ph.t1:
            s = ph.s1
        elif t == ph.t2:
            s = ph.s2
        else:
            tau = (t - ph.t1) / 1000.0
            s = ph.s1 + ph.v0 * tau + 0.5 * ph.a * tau * tau
        return leg.rid, leg.measure(s)


def _node_gpoint(net, node_id: int) -> GPoint:
    rid, m = net.node_position(node_id)
    return GPoint(net.net_id, rid, m, 0)


def plan_trips(net, params: GenParams) -> List[Trip]:
    nodes = sorted(nid for nid in net.nodes if net.routes_at(nid))
    if len(nodes) < 2:
        raise TooFewNodes(f"need at least two connected nodes, network has {len(nodes)}")
    rng = np.random.default_rng(params.seed)
    step = int(round(params.interval * 1000))
    trips = []
    moid = FIRST_MOID
    for batch in range(params.periods):
        start_time = params.start_time + batch * step
        for _ in range(params.per_period):
            trip = None
            for _attempt in range(MAX_ATTEMPTS):
                a, b = (nodes[int(i)] for i in rng.integers(0, len(nodes), size=2))
                if a == b:
                    continue
                try:
                    path = shortest_path(net, _node_gpoint(net, a), _node_gpoint(net, b))
                except NoPath:
                    continue
                trip = Trip(moid, a, b, start_time, GLine(path.netid, moid, path.intervals))
                break
            if trip is None:
                log.warning("no reachable node pair after %d attempts; trip skipped", MAX_ATTEMPTS)
                continue
            trips.append(trip)
            moid += 1
    return trips


def _ceil_ms(seconds: float) -> int:
    if seconds <= 1e-12:
        return 0
    return int(math.ceil(seconds * 1000.0 - 1e-9))


def _single_phase(dist, v_in, v_target, vmax):
    """One constant-acceleration phase covering ``dist`` (end speed floats)."""
    t_nom = 2.0 * dist / (v_in + v_target) if v_in + v_target > 0 else 1e-3
    ms = max(1, int(math.floor(t_nom * 1000.0 + 1e-9)))
    v_end = 2.0 * dist / (ms / 1000.0) - v_in
    if v_end > vmax:
        ms = int(math.ceil(t_nom * 1000.0 - 1e-9))
        v_end = 2.0 * dist / (ms / 1000.0) - v_in
    return [(ms, (v_end - v_in) / (ms / 1000.0))]


def plan_stretch(dist: float, v_in: float, v_out: float, params: GenParams):
    """Phases ``[(duration_ms, acceleration), ...]`` covering ``dist`` meters.

    Starts at speed ``v_in`` and aims to arrive at ``v_out``: accelerate at
    ``accel`` up to at most cruise speed, hold it, brake at ``decel``. When
    the stretch is too short to brake in time the vehicle brakes harder; when
    it is too short to reach ``v_out`` it arrives slower.
    """
    A, B, V = params.accel, params.decel, params.cruise_speed
    if v_in > v_out and (v_in * v_in - v_out * v_out) / (2.0 * B) >= dist:
        return _single_phase(dist, v_in, v_out, V)
    if v_out > v_in and (v_out * v_out - v_in * v_in) / (2.0 * A) >= dist:
        return _single_phase(dist, v_in, math.sqrt(v_in * v_in + 2.0 * A * dist), V)
    vp = math.sqrt((2.0 * A * B * dist + B * v_in * v_in + A * v_out * v_out) / (A + B))
    vp = min(vp, V)
    da = (vp * vp - v_in * v_in) / (2.0 * A)
    dd = (vp * vp - v_out * v_out) / (2.0 * B)
    ta_ms = _ceil_ms((vp - v_in) / A)
    td_ms = _ceil_ms((vp - v_out) / B)
    tc_ms = _ceil_ms(max(0.0, dist - da - dd) / vp)
    ta, tc, td = ta_ms / 1000.0, tc_ms / 1000.0, td_ms / 1000.0
    den = ta / 2.0 + tc + td / 2.0
    if den <= 0:
        return _single_phase(dist, v_in, v_out, V)
    # rounding durations up can only lower the peak, so it stays <= cruise
    peak = (dist - v_in * ta / 2.0 - v_out * td / 2.0) / den
    if peak < 0 or (ta_ms == 0 and peak != v_in) or (td_ms == 0 and peak != v_out):
        return _single_phase(dist, v_in, v_out, V)
    phases = []
    if ta_ms:
        phases.append((ta_ms, (peak - v_in) / ta))
    if tc_ms:
        phases.append((tc_ms, 0.0))
    if td_ms:
        phases.append((td_ms, (v_out - peak) / td))
    return phases


def _legs(path: GLine) -> List[_Leg]:
    legs, s = [], 0.0
    for iv in path.intervals:
        legs.append(_Leg(iv.rid, iv.pos1, iv.pos2, s, s + iv.span))
        s += iv.span
    return legs


def _junction_controls(net, legs):
    """Arc-length positions of the junctions crossed by the path, in order."""
    controls = []
    for k, leg in enumerate(legs):
        route = net.routes[leg.rid]
        lo, hi = min(leg.pos1, leg.pos2), max(leg.pos1, leg.pos2)
        inner = [(m, nid) for m, nid in route.nodes
                 if lo < m < hi and len(net.routes_at(nid)) > 1]
        if leg.pos2 < leg.pos1:
            inner.reverse()
        for m, _ in inner:
            controls.append(leg.s1 + abs(m - leg.pos1))
        if k + 1 < len(legs):
            controls.append(leg.s2)
    return controls


def simulate_trip(net, trip: Trip, params: GenParams, lights: Optional[Sequence[bool]] = None) -> Motion:
    """Motion profile of ``trip``.

    ``lights`` forces the red (True) / green (False) state of each junction
    the trip crosses; by default they are drawn from a per-trip stream.
    """
    legs = _legs(trip.path)
    motion = Motion(trip, legs)
    if not legs:
        return motion
    controls = _junction_controls(net, legs)
    if lights is None:
        rng = np.random.default_rng([params.seed, trip.moid])
        lights = [bool(rng.random() < params.red_prob) for _ in controls]
    elif len(lights) < len(controls):
        raise ValueError(f"trip {trip.moid} crosses {len(controls)} junctions, got {len(lights)} lights")
    targets = [(s, 0.0 if red else params.cruise_speed / 2.0, red)
               for s, red in zip(controls, lights)]
    targets.append((legs[-1].s2, 0.0, False))

    t, s, v = trip.start_time, 0.0, 0.0
    leg_ix = 0
    wait_ms = int(round(params.red_wait * 1000))
    for k, (s_target, v_out, red) in enumerate(targets):
        phases = plan_stretch(s_target - s, v, v_out, params)
        for n, (ms, a) in enumerate(phases):
            tau = ms / 1000.0
            s_next = s + v * tau + 0.5 * a * tau * tau
            if n == len(phases) - 1:
                s_next = s_target
            while legs[leg_ix].s2 <= s and leg_ix + 1 < len(legs):
                leg_ix += 1
            motion.phases.append(Phase(t, t + ms, s, s_next, v, a, leg_ix))
            t, s, v = t + ms, s_next, v + a * tau
        if red and wait_ms > 0:
            motion.phases.append(Phase(t, t + wait_ms, s, s, 0.0, 0.0, leg_ix))
            t, v = t + wait_ms, 0.0
        elif red:
            v = 0.0
    return motion


def motion_units(motion: Motion) -> List[MGPointUnit]:
    trip = motion.trip
    units = []
    for ph in motion.phases:
        leg = motion.legs[ph.leg]
        sign = leg.sign
        units.append(MGPointUnit(trip.moid, trip.path.netid, leg.rid, 0, ph.t1, ph.t2,
                                 leg.measure(ph.s1), leg.measure(ph.s2), sign * ph.v0,
                                 sign * ph.a))
    return units


def motion_samples(net, motion: Motion, step_ms: int):
    """Rows ``(moid, t, rid, measure, x, y)`` every ``step_ms`` while under way."""
    rows = []
    if not motion.phases:
        return rows
    phases = motion.phases
    i, last = 0, len(phases) - 1
    t = motion.trip.start_time
    while t <= motion.end_time:
        while i < last and t >= phases[i].t2:
            i += 1
        rid, m = motion.position(t, phases[i])
        p = locate_point(net.routes[rid].curve, m, net.eps_m)
        rows.append((motion.trip.moid, t, rid, m, p.x, p.y))
        t += step_ms
    return rows


class GenerationSummary(NamedTuple):
    objects: int
    units: int
    rows: int
    trips: list
    samples: list


def generate(net, params: GenParams, store, lights=None) -> GenerationSummary:
    """Plan and simulate every trip, append units to ``store``, collect samples."""
    trips = plan_trips(net, params)
    step_ms = int(round(params.sample_step * 1000))
    n_units = 0
    samples = []
    for trip in trips:
        motion = simulate_trip(net, trip, params, None if lights is None else lights(trip))
        units = motion_units(motion)
        n_units += store.append_units(units)
        samples.extend(motion_samples(net, motion, step_ms))
    return GenerationSummary(len(trips), n_units, len(samples), trips, samples)


SAMPLE_COLUMNS = ("moid", "t", "rid", "measure", "x", "y")


def write_samples(path, samples) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SAMPLE_COLUMNS)
        for moid, t, rid, m, x, y in samples:
            w.writerow([moid, format_timestamp(t), rid, repr(float(m)), repr(float(x)), repr(float(y))])


def read_samples(path):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        next(reader)
        return [(int(r[0]), parse_timestamp(r[1]), int(r[2]), float(r[3]), float(r[4]), float(r[5]))
                for r in reader if r]
