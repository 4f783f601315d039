"""Linear-referenced road network: nodes, sections, routes and junctions.

A network is built in three passes:

1. :func:`create_topology` snaps edge endpoints into nodes and turns every edge
   into a section.
2. :func:`build_routes` chains sections into routes and assigns each section
   its measure interval on the route.
3. :func:`build_junctions` creates one junction per pair of routes meeting at a
   node, applies turn restrictions to the 4x4 connectivity codes and derives
   the adjacency structure used by the router.

Directions are encoded as ``UP = 1`` (increasing measure) and ``DOWN = -1``.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional, Sequence

from .errors import (
    DegenerateEdge,
    EmptyInput,
    InvalidGeometry,
    MalformedRow,
    NetworkFrozen,
    UnknownRoute,
    UnknownRouteAtNode,
)
from .geometry import (
    EPS_M,
    EPS_SIDE,
    MeasuredPolyline,
    PlanarPoint,
    locate_point,
    parse_wkt,
    project_point,
    sub_polyline,
    to_wkt,
)

UP = 1
DOWN = -1
ONE_WAY = 1
TWO_WAY = 2
EPS_SNAP = 0.01

DIR_NAMES = {UP: "up", DOWN: "down"}
DIR_CODES = {"up": UP, "down": DOWN}


class Edge(NamedTuple):
    curve: MeasuredPolyline
    name: str = ""
    kind: int = TWO_WAY


class TurnRestriction(NamedTuple):
    node_id: int
    from_route: int
    from_dir: int
    to_route: int
    to_dir: int
    allow: bool


@dataclass(frozen=True)
class Node:
    node_id: int
    point: PlanarPoint


@dataclass
class Section:
    sid: int
    start_node_id: int
    end_node_id: int
    kind: int
    curve: MeasuredPolyline
    name: str = ""
    rid: int = 0
    pos1: float = 0.0
    pos2: float = 0.0

    @property
    def length(self) -> float:
        return self.curve.length


@dataclass
class Route:
    rid: int
    kind: int
    length: float
    curve: MeasuredPolyline
    start_flag: str = "start"
    name: str = ""
    sections: tuple = ()
    # (measure, node_id) in increasing measure order
    nodes: tuple = ()


def default_cc():
    cc = [[True] * 4 for _ in range(4)]
    # U-turns on either route are off unless a restriction enables them
    cc[0][1] = cc[1][0] = cc[2][3] = cc[3][2] = False
    return cc


@dataclass
class Junction:
    jid: int
    node_id: int
    r1id: int
    r2id: int
    r1meas: float
    r2meas: float
    point: PlanarPoint
    cc: list = field(default_factory=default_cc)

    def index(self, rid: int, direction: int) -> int:
        if rid == self.r1id:
            base = 0
        elif rid == self.r2id:
            base = 2
        else:
            raise UnknownRouteAtNode(f"route {rid} is not part of junction {self.jid}")
        return base + (0 if direction == UP else 1)

    def allows(self, src, dst) -> bool:
        return self.cc[self.index(*src)][self.index(*dst)]

    def set(self, src, dst, allow: bool):
        self.cc[self.index(*src)][self.index(*dst)] = bool(allow)

    def cc_bits(self) -> str:
        return "".join("1" if c else "0" for row in self.cc for c in row)


class Network:
    """Road network aggregate.

    Mutable until :meth:`freeze`; after that only read access is allowed and
    the model can be shared between threads.
    """

    def __init__(self, net_id: int = 1, snap: float = EPS_SNAP, eps_m: float = EPS_M,
                 eps_side: float = EPS_SIDE):
        self.net_id = net_id
        self.snap = snap
        self.eps_m = eps_m
        self.eps_side = eps_side
        self.nodes: dict[int, Node] = {}
        self.sections: dict[int, Section] = {}
        self.routes: dict[int, Route] = {}
        self.junctions: dict[int, Junction] = {}
        self.adjacency: dict = {}
        self.departures: dict = {}
        self.route_key: Optional[str] = None
        self.restrictions: tuple = ()
        self.frozen = False
        self._grid: dict = {}
        self._last_node = 0
        self._last_sid = 0
        self._node_routes: dict = {}
        self._junctions_at: dict = {}
        self._junction_of: dict = {}
        self._routes_built = False
        self._junctions_built = False
        self.routing_cache = None

    # -- nodes -----------------------------------------------------------
    def _cell(self, x, y):
        return (math.floor(x / self.snap), math.floor(y / self.snap))

    def find_node(self, point) -> Optional[int]:
        cx, cy = self._cell(point[0], point[1])
        best = None
        for i in (cx - 1, cx, cx + 1):
            for j in (cy - 1, cy, cy + 1):
                for nid in self._grid.get((i, j), ()):
                    if self.nodes[nid].point.distance(point) <= self.snap:
                        if best is None or nid < best:
                            best = nid
        return best

    def _new_node(self, point) -> int:
        nid = self._next_node_id()
        p = PlanarPoint(float(point[0]), float(point[1]))
        self.nodes[nid] = Node(nid, p)
        self._grid.setdefault(self._cell(p.x, p.y), []).append(nid)
        return nid

    def _next_node_id(self) -> int:
        self._last_node += 1
        return self._last_node

    def _next_sid(self) -> int:
        self._last_sid += 1
        return self._last_sid

    def _snap_node(self, point) -> int:
        nid = self.find_node(point)
        return nid if nid is not None else self._new_node(point)

    # -- sections --------------------------------------------------------
    def _add_section(self, curve: MeasuredPolyline, name: str, kind: int) -> int:
        if kind not in (ONE_WAY, TWO_WAY):
            raise ValueError(f"kind must be 1 or 2, got {kind}")
        if curve.length <= 0:
            raise DegenerateEdge("zero-length edge")
        a = self._snap_node(curve.start)
        b = self._snap_node(curve.end)
        if a == b:
            raise DegenerateEdge(f"edge starts and ends at node {a}")
        pa, pb = self.nodes[a].point, self.nodes[b].point
        try:
            snapped = MeasuredPolyline.from_points([pa, *curve.vertices[1:-1], pb])
        except InvalidGeometry as exc:
            raise DegenerateEdge(str(exc)) from None
        sid = self._next_sid()
        self.sections[sid] = Section(sid, a, b, kind, snapped, name)
        return sid

    def _check_mutable(self):
        if self.frozen:
            raise NetworkFrozen("network is frozen")
        self.routing_cache = None

    def _rebuild(self):
        if self._routes_built:
            build_routes(self, self.route_key)
        if self._junctions_built:
            build_junctions(self, self.restrictions)

    def freeze(self) -> "Network":
        if not self._routes_built:
            build_routes(self, "by_name")
        if not self._junctions_built:
            build_junctions(self)
        self.frozen = True
        return self

    # -- lookups ---------------------------------------------------------
    def route(self, rid: int) -> Route:
        try:
            return self.routes[rid]
        except KeyError:
            raise UnknownRoute(f"no route {rid} in network {self.net_id}") from None

    def routes_at(self, node_id: int) -> dict:
        """rid -> measure of every route passing through ``node_id``."""
        return self._node_routes.get(node_id, {})

    def junctions_at(self, node_id: int) -> list:
        return self._junctions_at.get(node_id, [])

    def junction_between(self, node_id: int, ra: int, rb: int) -> Optional[Junction]:
        return self._junction_of.get((node_id, min(ra, rb), max(ra, rb)))

    def node_position(self, node_id: int):
        """(rid, measure) for a node, preferring the smallest route id."""
        routes = self.routes_at(node_id)
        if not routes:
            raise UnknownRouteAtNode(f"node {node_id} lies on no route")
        rid = min(routes)
        return rid, routes[rid]

    def permits(self, node_id: int, src, dst) -> bool:
        """Whether the junction rules at ``node_id`` allow turning ``src -> dst``.

        ``src``/``dst`` are (rid, direction) pairs. Geometry and one-way
        kinds are not considered here.
        """
        (ra, da), (rb, db) = src, dst
        if ra != rb:
            j = self.junction_between(node_id, ra, rb)
            return j is not None and j.allows(src, dst)
        records = [j for j in self.junctions_at(node_id) if ra in (j.r1id, j.r2id)]
        if not records:
            return da == db
        return all(j.allows(src, dst) for j in records)

    @property
    def total_length(self) -> float:
        return math.fsum(s.length for s in self.sections.values())


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------

def create_topology(edges: Iterable, net_id: int = 1, snap: float = EPS_SNAP,
                    eps_m: float = EPS_M, eps_side: float = EPS_SIDE) -> Network:
    """Snap edge endpoints into nodes; one section per edge, in input order."""
    net = Network(net_id, snap, eps_m, eps_side)
    count = 0
    for edge in edges:
        edge = Edge(*edge)
        net._add_section(edge.curve, edge.name or "", int(edge.kind))
        count += 1
    if count == 0:
        raise EmptyInput("no edges to build a topology from")
    return net


def add_edge(net: Network, curve: MeasuredPolyline, name: str = "", kind: int = TWO_WAY) -> int:
    net._check_mutable()
    sid = net._add_section(curve, name or "", int(kind))
    net._rebuild()
    return sid


def add_node(net: Network, point) -> int:
    """Insert a node, splitting any section whose interior passes within snap."""
    net._check_mutable()
    existing = net.find_node(point)
    if existing is not None:
        return existing
    hits = []
    for sid in sorted(net.sections):
        s = net.sections[sid]
        proj = project_point(s.curve, point)
        if proj.distance <= net.snap and net.eps_m < proj.measure < s.length - net.eps_m:
            hits.append((sid, proj.measure))
    if not hits:
        return net._new_node(point)
    first_sid, first_m = hits[0]
    nid = net._new_node(locate_point(net.sections[first_sid].curve, first_m))
    p = net.nodes[nid].point
    for sid, m in hits:
        _split_section(net, sid, m, nid, p)
    net._rebuild()
    return nid


def _split_section(net, sid, m, nid, p):
    s = net.sections[sid]
    head = sub_polyline(s.curve, 0.0, m)
    tail = sub_polyline(s.curve, m, s.length)
    head = MeasuredPolyline.from_points([*head.vertices[:-1], p])
    tail = MeasuredPolyline.from_points([p, *tail.vertices[1:]])
    new_sid = net._next_sid()
    net.sections[new_sid] = Section(new_sid, nid, s.end_node_id, s.kind, tail, s.name)
    s.curve = head
    s.end_node_id = nid


def build_routes(net: Network, route_key: str = "by_name") -> dict:
    """Group sections into routes.

    ``by_name`` chains same-named sections end-to-start as long as they form a
    simple path, extending greedily through the smallest section id;
    ``per_section`` makes every section its own route. Route ids follow the
    smallest section id of each chain.
    """
    if route_key not in ("by_name", "per_section"):
        raise ValueError(f"unknown route key {route_key!r}")
    net.route_key = route_key
    starts_at: dict = {}
    ends_at: dict = {}
    for sid in sorted(net.sections):
        s = net.sections[sid]
        if s.name:
            starts_at.setdefault((s.name, s.start_node_id), []).append(sid)
            ends_at.setdefault((s.name, s.end_node_id), []).append(sid)

    assigned: set = set()
    routes: dict = {}
    for sid in sorted(net.sections):
        if sid in assigned:
            continue
        s = net.sections[sid]
        if route_key == "per_section" or not s.name:
            chain = [sid]
        else:
            chain = _chain(net, sid, starts_at, ends_at, assigned)
        assigned.update(chain)
        rid = len(routes) + 1
        routes[rid] = _make_route(net, rid, chain)
    net.routes = routes
    net._routes_built = True
    net._node_routes = {}
    for r in routes.values():
        for m, nid in r.nodes:
            net._node_routes.setdefault(nid, {})[r.rid] = m
    net.routing_cache = None
    return routes


def _chain(net, seed, starts_at, ends_at, assigned):
    name = net.sections[seed].name
    seed_s = net.sections[seed]
    chain = [seed]
    visited = {seed_s.start_node_id, seed_s.end_node_id}
    used = {seed}
    tail = seed_s.end_node_id
    while True:
        nxt = None
        for cand in starts_at.get((name, tail), ()):
            c = net.sections[cand]
            if cand not in assigned and cand not in used and c.end_node_id not in visited:
                nxt = cand
                break
        if nxt is None:
            break
        chain.append(nxt)
        used.add(nxt)
        tail = net.sections[nxt].end_node_id
        visited.add(tail)
    head = seed_s.start_node_id
    while True:
        prv = None
        for cand in ends_at.get((name, head), ()):
            c = net.sections[cand]
            if cand not in assigned and cand not in used and c.start_node_id not in visited:
                prv = cand
                break
        if prv is None:
            break
        chain.insert(0, prv)
        used.add(prv)
        head = net.sections[prv].start_node_id
        visited.add(head)
    return chain


def _make_route(net, rid, chain):
    vertices = list(net.sections[chain[0]].curve.vertices)
    offsets = [0]
    for sid in chain[1:]:
        offsets.append(len(vertices) - 1)
        vertices.extend(net.sections[sid].curve.vertices[1:])
    curve = MeasuredPolyline(vertices)
    cum = curve.cumulative_measure
    nodes = [(0.0, net.sections[chain[0]].start_node_id)]
    for i, sid in enumerate(chain):
        s = net.sections[sid]
        s.rid = rid
        s.pos1 = cum[offsets[i]]
        s.pos2 = cum[offsets[i + 1]] if i + 1 < len(chain) else cum[-1]
        nodes.append((s.pos2, s.end_node_id))
    kind = ONE_WAY if all(net.sections[sid].kind == ONE_WAY for sid in chain) else TWO_WAY
    first = net.sections[chain[0]]
    return Route(rid, kind, curve.length, curve, "start", first.name, tuple(chain), tuple(nodes))


def build_junctions(net: Network, restrictions: Sequence = ()) -> dict:
    """Create junctions, apply turn restrictions and derive the adjacency."""
    if not net._routes_built:
        raise ValueError("routes must be built before junctions")
    restrictions = tuple(TurnRestriction(*r) for r in restrictions)
    junctions: dict = {}
    net._junctions_at = {}
    net._junction_of = {}
    for nid in sorted(net._node_routes):
        on = net._node_routes[nid]
        rids = sorted(on)
        for i, ra in enumerate(rids):
            for rb in rids[i + 1:]:
                jid = len(junctions) + 1
                j = Junction(jid, nid, ra, rb, on[ra], on[rb], net.nodes[nid].point)
                junctions[jid] = j
                net._junctions_at.setdefault(nid, []).append(j)
                net._junction_of[(nid, ra, rb)] = j
    net.junctions = junctions
    for r in restrictions:
        _apply_restriction(net, r)
    net.restrictions = restrictions
    _derive_adjacency(net)
    net._junctions_built = True
    net.routing_cache = None
    return junctions


def _apply_restriction(net, r: TurnRestriction):
    on = net._node_routes.get(r.node_id, {})
    for rid in (r.from_route, r.to_route):
        if rid not in on:
            raise UnknownRouteAtNode(f"route {rid} does not pass node {r.node_id}")
    src, dst = (r.from_route, r.from_dir), (r.to_route, r.to_dir)
    if r.from_route != r.to_route:
        net.junction_between(r.node_id, r.from_route, r.to_route).set(src, dst, r.allow)
        return
    records = [j for j in net.junctions_at(r.node_id) if r.from_route in (j.r1id, j.r2id)]
    if not records:
        raise UnknownRouteAtNode(f"no junction at node {r.node_id} to hold the restriction")
    for j in records:
        j.set(src, dst, r.allow)


def _feasible(route: Route, m: float, direction: int, arriving: bool) -> bool:
    if direction == DOWN and route.kind == ONE_WAY:
        return False
    at_start = m == 0.0
    at_end = m == route.length
    if arriving:
        return not at_start if direction == UP else not at_end
    return not at_end if direction == UP else not at_start


def _derive_adjacency(net):
    section_from: dict = {}
    for r in net.routes.values():
        for sid in r.sections:
            s = net.sections[sid]
            section_from[(s.start_node_id, r.rid, UP)] = sid
            section_from[(s.end_node_id, r.rid, DOWN)] = sid
    adjacency = {}
    departures = {}
    for nid in sorted(net._node_routes):
        on = net._node_routes[nid]
        outs = []
        for rid in sorted(on):
            for d in (UP, DOWN):
                if _feasible(net.routes[rid], on[rid], d, arriving=False):
                    outs.append(((rid, d), section_from[(nid, rid, d)]))
        departures[nid] = tuple(outs)
        for rid in sorted(on):
            for d in (UP, DOWN):
                if not _feasible(net.routes[rid], on[rid], d, arriving=True):
                    continue
                allowed = tuple(o for o in outs if net.permits(nid, (rid, d), o[0]))
                adjacency[(nid, (rid, d))] = allowed
    net.adjacency = adjacency
    net.departures = departures


def build_network(edges, route_key: str = "by_name", restrictions: Sequence = (),
                  net_id: int = 1, snap: float = EPS_SNAP, freeze: bool = True) -> Network:
    net = create_topology(edges, net_id=net_id, snap=snap)
    build_routes(net, route_key)
    build_junctions(net, restrictions)
    if freeze:
        net.freeze()
    return net


# ---------------------------------------------------------------------------
# route accessors and topological predicates
# ---------------------------------------------------------------------------

def length(net: Network, rid: int) -> float:
    return net.route(rid).length


def curve(net: Network, rid: int) -> MeasuredPolyline:
    return net.route(rid).curve


def dual(net: Network, rid: int) -> int:
    return net.route(rid).kind


def on_route(net: Network, p, rid: int) -> bool:
    if p.rid != rid or rid not in net.routes:
        return False
    return 0.0 <= p.measure <= net.routes[rid].length + net.eps_m


def _spans_on(g, rid, eps):
    spans = []
    for iv in g.intervals:
        if iv.rid == rid:
            lo, hi = min(iv.pos1, iv.pos2), max(iv.pos1, iv.pos2)
            if hi - lo > eps:
                spans.append((lo, hi))
    return sorted(spans)


def intersects(net: Network, g, rid: int) -> bool:
    return bool(_spans_on(g, rid, net.eps_m))


def contains(net: Network, g, rid: int) -> bool:
    total = net.route(rid).length
    reach = 0.0
    for lo, hi in _spans_on(g, rid, net.eps_m):
        if lo > reach + net.eps_m:
            return False
        reach = max(reach, hi)
    return reach >= total - net.eps_m


def is_contained(net: Network, rid: int, g) -> bool:
    return contains(net, g, rid)


# ---------------------------------------------------------------------------
# CSV files
# ---------------------------------------------------------------------------

def _num(x: float) -> str:
    return repr(float(x))


def _reader(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise MalformedRow(path, 1, "missing header")
    return rows[0], [(i + 2, row) for i, row in enumerate(rows[1:]) if row]


def _expect_header(path, header, expected):
    if [h.strip() for h in header] != list(expected):
        raise MalformedRow(path, 1, f"expected header {','.join(expected)}")


def read_edges_csv(path) -> list:
    header, rows = _reader(path)
    _expect_header(path, header, ("name", "kind", "wkt"))
    edges = []
    for line, row in rows:
        if len(row) != 3:
            raise MalformedRow(path, line, f"expected 3 fields, got {len(row)}")
        name, kind, wkt = row
        try:
            kind = int(kind)
            geom = parse_wkt(wkt)
        except (ValueError, InvalidGeometry) as exc:
            raise MalformedRow(path, line, str(exc)) from None
        if kind not in (ONE_WAY, TWO_WAY):
            raise MalformedRow(path, line, f"kind must be 1 or 2, got {kind}")
        if not isinstance(geom, MeasuredPolyline):
            raise MalformedRow(path, line, "expected a LINESTRING")
        edges.append(Edge(geom, name.strip(), kind))
    return edges


def write_edges_csv(path, edges):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["name", "kind", "wkt"])
        for e in edges:
            e = Edge(*e)
            w.writerow([e.name, e.kind, to_wkt(e.curve)])


def read_restrictions_csv(path) -> list:
    header, rows = _reader(path)
    cols = ("node_id", "from_route", "from_dir", "to_route", "to_dir", "allow")
    _expect_header(path, header, cols)
    out = []
    for line, row in rows:
        try:
            if len(row) != 6:
                raise ValueError(f"expected 6 fields, got {len(row)}")
            nid, fr, fd, tr, td, allow = (c.strip() for c in row)
            if allow not in ("0", "1"):
                raise ValueError(f"allow must be 0 or 1, got {allow!r}")
            out.append(TurnRestriction(int(nid), int(fr), DIR_CODES[fd.lower()],
                                       int(tr), DIR_CODES[td.lower()], allow == "1"))
        except (ValueError, KeyError) as exc:
            raise MalformedRow(path, line, str(exc)) from None
    return out


def save_network(net: Network, directory) -> None:
    os.makedirs(directory, exist_ok=True)
    j = os.path.join
    with open(j(directory, "nodes.csv"), "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["node_id", "x", "y"])
        for nid in sorted(net.nodes):
            p = net.nodes[nid].point
            w.writerow([nid, _num(p.x), _num(p.y)])
    with open(j(directory, "sections.csv"), "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["sid", "rid", "start_node_id", "end_node_id", "pos1", "pos2", "kind",
                    "length", "name", "curve"])
        for sid in sorted(net.sections):
            s = net.sections[sid]
            w.writerow([sid, s.rid, s.start_node_id, s.end_node_id, _num(s.pos1), _num(s.pos2),
                        s.kind, _num(s.length), s.name, to_wkt(s.curve)])
    with open(j(directory, "routes.csv"), "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["rid", "kind", "length", "start_flag", "name", "sections", "curve"])
        for rid in sorted(net.routes):
            r = net.routes[rid]
            w.writerow([rid, r.kind, _num(r.length), r.start_flag, r.name,
                        " ".join(map(str, r.sections)), to_wkt(r.curve)])
    with open(j(directory, "junctions.csv"), "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["jid", "r1id", "r2id", "r1meas", "r2meas", "point", "cc", "node_id"])
        for jid in sorted(net.junctions):
            jn = net.junctions[jid]
            w.writerow([jid, jn.r1id, jn.r2id, _num(jn.r1meas), _num(jn.r2meas),
                        to_wkt(jn.point), jn.cc_bits(), jn.node_id])
    meta = {"net_id": net.net_id, "snap": net.snap, "eps_m": net.eps_m,
            "eps_side": net.eps_side, "route_key": net.route_key}
    with open(j(directory, "network.json"), "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_network(directory) -> Network:
    """Rebuild a frozen network from the files written by :func:`save_network`."""
    j = os.path.join
    meta_path = j(directory, "network.json")
    meta = {}
    if os.path.exists(meta_path):
        with open(meta_path, encoding="utf-8") as fh:
            meta = json.load(fh)
    net = Network(meta.get("net_id", 1), meta.get("snap", EPS_SNAP),
                  meta.get("eps_m", EPS_M), meta.get("eps_side", EPS_SIDE))
    net.route_key = meta.get("route_key")

    path = j(directory, "nodes.csv")
    header, rows = _reader(path)
    _expect_header(path, header, ("node_id", "x", "y"))
    for line, row in rows:
        try:
            nid, x, y = int(row[0]), float(row[1]), float(row[2])
        except (ValueError, IndexError) as exc:
            raise MalformedRow(path, line, str(exc)) from None
        net.nodes[nid] = Node(nid, PlanarPoint(x, y))
        net._grid.setdefault(net._cell(x, y), []).append(nid)

    path = j(directory, "sections.csv")
    header, rows = _reader(path)
    for line, row in rows:
        try:
            sid, rid, a, b = (int(v) for v in row[:4])
            pos1, pos2 = float(row[4]), float(row[5])
            kind = int(row[6])
            crv = parse_wkt(row[9])
        except (ValueError, IndexError, InvalidGeometry) as exc:
            raise MalformedRow(path, line, str(exc)) from None
        net.sections[sid] = Section(sid, a, b, kind, crv, row[8], rid, pos1, pos2)

    path = j(directory, "routes.csv")
    header, rows = _reader(path)
    for line, row in rows:
        try:
            rid, kind = int(row[0]), int(row[1])
            chain = tuple(int(v) for v in row[5].split())
            crv = parse_wkt(row[6])
        except (ValueError, IndexError, InvalidGeometry) as exc:
            raise MalformedRow(path, line, str(exc)) from None
        nodes = [(0.0, net.sections[chain[0]].start_node_id)]
        nodes += [(net.sections[sid].pos2, net.sections[sid].end_node_id) for sid in chain]
        net.routes[rid] = Route(rid, kind, crv.length, crv, row[3], row[4], chain, tuple(nodes))
    net._routes_built = True
    for r in net.routes.values():
        for m, nid in r.nodes:
            net._node_routes.setdefault(nid, {})[r.rid] = m

    path = j(directory, "junctions.csv")
    header, rows = _reader(path)
    for line, row in rows:
        try:
            jid, r1, r2 = int(row[0]), int(row[1]), int(row[2])
            bits = row[6]
            if len(bits) != 16 or set(bits) - {"0", "1"}:
                raise ValueError(f"bad cc bits {bits!r}")
            cc = [[bits[4 * i + k] == "1" for k in range(4)] for i in range(4)]
            jn = Junction(jid, int(row[7]), r1, r2, float(row[3]), float(row[4]),
                          parse_wkt(row[5]), cc)
        except (ValueError, IndexError, InvalidGeometry) as exc:
            raise MalformedRow(path, line, str(exc)) from None
        net.junctions[jid] = jn
        net._junctions_at.setdefault(jn.node_id, []).append(jn)
        net._junction_of[(jn.node_id, r1, r2)] = jn
    _derive_adjacency(net)
    net._junctions_built = True
    net._last_node = max(net.nodes, default=0)
    net._last_sid = max(net.sections, default=0)
    net.frozen = True
    return net
