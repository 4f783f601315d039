"""Shared fixtures builders and independent oracles for the test suite.

The oracles here deliberately avoid the engine's own search and algebra code:
they walk the raw network records or evaluate kinematics directly.
"""

from __future__ import annotations

import csv
import math
import random

from mognet.geometry import MeasuredPolyline
from mognet.network import DOWN, ONE_WAY, TWO_WAY, UP, Edge, TurnRestriction, build_network

# ---------------------------------------------------------------------------
# networks
# ---------------------------------------------------------------------------


def line(*pts) -> MeasuredPolyline:
    return MeasuredPolyline([tuple(map(float, p)) for p in pts])


def t1_edges():
    """Route A along the x axis with a node at 600, route B going north from it."""
    return [
        Edge(line((0, 0), (600, 0)), "A", TWO_WAY),
        Edge(line((600, 0), (1000, 0)), "A", TWO_WAY),
        Edge(line((600, 0), (600, 500)), "B", TWO_WAY),
    ]


def t1_network(restrictions=()):
    return build_network(t1_edges(), restrictions=restrictions)


def t1_ids(net):
    """(rid of A, rid of B, node id at the junction)."""
    a = next(r.rid for r in net.routes.values() if r.name == "A")
    b = next(r.rid for r in net.routes.values() if r.name == "B")
    return a, b, net.find_node((600.0, 0.0))


def grid_edges(n, spacing=100.0):
    """``n`` x ``n`` node grid with named rows H<i> and columns V<i>, all two-way."""
    edges = []
    for i in range(n):
        for j in range(n - 1):
            edges.append(Edge(line((j * spacing, i * spacing), ((j + 1) * spacing, i * spacing)),
                              f"H{i}", TWO_WAY))
            edges.append(Edge(line((i * spacing, j * spacing), (i * spacing, (j + 1) * spacing)),
                              f"V{i}", TWO_WAY))
    return edges


def write_grid_csv(path, n, spacing=100.0):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["name", "kind", "wkt"])
        for e in grid_edges(n, spacing):
            coords = ", ".join(f"{x:g} {y:g}" for x, y in e.curve.vertices)
            w.writerow([e.name, e.kind, f"LINESTRING ({coords})"])


def random_network(rng: random.Random, max_sections=12):
    """Small random multigraph with random names, kinds and turn matrices."""
    n_nodes = rng.randint(2, 7)
    pts = set()
    while len(pts) < n_nodes:
        pts.add((rng.randint(0, 6) * 50.0, rng.randint(0, 6) * 50.0))
    pts = sorted(pts)
    edges = []
    for _ in range(rng.randint(1, max_sections)):
        a, b = rng.sample(pts, 2)
        mid = ((a[0] + b[0]) / 2 + rng.uniform(-20, 20), (a[1] + b[1]) / 2 + rng.uniform(-20, 20))
        curve = line(a, mid, b) if rng.random() < 0.5 else line(a, b)
        name = rng.choice(["A", "B", "C", ""])
        kind = ONE_WAY if rng.random() < 0.25 else TWO_WAY
        edges.append(Edge(curve, name, kind))
    route_key = rng.choice(["by_name", "per_section"])
    base = build_network(edges, route_key=route_key)
    restrictions = []
    for j in base.junctions.values():
        for src in ((j.r1id, UP), (j.r1id, DOWN), (j.r2id, UP), (j.r2id, DOWN)):
            for dst in ((j.r1id, UP), (j.r1id, DOWN), (j.r2id, UP), (j.r2id, DOWN)):
                if rng.random() < 0.3:
                    restrictions.append(TurnRestriction(j.node_id, src[0], src[1], dst[0], dst[1],
                                                        rng.random() < 0.5))
    return build_network(edges, route_key=route_key, restrictions=restrictions)


# ---------------------------------------------------------------------------
# routing oracle: exhaustive enumeration of turn-legal walks
# ---------------------------------------------------------------------------

def _cell(j, rid, direction):
    return (0 if rid == j.r1id else 2) + (0 if direction == UP else 1)


def _turn_ok(net, node, arrival, departure):
    if arrival is None:
        return True
    juncs = [j for j in net.junctions.values() if j.node_id == node]
    if arrival[0] != departure[0]:
        pair = {arrival[0], departure[0]}
        for j in juncs:
            if {j.r1id, j.r2id} == pair:
                return j.cc[_cell(j, *arrival)][_cell(j, *departure)]
        return False
    own = [j for j in juncs if arrival[0] in (j.r1id, j.r2id)]
    if not own:
        return arrival[1] == departure[1]
    return all(j.cc[_cell(j, *arrival)][_cell(j, *departure)] for j in own)


def _locate(net, p):
    route = net.routes[p.rid]
    for m, nid in route.nodes:
        if abs(m - p.measure) <= net.eps_m:
            return ("node", nid)
    for sid in route.sections:
        s = net.sections[sid]
        if s.pos1 < p.measure < s.pos2:
            return ("section", s)
    raise AssertionError("position not on its route")


def brute_force_cost(net, src, dst):
    """Cheapest turn-legal walk cost, or None when there is none.

    Walks are enumerated depth first over section traversals, up to
    2 * |sections| of them, with branch-and-bound on the best cost found.
    """
    if src.rid == dst.rid and abs(src.measure - dst.measure) <= net.eps_m:
        return 0.0
    a, b = _locate(net, src), _locate(net, dst)
    if a[0] == "node" and b[0] == "node" and a[1] == b[1]:
        return 0.0
    two_way = {rid: r.kind != ONE_WAY for rid, r in net.routes.items()}
    moves: dict = {}
    for s in net.sections.values():
        moves.setdefault(s.start_node_id, []).append(((s.rid, UP), s.end_node_id, s.length))
        if two_way[s.rid]:
            moves.setdefault(s.end_node_id, []).append(((s.rid, DOWN), s.start_node_id, s.length))
    limit = 2 * len(net.sections)
    best = [math.inf]

    def finish(node, arrival, cost):
        if b[0] == "node":
            if node == b[1]:
                best[0] = min(best[0], cost)
            return
        s = b[1]
        if node == s.start_node_id and _turn_ok(net, node, arrival, (s.rid, UP)):
            best[0] = min(best[0], cost + dst.measure - s.pos1)
        if two_way[s.rid] and node == s.end_node_id and _turn_ok(net, node, arrival, (s.rid, DOWN)):
            best[0] = min(best[0], cost + s.pos2 - dst.measure)

    def walk(node, arrival, cost, depth, seen):
        if cost >= best[0]:
            return
        finish(node, arrival, cost)
        if depth == limit:
            return
        for departure, nxt, w in moves.get(node, ()):
            state = (nxt, departure)
            if state in seen or not _turn_ok(net, node, arrival, departure):
                continue
            seen.add(state)
            walk(nxt, departure, cost + w, depth + 1, seen)
            seen.discard(state)

    if a[0] == "node":
        walk(a[1], None, 0.0, 0, set())
    else:
        s = a[1]
        if b[0] == "section" and b[1].sid == s.sid:
            if dst.measure > src.measure:
                best[0] = dst.measure - src.measure
            elif two_way[s.rid]:
                best[0] = src.measure - dst.measure
        walk(s.end_node_id, (s.rid, UP), s.pos2 - src.measure, 1, {(s.end_node_id, (s.rid, UP))})
        if two_way[s.rid]:
            walk(s.start_node_id, (s.rid, DOWN), src.measure - s.pos1, 1,
                 {(s.start_node_id, (s.rid, DOWN))})
    return None if best[0] == math.inf else best[0]


def random_position(rng, net):
    from mognet.values import GPoint

    rid = rng.choice(sorted(net.routes))
    route = net.routes[rid]
    if rng.random() < 0.3:
        m = rng.choice(route.nodes)[0]
    else:
        m = rng.uniform(0.0, route.length)
    return GPoint(net.net_id, rid, m)


# ---------------------------------------------------------------------------
# kinematics oracles
# ---------------------------------------------------------------------------

def eq1(pos1, v0, a, tau):
    return pos1 + v0 * tau + 0.5 * a * tau * tau


def sweep_measure(unit, t):
    """Measure of ``unit`` at integer millisecond ``t`` straight from the motion law."""
    return eq1(unit.pos1, unit.v0, unit.a, (t - unit.t1) / 1000.0)


def sweep_inside_runs(units, g, eps):
    """Maximal [start, end] millisecond runs where the object lies inside ``g``."""
    runs = []
    for u in units:
        ivs = [iv for iv in g.intervals
               if iv.rid == u.rid and (iv.side == 0 or u.side == 0 or iv.side == u.side)]
        start = None
        for t in range(u.t1, u.t2 + 1):
            m = sweep_measure(u, t)
            hit = any(iv.lo - eps <= m <= iv.hi + eps for iv in ivs)
            if hit and start is None:
                start = t
            if not hit and start is not None:
                runs.append((start, t - 1))
                start = None
        if start is not None:
            runs.append((start, u.t2))
    merged = []
    for s, e in runs:
        if merged and s <= merged[-1][1] + 1:
            merged[-1] = (merged[-1][0], max(merged[-1][1], e))
        else:
            merged.append((s, e))
    return merged


# ---------------------------------------------------------------------------
# a tiny hand-made moving dataset on T1
# ---------------------------------------------------------------------------

T0 = 1295568000000  # 2011-01-21T00:00:00.000Z


def t1_store():
    """Object 1 drives A 0->1000 at 10 m/s; object 2 drives B 0->500 at 5 m/s.

    Both run from T0 for 100 s. A line named "stretch" covers A[300, 700] and
    a point named "corner" sits at A 600.
    """
    from mognet.motion import MGPointUnit
    from mognet.store import GLineRecord, GPointRecord, Store
    from mognet.values import GLine, GPoint, RouteInterval

    net = t1_network()
    a, b, _ = t1_ids(net)
    store = Store(net)
    store.append_units([MGPointUnit(1, 1, a, 0, T0, T0 + 100_000, 0.0, 1000.0, 10.0, 0.0)])
    store.append_units([MGPointUnit(2, 1, b, 0, T0, T0 + 100_000, 0.0, 500.0, 5.0, 0.0)])
    store.insert_gline(GLineRecord(1, GLine(1, 1, (RouteInterval(a, 300, 700),)), "stretch"))
    store.insert_gpoint(GPointRecord(1, GPoint(1, a, 600.0), "corner"))
    return net, store
