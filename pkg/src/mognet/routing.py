"""Minimum-length paths between arbitrary network positions.

The search runs Dijkstra over arrival states ``(node, rid, direction)`` rather
than plain nodes, so that junction connectivity codes (turn bans, U-turn
bans) and one-way routes constrain which departures follow an arrival.
Origin and destination may lie anywhere on a route; they are attached to the
neighbouring nodes of their route as virtual links.
"""

from __future__ import annotations

import heapq
from bisect import bisect_left
from typing import NamedTuple, Optional

from .errors import MeasureOutOfRange, NoPath
from .network import DOWN, ONE_WAY, UP, Network
from .values import GLine, GPoint, RouteInterval

_ORIGIN = -1
_SINK = -2


class _Graph:
    """Arrival-state graph compiled from a network's adjacency."""

    def __init__(self, net: Network):
        keys = sorted((n, r, d) for (n, (r, d)) in net.adjacency)
        self.keys = keys
        self.index = {k: i for i, k in enumerate(keys)}
        # state i has rank i: the sort above already orders by (node, rid, direction)
        succ = []
        for n, r, d in keys:
            succ.append([self._link(net, r2, d2, sid)
                         for (r2, d2), sid in net.adjacency[(n, (r, d))]])
        self.succ = succ
        self.departures = {
            n: [self._link(net, r2, d2, sid) for (r2, d2), sid in outs]
            for n, outs in net.departures.items()
        }
        self.states_at: dict = {}
        for i, (n, r, d) in enumerate(keys):
            self.states_at.setdefault(n, []).append(i)

    def _link(self, net, rid, direction, sid):
        s = net.sections[sid]
        if direction == UP:
            j = self.index[(s.end_node_id, rid, UP)]
            return (s.pos2 - s.pos1, j, rid, s.pos1, s.pos2)
        j = self.index[(s.start_node_id, rid, DOWN)]
        return (s.pos2 - s.pos1, j, rid, s.pos2, s.pos1)


def _graph(net: Network) -> _Graph:
    if net.routing_cache is None:
        net.routing_cache = _Graph(net)
    return net.routing_cache


class _Anchor(NamedTuple):
    """Where a GPoint sits relative to the nodes of its route."""

    rid: int
    measure: float
    node: Optional[int]
    lo: tuple  # (measure, node) just below, or None
    hi: tuple  # (measure, node) just above, or None


def _anchor(net: Network, p: GPoint) -> _Anchor:
    route = net.route(p.rid)
    m = p.measure
    if m < -net.eps_m or m > route.length + net.eps_m:
        raise MeasureOutOfRange(f"measure {m} outside route {p.rid} [0, {route.length}]")
    m = min(max(m, 0.0), route.length)
    measures = [nm for nm, _ in route.nodes]
    k = bisect_left(measures, m)
    for cand in (k - 1, k):
        if 0 <= cand < len(measures) and abs(measures[cand] - m) <= net.eps_m:
            nm, nid = route.nodes[cand]
            return _Anchor(p.rid, nm, nid, None, None)
    return _Anchor(p.rid, m, None, route.nodes[k - 1], route.nodes[k])


class PathResult(NamedTuple):
    gline: GLine
    cost: float


def shortest_path_with_cost(net: Network, src: GPoint, dst: GPoint) -> PathResult:
    g = _graph(net)
    a = _anchor(net, src)
    b = _anchor(net, dst)
    empty = PathResult(GLine(net.net_id, 0, ()), 0.0)
    if a.node is not None and a.node == b.node:
        return empty
    if a.rid == b.rid and abs(a.measure - b.measure) <= net.eps_m:
        return empty

    # destination entries: node -> [(direction needed, residual cost, leg)]
    entries: dict = {}
    if b.node is None:
        route_b = net.routes[b.rid]
        lo_m, lo_n = b.lo
        hi_m, hi_n = b.hi
        entries.setdefault(lo_n, []).append((UP, b.measure - lo_m, (b.rid, lo_m, b.measure)))
        if route_b.kind != ONE_WAY:
            entries.setdefault(hi_n, []).append((DOWN, hi_m - b.measure, (b.rid, hi_m, b.measure)))

    n_states = len(g.keys)
    dist = [float("inf")] * n_states
    pred = [None] * n_states
    pred_rank = [n_states] * n_states
    done = bytearray(n_states)
    heap = []
    sink = [float("inf"), None, n_states]  # cost, (pred, leg), pred rank

    def relax(j, cost, frm, rank, leg):
        old = dist[j]
        if cost < old - 1e-12 * max(1.0, cost) or (
            abs(cost - old) <= 1e-12 * max(1.0, cost) and rank < pred_rank[j]
        ):
            if cost < old:
                dist[j] = cost
            pred[j] = (frm, leg)
            pred_rank[j] = rank
            heapq.heappush(heap, (dist[j], j))

    def relax_sink(cost, frm, rank, leg):
        old = sink[0]
        if cost < old - 1e-12 * max(1.0, cost) or (
            abs(cost - old) <= 1e-12 * max(1.0, cost) and rank < sink[2]
        ):
            if cost < old:
                sink[0] = cost
            sink[1] = (frm, leg)
            sink[2] = rank
            heapq.heappush(heap, (sink[0], n_states))

    def reach_target(node, arrival, cost, frm, rank):
        if b.node is not None:
            if node == b.node:
                relax_sink(cost, frm, rank, None)
            return
        for direction, residual, leg in entries.get(node, ()):
            want = (b.rid, direction)
            if arrival is None:
                ok = any(o[2] == b.rid and _dir(o) == direction for o in g.departures.get(node, ()))
            else:
                ok = net.permits(node, arrival, want)
            if ok:
                relax_sink(cost + residual, frm, rank, leg)

    # origin
    origin_rank = -1
    if a.node is not None:
        for cost, j, rid, m1, m2 in g.departures.get(a.node, ()):
            relax(j, cost, _ORIGIN, origin_rank, (rid, m1, m2))
        reach_target(a.node, None, 0.0, _ORIGIN, origin_rank)
    else:
        route_a = net.routes[a.rid]
        hi_m, hi_n = a.hi
        lo_m, lo_n = a.lo
        relax(g.index[(hi_n, a.rid, UP)], hi_m - a.measure, _ORIGIN, origin_rank,
              (a.rid, a.measure, hi_m))
        if route_a.kind != ONE_WAY:
            relax(g.index[(lo_n, a.rid, DOWN)], a.measure - lo_m, _ORIGIN, origin_rank,
                  (a.rid, a.measure, lo_m))
        if b.node is None and b.rid == a.rid and b.lo == a.lo:
            if b.measure > a.measure:
                relax_sink(b.measure - a.measure, _ORIGIN, origin_rank, (a.rid, a.measure, b.measure))
            elif route_a.kind != ONE_WAY:
                relax_sink(a.measure - b.measure, _ORIGIN, origin_rank, (a.rid, a.measure, b.measure))

    keys = g.keys
    succ = g.succ
    while heap:
        cost, i = heapq.heappop(heap)
        if i == n_states:
            break
        if done[i] or cost > dist[i]:
            continue
        done[i] = 1
        node, rid, d = keys[i]
        if node in entries or node == b.node:
            reach_target(node, (rid, d), cost, i, i)
        for link in succ[i]:
            j = link[1]
            if done[j]:
                continue
            c = cost + link[0]
            old = dist[j]
            tol = 1e-12 * c if c > 1.0 else 1e-12
            if c < old - tol:
                dist[j] = c
            elif c > old + tol or i >= pred_rank[j]:
                continue
            elif c < old:
                dist[j] = c
            else:
                pred[j] = (i, link)
                pred_rank[j] = i
                continue
            pred[j] = (i, link)
            pred_rank[j] = i
            heapq.heappush(heap, (c, j))
    else:
        raise NoPath(f"no turn-legal path from {src} to {dst}")

    legs = []
    frm, leg = sink[1]
    if leg is not None:
        legs.append(leg)
    while frm != _ORIGIN:
        frm, leg = pred[frm]
        legs.append(leg[2:] if len(leg) == 5 else leg)
    legs.reverse()
    return PathResult(GLine(net.net_id, 0, _merge_legs(legs)), sink[0])


def _dir(link):
    return UP if link[4] > link[3] else DOWN


def _merge_legs(legs):
    out = []
    for rid, m1, m2 in legs:
        if out:
            prev = out[-1]
            same_dir = (prev.pos2 - prev.pos1 > 0) == (m2 - m1 > 0)
            if prev.rid == rid and same_dir and prev.pos2 == m1:
                out[-1] = RouteInterval(rid, prev.pos1, m2, 0)
                continue
        out.append(RouteInterval(rid, m1, m2, 0))
    return tuple(out)


def shortest_path(net: Network, src: GPoint, dst: GPoint) -> GLine:
    """Turn-legal minimum-length path; intervals follow the order of travel."""
    return shortest_path_with_cost(net, src, dst).gline


def network_distance(net: Network, src: GPoint, dst: GPoint) -> float:
    return shortest_path_with_cost(net, src, dst).cost
