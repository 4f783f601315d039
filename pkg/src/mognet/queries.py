"""Canned traffic queries: places visited, objects passing a region, busy routes."""

from __future__ import annotations

from .errors import UndefinedAtTime
from .motion import at, atinstant, atperiods, current, trajectory
from .network import on_route
from .temporal import Periods
from .values import GLine


def visited(store, moid: int, periods: Periods) -> GLine:
    """Network part travelled by ``moid`` during ``periods``."""
    return trajectory(atperiods(store.ugpoint(moid), periods))


def passed_through(store, region: GLine, periods: Periods) -> list:
    """Sorted ids of objects that were inside ``region`` at some time in ``periods``."""
    hits = []
    for moid in store.moids():
        part = at(atperiods(store.ugpoint(moid), periods), region)
        if part.units:
            hits.append(moid)
    return hits


def count_by_route(net, store, min_count: int, t=None) -> list:
    """Rows ``(rid, name, count)`` for routes holding more than ``min_count`` objects.

    Positions are each object's last stored position when ``t`` is None,
    otherwise its position at ``t`` (objects undefined at ``t`` are skipped).
    """
    counts: dict = {}
    for moid in store.moids():
        u = store.ugpoint(moid)
        try:
            p = current(u) if t is None else atinstant(u, t).position
        except UndefinedAtTime:
            continue
        for rid in net.routes:
            if on_route(net, p, rid):
                counts[rid] = counts.get(rid, 0) + 1
    return [(rid, net.routes[rid].name, n) for rid, n in sorted(counts.items()) if n > min_count]
