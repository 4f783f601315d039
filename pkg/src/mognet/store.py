"""Record stores for static points, static lines and moving points.

Each store is persisted as one CSV file. Files are written in a canonical
order with shortest round-trip float formatting, so save/load/save is
byte-stable.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import (
    MalformedRow,
    MognetError,
    QuasiDisjointViolation,
    UnitInvariantViolation,
    UnknownRecord,
)
from .geometry import EPS_M
from .motion import MGPointUnit, UGPoint, check_sequence
from .temporal import parse_timestamp
from .values import GLine, GPoint, RouteInterval, overlapping_pair

GPOINT_COLUMNS = ("id", "netid", "rid", "measure", "side", "name")
GLINE_COLUMNS = ("id", "glid", "netid", "rid", "pos1", "pos2", "side", "name")
MGPOINT_COLUMNS = ("moid", "netid", "rid", "side", "t1", "t2", "pos1", "pos2", "v0", "a")


@dataclass(frozen=True)
class GPointRecord:
    id: int
    geom: GPoint
    name: str = ""


@dataclass(frozen=True)
class GLineRecord:
    id: int
    geom: GLine
    name: str = ""


class Store:
    """In-memory stores with integrity checks; ``net`` enables route-bound checks."""

    def __init__(self, net=None, eps_m: float = EPS_M):
        self.net = net
        self.eps_m = net.eps_m if net is not None else eps_m
        self.gpoints: dict[int, GPointRecord] = {}
        self.glines: dict[int, GLineRecord] = {}
        self.mgpoints: dict[int, list] = {}

    # -- static points ---------------------------------------------------
    def insert_gpoint(self, rec: GPointRecord) -> int:
        if rec.id in self.gpoints:
            raise ValueError(f"gpoint id {rec.id} already stored")
        self._check_position(rec.geom.rid, rec.geom.measure)
        self.gpoints[rec.id] = rec
        return rec.id

    def _check_position(self, rid, measure):
        if self.net is None:
            return
        length = self.net.route(rid).length
        if not -self.eps_m <= measure <= length + self.eps_m:
            raise UnitInvariantViolation(f"measure {measure} outside route {rid} [0, {length}]")

    # -- static lines ----------------------------------------------------
    def _validate_gline(self, rec: GLineRecord):
        if not rec.geom.intervals:
            raise ValueError("a stored GLine needs at least one interval")
        for iv in rec.geom.intervals:
            self._check_position(iv.rid, iv.pos1)
            self._check_position(iv.rid, iv.pos2)
        pair = overlapping_pair(rec.geom.intervals, self.eps_m)
        if pair is not None:
            raise QuasiDisjointViolation(*pair)

    def insert_gline(self, rec: GLineRecord) -> int:
        if rec.id in self.glines:
            raise ValueError(f"gline id {rec.id} already stored")
        self._validate_gline(rec)
        self.glines[rec.id] = rec
        return rec.id

    def update_gline(self, rec: GLineRecord) -> int:
        if rec.id not in self.glines:
            raise UnknownRecord(f"no gline with id {rec.id}")
        self._validate_gline(rec)
        self.glines[rec.id] = rec
        return rec.id

    def gline_named(self, name: str) -> GLine:
        for rid in sorted(self.glines):
            if self.glines[rid].name == name:
                return self.glines[rid].geom
        raise UnknownRecord(f"no gline named {name!r}")

    def gpoint_named(self, name: str) -> GPoint:
        for rid in sorted(self.gpoints):
            if self.gpoints[rid].name == name:
                return self.gpoints[rid].geom
        raise UnknownRecord(f"no gpoint named {name!r}")

    # -- moving points ---------------------------------------------------
    def _check_unit(self, u: MGPointUnit):
        length = self.net.route(u.rid).length if self.net is not None else None
        u.check(length, self.eps_m)

    def append_units(self, units: Iterable[MGPointUnit]) -> int:
        """Append units at the end of their objects' histories (all or nothing)."""
        by_moid: dict = {}
        for u in units:
            self._check_unit(u)
            by_moid.setdefault(u.moid, []).append(u)
        staged = {}
        for moid, new in by_moid.items():
            new.sort(key=lambda u: u.t1)
            old = self.mgpoints.get(moid, [])
            check_sequence(old[-1:] + new, self.net, self.eps_m)
            staged[moid] = old + new
        self.mgpoints.update(staged)
        return sum(len(v) for v in by_moid.values())

    def moids(self):
        return sorted(self.mgpoints)

    def ugpoint(self, moid: int) -> UGPoint:
        try:
            units = self.mgpoints[moid]
        except KeyError:
            raise UnknownRecord(f"no moving object {moid}") from None
        return UGPoint(units, moid=moid, validate=False)

    def unit_count(self) -> int:
        return sum(len(v) for v in self.mgpoints.values())

    # -- audit -----------------------------------------------------------
    def audit(self) -> list:
        """Re-check every stored record; returns a list of problem descriptions."""
        problems = []
        for gid in sorted(self.glines):
            try:
                self._validate_gline(self.glines[gid])
            except (MognetError, ValueError) as exc:
                problems.append(f"gline {gid}: {exc}")
        for pid in sorted(self.gpoints):
            p = self.gpoints[pid].geom
            try:
                self._check_position(p.rid, p.measure)
            except MognetError as exc:
                problems.append(f"gpoint {pid}: {exc}")
        for moid in sorted(self.mgpoints):
            units = self.mgpoints[moid]
            try:
                for u in units:
                    self._check_unit(u)
                check_sequence(units, self.net, self.eps_m)
            except MognetError as exc:
                problems.append(f"object {moid}: {exc}")
        return problems

    # -- persistence -----------------------------------------------------
    def save(self, directory) -> None:
        os.makedirs(directory, exist_ok=True)
        with _writer(os.path.join(directory, "gpoints.csv"), GPOINT_COLUMNS) as w:
            for pid in sorted(self.gpoints):
                rec = self.gpoints[pid]
                g = rec.geom
                w.writerow([pid, g.netid, g.rid, repr(g.measure), g.side, rec.name])
        with _writer(os.path.join(directory, "glines.csv"), GLINE_COLUMNS) as w:
            for gid in sorted(self.glines):
                rec = self.glines[gid]
                for iv in rec.geom.intervals:
                    w.writerow([gid, rec.geom.glid, rec.geom.netid, iv.rid, repr(iv.pos1),
                                repr(iv.pos2), iv.side, rec.name])
        with _writer(os.path.join(directory, "mgpoints.csv"), MGPOINT_COLUMNS) as w:
            for moid in sorted(self.mgpoints):
                for u in self.mgpoints[moid]:
                    w.writerow(u.to_row())

    @classmethod
    def load(cls, directory, net=None) -> "Store":
        store = cls(net)
        path = os.path.join(directory, "gpoints.csv")
        for line, row in _rows(path, GPOINT_COLUMNS):
            try:
                rec = GPointRecord(int(row[0]), GPoint(int(row[1]), int(row[2]), float(row[3]),
                                                       int(row[4])), row[5])
                store.insert_gpoint(rec)
            except (ValueError, MognetError) as exc:
                raise MalformedRow(path, line, str(exc)) from None

        path = os.path.join(directory, "glines.csv")
        pending: dict = {}
        for line, row in _rows(path, GLINE_COLUMNS):
            try:
                gid = int(row[0])
                iv = RouteInterval(int(row[3]), float(row[4]), float(row[5]), int(row[6]))
                head = (int(row[1]), int(row[2]), row[7])
            except ValueError as exc:
                raise MalformedRow(path, line, str(exc)) from None
            entry = pending.setdefault(gid, [head, [], line])
            if entry[0] != head:
                raise MalformedRow(path, line, f"gline {gid} rows disagree on glid/netid/name")
            entry[1].append(iv)
        for gid, ((glid, netid, name), ivs, line) in pending.items():
            try:
                store.insert_gline(GLineRecord(gid, GLine(netid, glid, tuple(ivs)), name))
            except (ValueError, MognetError) as exc:
                raise MalformedRow(path, line, str(exc)) from None

        path = os.path.join(directory, "mgpoints.csv")
        groups: dict = {}
        for line, row in _rows(path, MGPOINT_COLUMNS):
            try:
                u = MGPointUnit(int(row[0]), int(row[1]), int(row[2]), int(row[3]),
                                parse_timestamp(row[4]), parse_timestamp(row[5]),
                                float(row[6]), float(row[7]), float(row[8]), float(row[9]))
                store._check_unit(u)
            except (ValueError, MognetError) as exc:
                raise MalformedRow(path, line, str(exc)) from None
            groups.setdefault(u.moid, []).append((u, line))
        for moid, items in groups.items():
            units = [u for u, _ in items]
            for k in range(len(units)):
                try:
                    check_sequence(units[max(0, k - 1):k + 1], net, store.eps_m)
                except MognetError as exc:
                    raise MalformedRow(path, items[k][1], str(exc)) from None
            store.mgpoints[moid] = units
        return store


class _writer:
    def __init__(self, path, columns):
        self.path = path
        self.columns = columns

    def __enter__(self):
        self.fh = open(self.path, "w", newline="", encoding="utf-8")
        w = csv.writer(self.fh, lineterminator="\n")
        w.writerow(self.columns)
        return w

    def __exit__(self, *exc):
        self.fh.close()


def _rows(path, columns):
    if not os.path.exists(path):
        return
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            return
        if tuple(h.strip() for h in header) != columns:
            raise MalformedRow(path, 1, f"expected header {','.join(columns)}")
        for i, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(columns):
                raise MalformedRow(path, i, f"expected {len(columns)} fields, got {len(row)}")
            yield i, row


# module-level spellings of the store operations

def insert_gline(store: Store, rec: GLineRecord) -> int:
    return store.insert_gline(rec)


def append_units(store: Store, units) -> int:
    return store.append_units(units)


def save(store: Store, directory) -> None:
    store.save(directory)


def load(directory, net=None) -> Store:
    return Store.load(directory, net)


__all__ = [
    "GPointRecord",
    "GLineRecord",
    "Store",
    "insert_gline",
    "append_units",
    "save",
    "load",
]
