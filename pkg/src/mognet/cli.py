"""Command-line front end.

All commands work on a data directory (``--data``, default ``./data``)::

    data/edges.csv         imported edge list
    data/network/          built network (nodes, sections, routes, junctions)
    data/gpoints.csv       static points
    data/glines.csv        static lines
    data/mgpoints.csv      moving-point units
    data/samples.csv       generator samples

Exit status: 0 on success, 1 on a usage error, 2 on a data error.
"""

from __future__ import annotations

import argparse
import logging
import os
import shutil
import sys

from . import moql, queries
from .errors import MognetError, QuerySyntaxError, QueryTypeError
from .generator import GenParams, generate, write_samples
from .network import (
    build_network,
    load_network,
    read_edges_csv,
    read_restrictions_csv,
    save_network,
    write_edges_csv,
)
from .store import GLineRecord, Store
from .temporal import Period, Periods, parse_timestamp
from .values import GLine, RouteInterval

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _paths(data):
    return {
        "edges": os.path.join(data, "edges.csv"),
        "network": os.path.join(data, "network"),
        "samples": os.path.join(data, "samples.csv"),
    }


def _load(args):
    net = load_network(_paths(args.data)["network"])
    return net, Store.load(args.data, net)


def _timestamp(text):
    try:
        return parse_timestamp(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _periods(args) -> Periods:
    if args.to <= args.from_:
        raise UsageError("--to must be later than --from")
    return Periods([Period(args.from_, args.to)])


def _interval(text):
    parts = text.split(":")
    if len(parts) not in (3, 4):
        raise argparse.ArgumentTypeError("expected rid:pos1:pos2[:side]")
    try:
        rid, a, b = int(parts[0]), float(parts[1]), float(parts[2])
        side = int(parts[3]) if len(parts) == 4 else 0
        return RouteInterval(rid, a, b, side)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_import_edges(args, out):
    edges = read_edges_csv(args.csv)
    os.makedirs(args.data, exist_ok=True)
    write_edges_csv(_paths(args.data)["edges"], edges)
    print(f"imported {len(edges)} edges", file=out)


def cmd_build_network(args, out):
    paths = _paths(args.data)
    edges = read_edges_csv(paths["edges"])
    restrictions = read_restrictions_csv(args.restrictions) if args.restrictions else ()
    net = build_network(edges, route_key=args.route_key, restrictions=restrictions,
                        net_id=args.net_id, snap=args.snap)
    save_network(net, paths["network"])
    print(f"nodes={len(net.nodes)} sections={len(net.sections)} routes={len(net.routes)} "
          f"junctions={len(net.junctions)}", file=out)


def cmd_generate(args, out):
    try:
        params = GenParams(periods=args.periods, interval=args.interval,
                           per_period=args.per_period, seed=args.seed, cruise_speed=args.cruise,
                           accel=args.accel, decel=args.decel, red_prob=args.red_prob,
                           red_wait=args.red_wait, sample_step=args.sample_step,
                           start_time=args.start)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    net, store = _load(args)
    store.mgpoints.clear()  # a run replaces earlier moving data
    summary = generate(net, params, store)
    store.save(args.data)
    write_samples(_paths(args.data)["samples"], summary.samples)
    print(f"objects={summary.objects} units={summary.units} samples={summary.rows}", file=out)


def cmd_add_gline(args, out):
    net, store = _load(args)
    gid = args.id if args.id is not None else max(store.glines, default=0) + 1
    rec = GLineRecord(gid, GLine(net.net_id, gid, tuple(args.interval)), args.name)
    if args.replace and gid in store.glines:
        store.update_gline(rec)
    else:
        store.insert_gline(rec)
    store.save(args.data)
    print(f"gline {gid}", file=out)


def cmd_query(args, out):
    net, store = _load(args)
    print(moql.run(args.text, net, store), file=out)


def cmd_visited(args, out):
    _, store = _load(args)
    print(queries.visited(store, args.moid, _periods(args)), file=out)


def cmd_passed_through(args, out):
    _, store = _load(args)
    region = store.gline_named(args.gline)
    print(", ".join(str(m) for m in queries.passed_through(store, region, _periods(args))),
          file=out)


def cmd_count_by_route(args, out):
    net, store = _load(args)
    t = None if args.at == "now" else _timestamp(args.at)
    rows = queries.count_by_route(net, store, args.min, t)
    print(moql.format_value(rows, "table"), file=out)


def cmd_audit(args, out):
    net, store = _load(args)
    problems = store.audit()
    for p in problems:
        print(p, file=out)
    if problems:
        return EXIT_DATA
    print(f"ok: {len(store.mgpoints)} objects, {store.unit_count()} units, "
          f"{len(store.glines)} glines, {len(store.gpoints)} gpoints", file=out)


def cmd_export(args, out):
    paths = _paths(args.data)
    os.makedirs(args.out, exist_ok=True)
    if args.what == "network":
        net = load_network(paths["network"])
        save_network(net, args.out)
        written = sorted(os.listdir(paths["network"]))
    else:
        name = "samples.csv" if args.what == "samples" else "mgpoints.csv"
        src = os.path.join(args.data, name)
        if not os.path.exists(src):
            raise MognetError(f"{src} does not exist; run generate first")
        shutil.copyfile(src, os.path.join(args.out, name))
        written = [name]
    print(f"wrote {', '.join(written)} to {args.out}", file=out)


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mognet", description="Moving objects on road networks.")
    p.add_argument("--data", default="data", help="data directory (default: ./data)")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("import-edges", help="import an edge list (name,kind,wkt)")
    s.add_argument("csv")
    s.set_defaults(func=cmd_import_edges)

    s = sub.add_parser("build-network", help="build routes and junctions from imported edges")
    s.add_argument("--restrictions", help="turn restriction CSV")
    s.add_argument("--route-key", choices=("by_name", "per_section"), default="by_name")
    s.add_argument("--snap", type=float, default=0.01, help="node snapping distance in m")
    s.add_argument("--net-id", type=int, default=1)
    s.set_defaults(func=cmd_build_network)

    s = sub.add_parser("generate", help="generate moving objects")
    s.add_argument("--periods", type=int, required=True)
    s.add_argument("--interval", type=float, required=True, help="seconds between periods")
    s.add_argument("--per-period", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--cruise", type=float, default=14.0, help="cruise speed in m/s")
    s.add_argument("--accel", type=float, default=2.0, help="m/s^2")
    s.add_argument("--decel", type=float, default=3.0, help="m/s^2")
    s.add_argument("--red-prob", type=float, default=0.3)
    s.add_argument("--red-wait", type=float, default=20.0, help="seconds")
    s.add_argument("--sample-step", type=float, default=2.0, help="seconds")
    s.add_argument("--start", type=_timestamp, default=parse_timestamp("2011-01-21T00:00:00.000Z"))
    s.set_defaults(func=cmd_generate)

    s = sub.add_parser("add-gline", help="store a named network line")
    s.add_argument("--name", required=True)
    s.add_argument("--interval", type=_interval, action="append", required=True,
                   help="rid:pos1:pos2[:side], repeatable")
    s.add_argument("--id", type=int)
    s.add_argument("--replace", action="store_true", help="update an existing id")
    s.set_defaults(func=cmd_add_gline)

    s = sub.add_parser("query", help="evaluate a MOQL expression")
    s.add_argument("text")
    s.set_defaults(func=cmd_query)

    s = sub.add_parser("visited", help="network part travelled by an object in a period")
    s.add_argument("--moid", type=int, required=True)
    s.add_argument("--from", dest="from_", type=_timestamp, required=True)
    s.add_argument("--to", type=_timestamp, required=True)
    s.set_defaults(func=cmd_visited)

    s = sub.add_parser("passed-through", help="objects inside a stored line during a period")
    s.add_argument("--gline", required=True, help="name of a stored gline")
    s.add_argument("--from", dest="from_", type=_timestamp, required=True)
    s.add_argument("--to", type=_timestamp, required=True)
    s.set_defaults(func=cmd_passed_through)

    s = sub.add_parser("count-by-route", help="routes holding more than N objects")
    s.add_argument("--min", type=int, required=True)
    s.add_argument("--at", default="now", help="'now' or an ISO-8601 timestamp")
    s.set_defaults(func=cmd_count_by_route)

    s = sub.add_parser("audit", help="check every stored record")
    s.set_defaults(func=cmd_audit)

    s = sub.add_parser("export", help="copy network or moving data to a directory")
    s.add_argument("--what", choices=("network", "samples", "mgpoints"), required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_export)
    return p


def main(argv=None, out=None) -> int:
    out = out if out is not None else sys.stdout
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(message)s")
        if args.command == "count-by-route" and args.at != "now":
            _timestamp(args.at)
        return args.func(args, out) or EXIT_OK
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE
    except (UsageError, argparse.ArgumentTypeError, QuerySyntaxError, QueryTypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (MognetError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


__all__ = ["build_parser", "main"]
