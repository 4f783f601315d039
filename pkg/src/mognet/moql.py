"""MOQL: a small expression language over the motion algebra.

A query is a single expression built from function calls and literals::

    trajectory(atperiods(mo(1000), periods("2011-01-21T00:04:42.600Z",
                                           "2011-01-21T00:10:03.000Z")))

Text goes through three stages: :func:`parse` builds an AST (keeping source
positions), :func:`check` infers a result type against the function table,
and :func:`evaluate` runs it over a network and a store.  :func:`unparse`
prints an AST in canonical form; parsing that output yields an equal AST.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from typing import Callable

from . import motion, network, queries, routing
from .errors import (
    MognetError,
    QueryError,
    QueryEvaluationError,
    QuerySyntaxError,
    QueryTypeError,
    UnknownRoute,
)
from .geometry import PlanarPoint, to_wkt
from .motion import UGPoint
from .temporal import Period, Periods, format_timestamp, is_timestamp, parse_timestamp
from .values import GLine, GPoint, RouteInterval

# ---------------------------------------------------------------------------
# lexer
# ---------------------------------------------------------------------------

_TOKEN_SPEC = [
    ("WS", r"[ \t\r\n]+"),
    ("FLOAT", r"[-+]?(?:\d+\.\d*(?:[eE][-+]?\d+)?|\.\d+(?:[eE][-+]?\d+)?|\d+[eE][-+]?\d+)"),
    ("INT", r"[-+]?\d+"),
    ("STRING", r'"(?:[^"\\\n]|\\.)*"'),
    ("IDENT", r"[A-Za-z_][A-Za-z0-9_]*"),
    ("LPAREN", r"\("),
    ("RPAREN", r"\)"),
    ("COMMA", r","),
]
_TOKEN_RE = re.compile("|".join(f"(?P<{name}>{pat})" for name, pat in _TOKEN_SPEC))
_DESCRIBE = {
    "FLOAT": "number", "INT": "integer", "STRING": "string", "IDENT": "identifier",
    "LPAREN": "'('", "RPAREN": "')'", "COMMA": "','", "EOF": "end of input",
}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            if text[pos] == '"':
                raise QuerySyntaxError("unterminated string literal", line, col)
            raise QuerySyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        chunk = m.group()
        if kind != "WS":
            tokens.append(Token(kind, chunk, line, col))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("EOF", "", line, pos - line_start + 1))
    return tokens


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Literal:
    """``kind`` is one of int, float, string, timestamp, periods."""

    kind: str
    value: object
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


class _Parser:
    def __init__(self, text):
        self.tokens = tokenize(text)
        self.i = 0

    def peek(self) -> Token:
        return self.tokens[self.i]

    def take(self, *kinds) -> Token:
        tok = self.tokens[self.i]
        if tok.kind not in kinds:
            wanted = " or ".join(_DESCRIBE[k] for k in kinds)
            found = _DESCRIBE[tok.kind] if tok.kind == "EOF" else repr(tok.text)
            raise QuerySyntaxError(f"expected {wanted}, found {found}", tok.line, tok.col)
        self.i += 1
        return tok

    def query(self):
        node = self.expr()
        self.take("EOF")
        return node

    def expr(self):
        tok = self.take("IDENT", "INT", "FLOAT", "STRING")
        if tok.kind == "INT":
            return Literal("int", int(tok.text), tok.line, tok.col)
        if tok.kind == "FLOAT":
            value = float(tok.text)
            if not math.isfinite(value):
                raise QuerySyntaxError(f"number {tok.text} is out of range", tok.line, tok.col)
            return Literal("float", value, tok.line, tok.col)
        if tok.kind == "STRING":
            text = _unquote(tok)
            if is_timestamp(text):
                return Literal("timestamp", _timestamp(text, tok), tok.line, tok.col)
            return Literal("string", text, tok.line, tok.col)
        name = tok.text.lower()
        self.take("LPAREN")
        if name == "periods":
            return self.period_literal(tok)
        args = []
        if self.peek().kind != "RPAREN":
            args.append(self.expr())
            while self.peek().kind == "COMMA":
                self.i += 1
                args.append(self.expr())
        self.take("RPAREN", "COMMA")
        return Call(name, tuple(args), tok.line, tok.col)

    def period_literal(self, head: Token):
        bounds = []
        for k in range(2):
            tok = self.take("STRING")
            text = _unquote(tok)
            if not is_timestamp(text):
                raise QuerySyntaxError(f"expected ISO-8601 timestamp, found {tok.text}",
                                       tok.line, tok.col)
            bounds.append(_timestamp(text, tok))
            if k == 0:
                self.take("COMMA")
        self.take("RPAREN")
        if bounds[0] >= bounds[1]:
            raise QuerySyntaxError("period must end after it starts", head.line, head.col)
        return Literal("periods", tuple(bounds), head.line, head.col)


def _unquote(tok: Token) -> str:
    try:
        return json.loads(tok.text)
    except ValueError:
        raise QuerySyntaxError(f"bad string literal {tok.text}", tok.line, tok.col) from None


def _timestamp(text: str, tok: Token) -> int:
    try:
        return parse_timestamp(text)
    except ValueError as exc:
        raise QuerySyntaxError(str(exc), tok.line, tok.col) from None


def parse(text: str):
    return _Parser(text).query()


def unparse(node) -> str:
    """Canonical text for an AST."""
    if isinstance(node, Call):
        return f"{node.name}({', '.join(unparse(a) for a in node.args)})"
    if node.kind == "int":
        return str(node.value)
    if node.kind == "float":
        return repr(node.value)
    if node.kind == "string":
        return json.dumps(node.value)
    if node.kind == "timestamp":
        return json.dumps(format_timestamp(node.value))
    a, b = node.value
    return f'periods("{format_timestamp(a)}", "{format_timestamp(b)}")'


# ---------------------------------------------------------------------------
# function table
# ---------------------------------------------------------------------------

# Argument types a literal or result may be promoted to.
_WIDENS = {
    "int": {"int", "float", "moving"},
    "ugpoint": {"ugpoint", "moving"},
}


def _accepts(param: str, actual: str) -> bool:
    return param == actual or param in _WIDENS.get(actual, ())


@dataclass(frozen=True)
class Signature:
    params: tuple
    result: str
    impl: Callable


class _Context:
    def __init__(self, net, store):
        self.net = net
        self.store = store

    def moving(self, x) -> UGPoint:
        return x if isinstance(x, UGPoint) else self.store.ugpoint(x)

    def periods(self, bounds) -> Periods:
        return Periods([Period(*bounds)])


def _sig(params, result, impl):
    return Signature(tuple(params.split()) if params else (), result, impl)


def _netid_route(impl):
    # LENGTH/CURVE/DUAL accept an optional leading network id
    def call(c, netid, rid):
        if netid != c.net.net_id:
            raise UnknownRoute(f"no network {netid}")
        return impl(c, rid)
    return call


_length = lambda c, rid: network.length(c.net, rid)  # noqa: E731
_curve = lambda c, rid: network.curve(c.net, rid)  # noqa: E731
_dual = lambda c, rid: network.dual(c.net, rid)  # noqa: E731

FUNCTIONS: dict = {
    # lookups and constructors
    "mo": [_sig("int", "ugpoint", lambda c, i: c.store.ugpoint(i))],
    "gline_named": [_sig("string", "gline", lambda c, s: c.store.gline_named(s))],
    "gpoint_named": [_sig("string", "gpoint", lambda c, s: c.store.gpoint_named(s))],
    "gpoint": [
        _sig("int float", "gpoint", lambda c, r, m: GPoint(c.net.net_id, r, m)),
        _sig("int float int", "gpoint", lambda c, r, m, s: GPoint(c.net.net_id, r, m, s)),
    ],
    "gline": [
        _sig("int float float", "gline",
             lambda c, r, a, b: GLine(c.net.net_id, 0, (RouteInterval(r, a, b),))),
        _sig("int float float int", "gline",
             lambda c, r, a, b, s: GLine(c.net.net_id, 0, (RouteInterval(r, a, b, s),))),
    ],
    "point": [_sig("float float", "point", lambda c, x, y: PlanarPoint(float(x), float(y)))],
    # route accessors and predicates
    "length": [_sig("int", "float", _length), _sig("int int", "float", _netid_route(_length))],
    "curve": [_sig("int", "polyline", _curve), _sig("int int", "polyline", _netid_route(_curve))],
    "dual": [_sig("int", "int", _dual), _sig("int int", "int", _netid_route(_dual))],
    "on_route": [_sig("gpoint int", "bool", lambda c, p, r: network.on_route(c.net, p, r))],
    "intersects": [_sig("gline int", "bool", lambda c, g, r: network.intersects(c.net, g, r))],
    "contains": [_sig("gline int", "bool", lambda c, g, r: network.contains(c.net, g, r))],
    "is_contained": [_sig("int gline", "bool", lambda c, r, g: network.is_contained(c.net, r, g))],
    "network_distance": [_sig("gpoint gpoint", "float",
                              lambda c, a, b: routing.network_distance(c.net, a, b))],
    # motion algebra
    "in_space": [
        _sig("gpoint", "point", lambda c, p: motion.in_space(c.net, p)),
        _sig("gline", "lines", lambda c, g: motion.in_space_line(c.net, g)),
    ],
    "in_network": [
        _sig("point", "gpoint", lambda c, q: motion.in_network(c.net, q)),
        _sig("point float", "gpoint", lambda c, q, d: motion.in_network(c.net, q, float(d))),
    ],
    "val": [_sig("intime", "gpoint", lambda c, i: motion.val(i))],
    "inst": [_sig("intime", "timestamp", lambda c, i: motion.inst(i))],
    "deftime": [_sig("moving", "periods", lambda c, u: motion.deftime(c.moving(u)))],
    "trajectory": [_sig("moving", "gline", lambda c, u: motion.trajectory(c.moving(u)))],
    "atinstant": [_sig("moving timestamp", "intime",
                       lambda c, u, t: motion.atinstant(c.moving(u), t))],
    "atperiods": [_sig("moving periods", "ugpoint",
                       lambda c, u, p: motion.atperiods(c.moving(u), c.periods(p)))],
    "direction": [_sig("moving moving timestamp", "float",
                       lambda c, a, b, t: motion.direction(c.net, c.moving(a), c.moving(b), t))],
    "shortest_path": [
        _sig("moving moving timestamp", "gline",
             lambda c, a, b, t: motion.shortest_path_mo(c.net, c.moving(a), c.moving(b), t)),
        _sig("gpoint gpoint", "gline", lambda c, a, b: routing.shortest_path(c.net, a, b)),
    ],
    "at": [_sig("moving gline", "ugpoint", lambda c, u, g: motion.at(c.moving(u), g))],
    "inside": [_sig("moving gline timestamp", "bool",
                    lambda c, u, g, t: motion.inside(c.moving(u), g, t))],
    "size": [_sig("gline", "float", lambda c, g: motion.size(g))],
    "duration": [_sig("moving", "float", lambda c, u: motion.duration(c.moving(u)))],
    "now": [_sig("moving", "timestamp", lambda c, u: motion.now(c.moving(u)))],
    "current": [_sig("moving", "gpoint", lambda c, u: motion.current(c.moving(u)))],
    # query templates
    "visited": [_sig("int periods", "gline",
                     lambda c, m, p: queries.visited(c.store, m, c.periods(p)))],
    "passed_through": [_sig("gline periods", "moids",
                            lambda c, g, p: queries.passed_through(c.store, g, c.periods(p)))],
    "count_by_route": [
        _sig("int", "table", lambda c, n: queries.count_by_route(c.net, c.store, n)),
        _sig("int timestamp", "table",
             lambda c, n, t: queries.count_by_route(c.net, c.store, n, t)),
    ],
}


# ---------------------------------------------------------------------------
# type checking and evaluation
# ---------------------------------------------------------------------------

def _resolve(node: Call, arg_types) -> Signature:
    try:
        sigs = FUNCTIONS[node.name]
    except KeyError:
        raise QueryTypeError(f"unknown function {node.name!r}", node.line, node.col) from None
    same_arity = [s for s in sigs if len(s.params) == len(arg_types)]
    if not same_arity:
        counts = " or ".join(sorted({str(len(s.params)) for s in sigs}))
        raise QueryTypeError(f"{node.name} takes {counts} argument(s), got {len(arg_types)}",
                             node.line, node.col)
    for s in same_arity:
        if all(_accepts(p, a) for p, a in zip(s.params, arg_types)):
            return s
    # point at the first argument that fits no candidate
    for k, actual in enumerate(arg_types):
        if not any(_accepts(s.params[k], actual) for s in same_arity):
            arg = node.args[k]
            wanted = " or ".join(sorted({s.params[k] for s in same_arity}))
            raise QueryTypeError(f"argument {k + 1} of {node.name} must be {wanted}, not {actual}",
                                 arg.line, arg.col)
    raise QueryTypeError(f"no form of {node.name} takes ({', '.join(arg_types)})",
                         node.line, node.col)


def check(node) -> str:
    """Result type of a well-typed AST; raises :class:`QueryTypeError` otherwise."""
    if isinstance(node, Literal):
        return node.kind
    return _resolve(node, [check(a) for a in node.args]).result


def evaluate(node, net, store):
    """Type-check then evaluate; returns ``(value, type)``."""
    check(node)
    return _eval(node, _Context(net, store))


def _eval(node, ctx):
    if isinstance(node, Literal):
        return node.value, node.kind
    evaluated = [_eval(a, ctx) for a in node.args]
    sig = _resolve(node, [k for _, k in evaluated])
    try:
        return sig.impl(ctx, *(v for v, _ in evaluated)), sig.result
    except QueryError:
        raise
    except (MognetError, ValueError) as exc:
        raise QueryEvaluationError(f"{node.name}: {type(exc).__name__}: {exc}",
                                   node.line, node.col, exc) from exc


def format_value(value, kind: str) -> str:
    """Text form of a query result; multi-valued results use one line each."""
    if kind == "float":
        return f"{value:.3f}"
    if kind == "bool":
        return "TRUE" if value else "FALSE"
    if kind == "timestamp":
        return format_timestamp(value)
    if kind == "periods":
        items = value.periods if isinstance(value, Periods) else [Period(*value)]
        return "\n".join(str(p) for p in items) if items else "PERIODS()"
    if kind in ("point", "polyline"):
        return to_wkt(value)
    if kind == "lines":
        return "\n".join(to_wkt(p) for p in value) if value else "GEOMETRYCOLLECTION EMPTY"
    if kind == "moids":
        return ", ".join(str(m) for m in value)
    if kind == "table":
        return "\n".join(["routeid,name,count"] + [f"{r},{n},{k}" for r, n, k in value])
    return str(value)


def run(text: str, net, store) -> str:
    value, kind = evaluate(parse(text), net, store)
    return format_value(value, kind)


__all__ = [
    "Call", "FUNCTIONS", "Literal", "Signature", "Token",
    "check", "evaluate", "format_value", "parse", "run", "tokenize", "unparse",
]

