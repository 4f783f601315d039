import pytest

from helpers import T0, t1_ids, t1_store
from mognet.errors import QueryEvaluationError, QuerySyntaxError, QueryTypeError
from mognet.moql import Call, Literal, check, parse, run, tokenize, unparse
from mognet.temporal import format_timestamp

ISO0 = format_timestamp(T0)


def iso(seconds):
    return format_timestamp(T0 + int(seconds * 1000))


@pytest.fixture(scope="module")
def db():
    return t1_store()


def q(db, text):
    net, store = db
    return run(text, net, store)


def test_tokenize_positions():
    toks = tokenize('size(\n  trajectory(mo(1)), -2.5e1, "a\\"b")')
    names = [(t.kind, t.line, t.col) for t in toks]
    assert names[0] == ("IDENT", 1, 1)
    assert ("IDENT", 2, 3) in names
    assert ("FLOAT", 2, 22) in names
    assert [(t.kind, t.text) for t in toks[-3:]] == [("STRING", '"a\\"b"'), ("RPAREN", ")"), ("EOF", "")]


def test_parse_shapes():
    ast = parse("size(trajectory(mo(1033)))")
    assert isinstance(ast, Call) and ast.name == "size"
    assert check(ast) == "float"
    q1 = parse('trajectory(atperiods(mo(1033), periods("2011-01-21T00:04:42.600Z","2011-01-21T00:10:03.000Z")))')
    assert check(q1) == "gline"
    period = q1.args[0].args[1]
    assert isinstance(period, Literal) and period.kind == "periods"
    assert parse('"2011-01-21T00:04:42.600Z"').kind == "timestamp"
    assert parse('"Chamran"').kind == "string"


def test_function_names_case_insensitive():
    assert parse("SIZE(Trajectory(MO(1)))") == parse("size(trajectory(mo(1)))")


@pytest.mark.parametrize("text,pos", [
    ("size(1,2)", (1, 1)),
    ("size(mo(1))", (1, 6)),
    ("nosuch(1)", (1, 1)),
    ("duration(\n  size(gline_named(\"x\")))", (2, 3)),
])
def test_type_errors(text, pos):
    with pytest.raises(QueryTypeError) as err:
        check(parse(text))
    assert (err.value.line, err.value.col) == pos


@pytest.mark.parametrize("text,pos", [
    ("size(", (1, 6)),
    ("size(1 2)", (1, 8)),
    ("size(1))", (1, 8)),
    ('size("abc', (1, 6)),
    ("size(#)", (1, 6)),
    ('periods("2011-01-21T00:00:10Z", "2011-01-21T00:00:05Z")', (1, 1)),
    ('periods("x", "y")', (1, 9)),
])
def test_syntax_errors(text, pos):
    with pytest.raises(QuerySyntaxError) as err:
        parse(text)
    assert (err.value.line, err.value.col) == pos


def test_syntax_error_lists_expected_tokens():
    with pytest.raises(QuerySyntaxError) as err:
        parse("size(1 2)")
    assert "expected" in str(err.value)


@pytest.mark.parametrize("text", [
    "size(trajectory(mo(1)))",
    'visited(1, periods("2011-01-21T00:00:00Z", "2011-01-21T00:00:30Z"))',
    'atinstant(mo(2), "2011-01-21T00:00:05.250Z")',
    "gpoint(1, 0.1, -1)",
    'inside(mo(1), gline_named("a \\"quoted\\" name"), now(mo(1)))',
])
def test_unparse_fixpoint(text):
    ast = parse(text)
    assert parse(unparse(ast)) == ast
    assert unparse(parse(unparse(ast))) == unparse(ast)


def test_evaluation_results(db):
    net, _ = db
    a, b, _ = t1_ids(net)
    assert q(db, "size(trajectory(mo(1)))") == "1000.000"
    assert q(db, "duration(mo(2))") == "100.000"
    assert q(db, "now(mo(1))") == iso(100)
    assert q(db, f'val(atinstant(mo(1), "{iso(30)}"))') == f"GPOINT(1,{a},300.000,0)"
    assert q(db, f'inst(atinstant(mo(1), "{iso(30)}"))') == iso(30)
    assert q(db, f'inside(mo(1), gline_named("stretch"), "{iso(50)}")') == "TRUE"
    assert q(db, f'inside(mo(1), gline_named("stretch"), "{iso(80)}")') == "FALSE"
    assert q(db, f'network_distance(gpoint({a}, 100), gpoint({b}, 200))') == "700.000"
    assert q(db, f"shortest_path(gpoint({a}, 100), gpoint({b}, 200))").splitlines() == [
        f"GLINE(1,{a},100.000,600.000,0,0)", f"GLINE(1,{b},0.000,200.000,0,0)"]


def test_periods_and_empty_results(db):
    span = f'periods("{iso(200)}", "{iso(300)}")'
    assert q(db, f"trajectory(atperiods(mo(1), {span}))") == "GLINE()"
    assert q(db, f"passed_through(gline_named(\"stretch\"), {span})") == ""
    assert q(db, f"deftime(atperiods(mo(1), {span}))") == "PERIODS()"
    assert q(db, "deftime(mo(1))") == f"PERIOD({ISO0},{iso(100)})"


def test_templates(db):
    span = f'periods("{ISO0}", "{iso(45)}")'
    assert q(db, f'passed_through(gline_named("stretch"), {span})') == "1"
    lines = q(db, "count_by_route(0)").splitlines()
    assert lines[0] == "routeid,name,count"
    assert len(lines) == 3
    assert q(db, "count_by_route(1)") == "routeid,name,count"


def test_evaluation_errors_carry_position(db):
    with pytest.raises(QueryEvaluationError) as err:
        q(db, "size(trajectory(mo(77)))")
    assert (err.value.line, err.value.col) == (1, 17)
    with pytest.raises(QueryEvaluationError):
        q(db, f'atinstant(mo(1), "{iso(500)}")')
    with pytest.raises(QueryEvaluationError):
        q(db, 'gline_named("nope")')
