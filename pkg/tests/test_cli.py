import csv
import io
import os

import pytest

from helpers import write_grid_csv
from mognet.cli import main
from mognet.network import load_network

T1_EDGES = [
    ("A", 2, "LINESTRING (0 0, 600 0)"),
    ("A", 2, "LINESTRING (600 0, 1000 0)"),
    ("B", 2, "LINESTRING (600 0, 600 500)"),
]


def cli(data, *argv):
    out = io.StringIO()
    code = main(["--data", str(data), *argv], out=out)
    return code, out.getvalue().rstrip("\n")


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


@pytest.fixture
def t1_data(tmp_path):
    write_csv(tmp_path / "t1.csv", ("name", "kind", "wkt"), T1_EDGES)
    data = tmp_path / "data"
    assert cli(data, "import-edges", str(tmp_path / "t1.csv")) == (0, "imported 3 edges")
    return data


@pytest.fixture(scope="module")
def grid_data(tmp_path_factory):
    root = tmp_path_factory.mktemp("grid")
    write_grid_csv(root / "grid.csv", 6)
    data = root / "data"
    assert cli(data, "import-edges", str(root / "grid.csv"))[0] == 0
    assert cli(data, "build-network")[0] == 0
    code, text = cli(data, "generate", "--periods", "4", "--interval", "25", "--per-period", "5",
                     "--seed", "42")
    assert code == 0
    assert text.startswith("objects=20 ")
    return data


def test_build_network(t1_data):
    code, text = cli(t1_data, "build-network")
    assert code == 0
    assert text == "nodes=4 sections=3 routes=2 junctions=1"
    net = load_network(t1_data / "network")
    assert sorted(r.name for r in net.routes.values()) == ["A", "B"]
    code, text = cli(t1_data, "build-network", "--route-key", "per_section")
    assert text == "nodes=4 sections=3 routes=3 junctions=3"


def test_build_with_restrictions(t1_data):
    assert cli(t1_data, "build-network")[0] == 0
    net = load_network(t1_data / "network")
    node = net.find_node((600.0, 0.0))
    a = next(r.rid for r in net.routes.values() if r.name == "A")
    b = next(r.rid for r in net.routes.values() if r.name == "B")
    rules = t1_data / "rules.csv"
    write_csv(rules, ("node_id", "from_route", "from_dir", "to_route", "to_dir", "allow"),
              [(node, a, "up", b, "up", 0)])
    assert cli(t1_data, "build-network", "--restrictions", str(rules))[0] == 0
    assert cli(t1_data, "query", f"network_distance(gpoint({a}, 100), gpoint({b}, 200))") == (2, "")
    assert cli(t1_data, "query", f"network_distance(gpoint({b}, 200), gpoint({a}, 100))") == (0, "700.000")


def test_gline_and_queries(t1_data):
    assert cli(t1_data, "build-network")[0] == 0
    assert cli(t1_data, "add-gline", "--name", "Chamran", "--interval", "1:300:700") == (0, "gline 1")
    assert cli(t1_data, "add-gline", "--name", "bad", "--interval", "1:0:150",
               "--interval", "1:100:200")[0] == 2
    assert cli(t1_data, "add-gline", "--name", "Chamran", "--id", "1", "--replace",
               "--interval", "1:300:800") == (0, "gline 1")
    assert cli(t1_data, "query", 'size(gline_named("Chamran"))') == (0, "500.000")
    assert cli(t1_data, "query", "size(gline(1, 100, 600))") == (0, "500.000")


def test_grid_queries(grid_data):
    code, text = cli(grid_data, "query", "size(trajectory(mo(1000)))")
    assert code == 0 and float(text) > 0
    code, text = cli(grid_data, "visited", "--moid", "1000", "--from", "2011-01-21T00:00:00Z",
                     "--to", "2011-01-21T00:00:30Z")
    assert code == 0
    assert all(line.startswith("GLINE(1,") and line.endswith(",1000)") for line in text.splitlines())
    code, text = cli(grid_data, "count-by-route", "--min", "0")
    assert code == 0
    header, *rows = text.splitlines()
    assert header == "routeid,name,count"
    assert sum(int(r.rsplit(",", 1)[1]) for r in rows) == 20
    code, text = cli(grid_data, "count-by-route", "--min", "0", "--at", "2011-01-21T00:00:10Z")
    assert code == 0
    assert sum(int(r.rsplit(",", 1)[1]) for r in text.splitlines()[1:]) == 5


def test_passed_through(grid_data):
    assert cli(grid_data, "add-gline", "--name", "H2", "--interval", "3:0:500", "--id", "50") == (0, "gline 50")
    code, text = cli(grid_data, "passed-through", "--gline", "H2", "--from", "2011-01-21T00:00:00Z",
                     "--to", "2011-01-21T01:00:00Z")
    assert code == 0
    ids = [int(x) for x in text.split(", ")] if text else []
    assert ids == sorted(ids)
    assert set(ids) <= set(range(1000, 1020))


def test_audit_and_export(grid_data, tmp_path):
    code, text = cli(grid_data, "audit")
    assert code == 0 and text.startswith("ok: 20 objects")
    for what, name in (("samples", "samples.csv"), ("mgpoints", "mgpoints.csv")):
        assert cli(grid_data, "export", "--what", what, "--out", str(tmp_path / what))[0] == 0
        assert (tmp_path / what / name).read_bytes() == (grid_data / name).read_bytes()
    assert cli(grid_data, "export", "--what", "network", "--out", str(tmp_path / "net"))[0] == 0
    assert load_network(tmp_path / "net").routes.keys() == load_network(grid_data / "network").routes.keys()


def test_generate_is_deterministic(tmp_path):
    write_grid_csv(tmp_path / "g.csv", 4)
    outputs = []
    for run in ("a", "b"):
        data = tmp_path / run
        cli(data, "import-edges", str(tmp_path / "g.csv"))
        cli(data, "build-network")
        for _ in range(2):  # rerunning replaces the moving data
            assert cli(data, "generate", "--periods", "2", "--interval", "10", "--per-period", "3",
                       "--seed", "9")[0] == 0
        outputs.append((data / "mgpoints.csv").read_bytes() + (data / "samples.csv").read_bytes())
    assert outputs[0] == outputs[1]


@pytest.mark.parametrize("argv", [
    [],
    ["nosuch"],
    ["generate", "--periods", "1"],
    ["generate", "--periods", "0", "--interval", "1", "--per-period", "1", "--seed", "1"],
    ["visited", "--moid", "1", "--from", "yesterday", "--to", "2011-01-21T00:00:00Z"],
    ["visited", "--moid", "1", "--from", "2011-01-21T00:01:00Z", "--to", "2011-01-21T00:00:00Z"],
    ["count-by-route", "--min", "1", "--at", "noon"],
    ["add-gline", "--name", "x", "--interval", "1:2"],
    ["query", "size(1,2)"],
    ["query", "size("],
])
def test_usage_errors(grid_data, argv, capsys):
    assert cli(grid_data, *argv)[0] == 1
    assert "error" in capsys.readouterr().err


def test_data_errors(tmp_path, grid_data, capsys):
    assert cli(tmp_path / "empty", "build-network")[0] == 2
    assert cli(tmp_path / "empty", "query", "size(trajectory(mo(1000)))")[0] == 2
    assert cli(tmp_path / "empty", "export", "--what", "samples", "--out", str(tmp_path / "o"))[0] == 2
    assert cli(grid_data, "query", "size(trajectory(mo(5)))")[0] == 2
    assert cli(grid_data, "passed-through", "--gline", "nowhere", "--from", "2011-01-21T00:00:00Z",
               "--to", "2011-01-21T00:01:00Z")[0] == 2
    bad = tmp_path / "bad.csv"
    bad.write_text("name,kind,wkt\nA,3,LINESTRING (0 0, 1 0)\n")
    assert cli(tmp_path / "d", "import-edges", str(bad))[0] == 2
    assert "bad.csv:2" in capsys.readouterr().err


def test_audit_reports_corruption(t1_data):
    assert cli(t1_data, "build-network")[0] == 0
    assert cli(t1_data, "add-gline", "--name", "x", "--interval", "1:0:100")[0] == 0
    path = t1_data / "glines.csv"
    text = path.read_text()
    # a second row for the same record that overlaps the first
    path.write_text(text + text.splitlines()[1].replace(",0.0,100.0,", ",50.0,150.0,") + "\n")
    assert cli(t1_data, "audit")[0] == 2


def test_module_entry_point():
    import subprocess
    import sys

    res = subprocess.run([sys.executable, "-m", "mognet", "--help"], capture_output=True, text=True,
                         env={**os.environ})
    assert res.returncode == 0
    assert "import-edges" in res.stdout
