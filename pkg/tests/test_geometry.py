import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mognet.errors import DegeneratePoints, EmptyInterval, InvalidGeometry, MeasureOutOfRange
from mognet.geometry import (
    MeasuredPolyline,
    PlanarPoint,
    azimuth,
    locate_point,
    parse_wkt,
    polyline_length,
    project_point,
    sub_polyline,
    to_wkt,
)

X_AXIS = MeasuredPolyline([(0.0, 0.0), (1000.0, 0.0)])
BENT = MeasuredPolyline([(0.0, 0.0), (3.0, 4.0), (6.0, 8.0)])


def test_lengths():
    assert polyline_length(X_AXIS) == 1000.0
    assert polyline_length(MeasuredPolyline([(0, 0), (3, 4)])) == 5.0
    assert BENT.cumulative_measure[-1] == polyline_length(BENT) == 10.0


def test_polyline_validation():
    with pytest.raises(InvalidGeometry):
        MeasuredPolyline([(0, 0)])
    with pytest.raises(InvalidGeometry):
        MeasuredPolyline([(0, 0), (0, 0)])
    with pytest.raises(InvalidGeometry):
        MeasuredPolyline([(0, 0), (math.nan, 1)])


def test_locate_point():
    assert locate_point(X_AXIS, 600) == PlanarPoint(600, 0)
    assert locate_point(X_AXIS, 0) == X_AXIS.vertices[0]
    p = locate_point(BENT, 7.5)
    assert p == pytest.approx((4.5, 6.0))
    assert locate_point(X_AXIS, -1e-10) == PlanarPoint(0, 0)
    with pytest.raises(MeasureOutOfRange):
        locate_point(X_AXIS, 1000.1)


def test_project_point():
    assert project_point(X_AXIS, (100, 5)) == (100, 5, -1)
    assert project_point(X_AXIS, (100, -5)) == (100, 5, 1)
    assert project_point(X_AXIS, (250, 0)) == (250, 0, 0)
    assert project_point(X_AXIS, (1100, 0)) == (1000, 100, 0)


def test_sub_polyline():
    assert sub_polyline(X_AXIS, 100, 600).vertices == ((100, 0), (600, 0))
    assert sub_polyline(X_AXIS, 600, 100).vertices == ((600, 0), (100, 0))
    cut = sub_polyline(BENT, 2.5, 7.5)
    assert [tuple(v) for v in cut.vertices] == pytest.approx([(1.5, 2.0), (3.0, 4.0), (4.5, 6.0)])
    with pytest.raises(EmptyInterval):
        sub_polyline(X_AXIS, 5, 5)


def test_azimuth():
    assert azimuth((0, 0), (0, 100)) == 90.0
    assert azimuth((0, 0), (1, 1)) == pytest.approx(45.0)
    assert azimuth((5, 5), (4, 5)) == 180.0
    assert azimuth((0, 100), (0, 0)) == 270.0
    with pytest.raises(DegeneratePoints):
        azimuth((1, 1), (1, 1))


def test_wkt_round_trip():
    p = parse_wkt("LINESTRING (0 0, 3 4, 6 8.5)")
    assert p.vertices == ((0, 0), (3, 4), (6, 8.5))
    assert parse_wkt(to_wkt(p)) == p
    assert parse_wkt("POINT (1.25 -2)") == PlanarPoint(1.25, -2)
    for bad in ("LINESTRING (0 0)", "POLYGON ((0 0, 1 0, 1 1, 0 0))", "nonsense", "POINT Z (1 2 3)"):
        with pytest.raises(InvalidGeometry):
            parse_wkt(bad)


coords = st.floats(-1000, 1000, allow_nan=False, allow_infinity=False)
polylines = st.lists(st.tuples(coords, coords), min_size=2, max_size=6).filter(
    lambda pts: all(math.dist(a, b) > 1e-3 for a, b in zip(pts, pts[1:]))
).map(MeasuredPolyline)


@settings(max_examples=60, deadline=None)
@given(polylines, st.tuples(coords, coords))
def test_projection_is_nearest_point(p, q):
    proj = project_point(p, q)
    foot = locate_point(p, proj.measure)
    assert math.dist(foot, q) == pytest.approx(proj.distance, abs=1e-6)
    # dense 1 cm sampling never finds a closer point
    step = 0.01
    n = int(p.length / step)
    stride = max(1, n // 4000)  # bound the work on long random polylines
    best = min(math.dist(locate_point(p, min(k * step, p.length)), q) for k in range(0, n + 1, stride))
    assert proj.distance <= best + 1e-9


@settings(max_examples=60, deadline=None)
@given(polylines, st.floats(0, 1), st.floats(0, 1))
def test_sub_polyline_length(p, f1, f2):
    m1, m2 = f1 * p.length, f2 * p.length
    if abs(m1 - m2) < 1e-6:
        return
    assert polyline_length(sub_polyline(p, m1, m2)) == pytest.approx(abs(m2 - m1), abs=1e-9 * p.length)


@settings(max_examples=30, deadline=None)
@given(polylines)
def test_endpoints_exact(p):
    assert locate_point(p, 0.0) == p.vertices[0]
    assert locate_point(p, p.length) == p.vertices[-1]
