import math

import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from conftest import SCENARIOS, make_scenario
from ftlbo.scenario import (
    EARTH_RADIUS,
    GeoPoint,
    LocalPoint,
    ScenarioError,
    geo_to_local,
    load_scenario,
    local_to_geo,
    validate_point_in_bounds,
)

lat = st.floats(-80, 80)
lon = st.floats(-170, 170)

LOCAL_DOC = """
frame: local
waypoint_count: 4
h_min: 2
h_max: 7
bounds: {lower: [0, 0], upper: [50, 40], z_min: 1, z_max: 9}
start: [5, 5, 4]
goal: [45, 35, 4]
obstacles:
  - {x: 20, y: 20, radius: 3}
"""


def test_identity_projection():
    o = GeoPoint(12.2335526, 109.1144313)
    assert geo_to_local(o, o) == LocalPoint(0.0, 0.0, 0.0)


def test_east_offset_of_survey_corner():
    o = GeoPoint(12.2335526, 109.1144313)
    p = geo_to_local(o, GeoPoint(12.2335526, 109.1152252))
    expect = EARTH_RADIUS * math.radians(109.1152252 - 109.1144313) * math.cos(math.radians(12.2335526))
    assert p.x == pytest.approx(expect, abs=1e-9)
    assert p.x == pytest.approx(86.3, abs=0.05)
    assert p.y == 0.0


def test_one_degree_north():
    o = GeoPoint(10.0, 20.0)
    p = geo_to_local(o, GeoPoint(11.0, 20.0))
    assert p.y == pytest.approx(111_194.9, abs=0.05)
    assert p.x == 0.0


def test_far_points_rejected():
    with pytest.raises(ScenarioError) as err:
        geo_to_local(GeoPoint(0, 0), GeoPoint(1.5, 0))
    assert err.value.field == "coordinates"


@given(lat, lon)
def test_projection_of_origin_is_zero(a, b):
    o = GeoPoint(a, b)
    assert geo_to_local(o, o).as_array().tolist() == [0.0, 0.0, 0.0]


@given(lat, lon, st.floats(-0.5, 0.5), st.floats(-0.5, 0.5))
def test_latitude_additivity(a, b, d1, d2):
    o = GeoPoint(a, b)
    p1 = geo_to_local(o, GeoPoint(a + d1, b))
    p2 = geo_to_local(o, GeoPoint(a + d2, b))
    assert p1.x == p2.x == 0.0
    # y is linear in latitude offset
    assert p2.y - p1.y == pytest.approx(EARTH_RADIUS * math.radians(d2 - d1), abs=1e-6)


@given(lat, lon, st.floats(-100, 100), st.floats(-100, 100))
def test_round_trip(a, b, x, y):
    o = GeoPoint(a, b)
    g = local_to_geo(o, LocalPoint(x, y))
    back = geo_to_local(o, g)
    assert back.x == pytest.approx(x, abs=1e-6)
    assert back.y == pytest.approx(y, abs=1e-6)


def test_geo_point_ranges():
    with pytest.raises(ScenarioError):
        GeoPoint(112.2331044, 109.1)
    with pytest.raises(ScenarioError):
        GeoPoint(0, 181)


def test_point_in_bounds():
    s = make_scenario()
    assert validate_point_in_bounds(s, s.lower_bound)
    assert validate_point_in_bounds(s, s.upper_bound)
    up = s.upper_bound
    assert not validate_point_in_bounds(s, LocalPoint(up.x + 1, up.y, up.z))
    mid = (s.lower + s.upper) / 2
    assert validate_point_in_bounds(s, LocalPoint.from_seq(mid))


def test_paper_like_config():
    s = load_scenario((SCENARIOS / "paper_like.yaml").read_text())
    assert (s.h_min, s.h_max) == (2.0, 7.0)
    assert s.waypoint_count == 10
    assert len(s.obstacles) == 6
    assert s.origin == GeoPoint(12.2331044, 109.1144313)
    assert s.upper_bound.x == pytest.approx(86.27, abs=0.01)
    assert s.start.x == pytest.approx(8.02, abs=0.01)
    assert s.goal.y == pytest.approx(41.10, abs=0.01)


def test_local_config():
    s = load_scenario(LOCAL_DOC)
    assert s.origin is None
    assert s.obstacles[0].radius == 3.0
    assert s.weights.as_tuple() == (1.0, 1.0, 1.0)


@pytest.mark.parametrize(
    "old,new,field,message",
    [
        ("h_max: 7", "h_max: 2", "h_max", "altitude band empty"),
        ("radius: 3", "radius: 0", "obstacles[0].radius", "nonpositive radius"),
        ("goal: [45, 35, 4]", "goal: [5, 5, 4]", "goal", "coincide"),
        ("start: [5, 5, 4]", "start: [55, 5, 4]", "start", "outside"),
        ("waypoint_count: 4", "waypoint_count: 0", "waypoint_count", "positive"),
        ("h_min: 2", "h_min: 2\nweights: {alpha: 0, beta: 0, gamma: 0}", "weights", "all zero"),
        ("h_min: 2", "h_min: abc", "h_min", "number"),
        ("goal: [45, 35, 4]", "goal: [45, 35]", "goal", "[x, y, z]"),
        ("frame: local", "frame: polar", "frame", "unknown"),
        ("x: 20", "x: 80", "obstacles[0].center", "outside"),
    ],
)
def test_named_errors(old, new, field, message):
    with pytest.raises(ScenarioError) as err:
        load_scenario(LOCAL_DOC.replace(old, new))
    assert err.value.field == field
    assert message in err.value.message


def test_missing_field_and_parse_errors():
    with pytest.raises(ScenarioError) as err:
        load_scenario(LOCAL_DOC.replace("h_max: 7\n", ""))
    assert err.value.field == "h_max"
    with pytest.raises(ScenarioError) as err:
        load_scenario("bounds: [unclosed")
    assert err.value.field == "config"


_keys = st.sampled_from(["h_min", "h_max", "waypoint_count", "start", "goal", "bounds", "obstacles", "weights"])
_values = st.one_of(st.none(), st.integers(-5, 100), st.floats(allow_nan=True), st.text(max_size=3),
                    st.lists(st.floats(-10, 60), max_size=4))


@settings(suppress_health_check=[HealthCheck.too_slow], deadline=None)
@given(st.dictionaries(_keys, _values, max_size=3))
def test_loader_is_total(overrides):
    import yaml

    doc = yaml.safe_load(LOCAL_DOC)
    doc.update(overrides)
    try:
        s = load_scenario(yaml.safe_dump(doc))
    except ScenarioError as exc:
        assert exc.field
        return
    # anything accepted satisfies the invariants
    assert (s.lower < s.upper).all()
    assert 0 < s.h_min < s.h_max
    assert s.start != s.goal
    assert validate_point_in_bounds(s, s.start) and validate_point_in_bounds(s, s.goal)
    assert any(w > 0 for w in s.weights.as_tuple())
