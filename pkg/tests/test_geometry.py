import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skyplace.geometry import (AltitudeBounds, HexRegion, Position3D, StrategyId, apply_strategy,
                               contains, distance_3d, hex_candidate_grid, horizontal_distance,
                               sample_uniform_users)

REGION = HexRegion(250.0)
BOUNDS = AltitudeBounds(22.5, 300.0)


def test_contains_examples():
    assert contains(REGION, Position3D(0, 0, 0))
    assert not contains(REGION, Position3D(251, 0, 0))
    apothem = 250 * math.sqrt(3) / 2
    assert apothem == pytest.approx(216.506, abs=1e-3)
    assert not contains(REGION, Position3D(0, apothem + 0.1, 0))
    assert contains(REGION, Position3D(0, apothem, 0))
    assert contains(REGION, Position3D(250, 0, 0))


def test_contains_matches_polygon_oracle(rng):
    # point-in-convex-polygon via edge cross products
    verts = [(250 * math.cos(math.radians(60 * i)), 250 * math.sin(math.radians(60 * i)))
             for i in range(6)]

    def inside(x, y):
        for i in range(6):
            (x1, y1), (x2, y2) = verts[i], verts[(i + 1) % 6]
            if (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1) < -1e-7:
                return False
        return True

    for x, y in rng.uniform(-300, 300, (2000, 2)):
        assert contains(REGION, (x, y)) == inside(x, y)


def test_sample_uniform_users():
    assert sample_uniform_users(REGION, 0, 1.5, np.random.default_rng(0)) == []
    pts = sample_uniform_users(REGION, 1000, 1.5, np.random.default_rng(1))
    assert len(pts) == 1000
    assert all(contains(REGION, p) and p.h == 1.5 for p in pts)
    xy = np.array([(p.x, p.y) for p in pts])
    # per-axis std of a uniform flat-top hexagon: sigma_x^2 = sigma_y^2 = 5 R^2 / 24
    sigma = math.sqrt(5 * 250 ** 2 / 24)
    assert np.all(np.abs(xy.mean(axis=0)) < 3 * sigma / math.sqrt(1000))
    assert np.allclose(xy.std(axis=0), sigma, rtol=0.1)


def test_sample_uniform_users_deterministic():
    a = sample_uniform_users(REGION, 50, 1.5, np.random.default_rng(7))
    b = sample_uniform_users(REGION, 50, 1.5, np.random.default_rng(7))
    assert a == b


def test_distance_examples():
    assert distance_3d(Position3D(0, 0, 100), Position3D(0, 0, 1.5)) == 98.5
    a, b = Position3D(3, 4, 0), Position3D(0, 0, 0)
    assert horizontal_distance(a, b) == 5 and distance_3d(a, b) == 5
    a, b = Position3D(30, 40, 100), Position3D(0, 0, 1.5)
    assert horizontal_distance(a, b) == 50
    assert distance_3d(a, b) == pytest.approx(110.4637949737, abs=1e-9)


coords = st.floats(-1e4, 1e4, allow_nan=False)
alts = st.floats(0, 1e4, allow_nan=False)
points = st.builds(Position3D, coords, coords, alts)


@given(points, points, points)
def test_distance_metric_properties(a, b, c):
    assert distance_3d(a, b) == distance_3d(b, a)
    assert distance_3d(a, b) >= 0
    assert distance_3d(a, a) == 0
    assert distance_3d(a, c) <= distance_3d(a, b) + distance_3d(b, c) + 1e-9
    if max(abs(a.x - b.x), abs(a.y - b.y), abs(a.h - b.h)) > 1e-100:
        assert distance_3d(a, b) > 0


def test_apply_strategy_examples():
    p = Position3D(0, 0, 100)
    assert apply_strategy(p, StrategyId.NO_CHANGE, 10, 10, REGION, BOUNDS) == p
    top = Position3D(0, 0, 295)
    assert apply_strategy(top, StrategyId.UP, 10, 10, REGION, BOUNDS) == top
    assert apply_strategy(p, StrategyId.FORWARD, 10, 10, REGION, BOUNDS) == Position3D(0, 10, 100)
    assert apply_strategy(p, StrategyId.BACKWARD, 10, 10, REGION, BOUNDS) == Position3D(0, -10, 100)
    assert apply_strategy(p, StrategyId.LEFT, 10, 10, REGION, BOUNDS) == Position3D(-10, 0, 100)
    assert apply_strategy(p, StrategyId.RIGHT, 10, 10, REGION, BOUNDS) == Position3D(10, 0, 100)
    assert apply_strategy(p, StrategyId.DOWN, 10, 10, REGION, BOUNDS) == Position3D(0, 0, 90)
    edge = Position3D(245, 0, 100)
    assert apply_strategy(edge, StrategyId.RIGHT, 10, 10, REGION, BOUNDS) == edge


def test_strategy_ids():
    assert len(StrategyId) == 7
    assert [s.value for s in StrategyId] == list(range(1, 8))
    assert sorted(s.index for s in StrategyId) == list(range(7))


@st.composite
def feasible(draw):
    x = draw(st.floats(-250, 250))
    y = draw(st.floats(-216.5, 216.5))
    h = draw(st.floats(22.5, 300))
    p = Position3D(x, y, h)
    if not contains(REGION, p):
        p = Position3D(x * 0.5, y * 0.5, h)
    return p


@given(feasible(), st.sampled_from(list(StrategyId)), st.floats(0.1, 60), st.floats(0.1, 60))
def test_apply_strategy_stays_feasible(p, s, step_xy, step_h):
    q = apply_strategy(p, s, step_xy, step_h, REGION, BOUNDS)
    assert contains(REGION, q)
    assert BOUNDS.contains(q.h)


@given(feasible())
def test_no_change_is_identity(p):
    assert apply_strategy(p, StrategyId.NO_CHANGE, 10, 10.27, REGION, BOUNDS) == p


@given(feasible())
@settings(max_examples=200)
def test_opposite_moves_cancel(p):
    pairs = [(StrategyId.UP, StrategyId.DOWN), (StrategyId.LEFT, StrategyId.RIGHT),
             (StrategyId.FORWARD, StrategyId.BACKWARD)]
    for a, b in pairs:
        q = apply_strategy(p, a, 8.0, 8.0, REGION, BOUNDS)
        if q == p:
            continue  # first move rejected
        r = apply_strategy(q, b, 8.0, 8.0, REGION, BOUNDS)
        assert r.x == pytest.approx(p.x, abs=1e-9)
        assert r.y == pytest.approx(p.y, abs=1e-9)
        assert r.h == pytest.approx(p.h, abs=1e-9)


def test_candidate_grid_single():
    assert hex_candidate_grid(REGION, 1) == [(0.0, 0.0)]


def _brute_force_counts(region, rotation_deg, pitches):
    # independent lattice enumeration with plain loops
    rot = math.radians(rotation_deg)
    out = {}
    for pitch in pitches:
        n = int(region.radius / pitch) + 3
        count = 0
        for i in range(-2 * n, 2 * n + 1):
            for j in range(-2 * n, 2 * n + 1):
                u, v = pitch * (i + 0.5 * j), pitch * math.sqrt(3) / 2 * j
                x = math.cos(rot) * u - math.sin(rot) * v
                y = math.sin(rot) * u + math.cos(rot) * v
                count += contains(region, (x, y))
        out[pitch] = count
    return out


def test_candidate_grid_79():
    pts = hex_candidate_grid(REGION, 79)
    assert len(pts) == 79
    assert len(set(pts)) == 79
    assert all(contains(REGION, p) for p in pts)
    d = min(math.dist(a, b) for i, a in enumerate(pts) for b in pts[i + 1:])
    # lattice pitch: nearest neighbours are one pitch apart
    counts = _brute_force_counts(REGION, 1, [d])
    assert counts[d] == 79
    # an unrotated lattice never produces 79 points
    assert 79 not in _brute_force_counts(REGION, 0, np.linspace(45, 55, 41)).values()


def test_candidate_grid_impossible():
    with pytest.raises(ValueError):
        hex_candidate_grid(REGION, 2)
