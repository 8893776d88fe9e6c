import math

import numpy as np
import pytest

from obliqueplan.routing import (
    is_two_opt_optimal,
    solve_order,
    solve_order_exact,
    solve_order_heuristic,
    tour_length,
)
from oracles import brute_force_order

ORIGIN = (0.0, 0.0, 0.0)


def random_points(seed, k):
    rng = np.random.default_rng(seed)
    pts = np.column_stack([rng.uniform(0, 300, (k, 2)), rng.uniform(40, 110, k)])
    ends = (tuple(rng.uniform(0, 300, 2)) + (0.0,), tuple(rng.uniform(0, 300, 2)) + (0.0,))
    return ends, pts


def test_single_waypoint():
    assert solve_order_exact((ORIGIN, ORIGIN), [(5, 5, 5)]).order == (0,)
    assert solve_order_heuristic((ORIGIN, ORIGIN), [(5, 5, 5)]).order == (0,)


def test_symmetric_tie_takes_lexicographic_order():
    tour = solve_order_exact((ORIGIN, ORIGIN), [(100, 0, 100), (200, 0, 100)])
    assert tour.order == (0, 1)
    assert tour.length == pytest.approx(465.0281539872885, rel=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_exact_matches_brute_force(seed):
    ends, pts = random_points(seed, 6)
    tour = solve_order_exact(ends, pts)
    order, length = brute_force_order(ends[0], ends[1], pts)
    assert list(tour.order) == order
    assert tour.length == pytest.approx(length, rel=1e-12)


def test_exact_rejects_large_instances():
    ends, pts = random_points(0, 5)
    with pytest.raises(ValueError):
        solve_order_exact(ends, pts, exact_cap=4)
    with pytest.raises(ValueError):
        solve_order(ends, pts, method="exact", exact_cap=4)
    assert len(solve_order(ends, pts, method="auto", exact_cap=4).order) == 5


@pytest.mark.parametrize("k", [1, 2, 3])
def test_heuristic_optimal_for_tiny(k):
    for seed in range(10):
        ends, pts = random_points(seed, k)
        assert solve_order_heuristic(ends, pts).length == pytest.approx(solve_order_exact(ends, pts).length, rel=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_heuristic_is_two_opt_local_optimum(seed):
    ends, pts = random_points(seed, 12)
    tour = solve_order_heuristic(ends, pts, rng_seed=seed)
    assert sorted(tour.order) == list(range(12))
    assert is_two_opt_optimal(ends, pts, tour.order)
    assert tour.length == pytest.approx(tour_length(ends, pts, tour.order), rel=1e-12)
    assert solve_order_exact(ends, pts).length <= tour.length + 1e-9


def test_heuristic_deterministic_and_respects_incumbent():
    ends, pts = random_points(3, 15)
    a = solve_order_heuristic(ends, pts, rng_seed=4)
    b = solve_order_heuristic(ends, pts, rng_seed=4)
    assert a == b
    incumbent = list(range(15))
    c = solve_order_heuristic(ends, pts, rng_seed=4, restarts=0, incumbent=incumbent)
    assert c.length <= tour_length(ends, pts, incumbent) + 1e-9


def test_collinear_sweep():
    pts = [(30.0, 0, 10), (10.0, 0, 10), (40.0, 0, 10), (20.0, 0, 10)]
    for solver in (solve_order_exact, solve_order_heuristic):
        order = solver((ORIGIN, (50.0, 0, 0)), pts).order
        assert [pts[k][0] for k in order] == [10.0, 20.0, 30.0, 40.0]


def rigid_motion(points, angle, shift):
    c, s = math.cos(angle), math.sin(angle)
    R = np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]])
    return np.asarray(points, float) @ R.T + shift


@pytest.mark.parametrize("seed", range(3))
def test_invariant_under_rigid_motion(seed):
    ends, pts = random_points(seed, 8)
    shift = np.array([1234.5, -77.0, 3.0])
    ends2 = tuple(tuple(rigid_motion([e], 0.7, shift)[0]) for e in ends)
    pts2 = rigid_motion(pts, 0.7, shift)
    a, b = solve_order_exact(ends, pts), solve_order_exact(ends2, pts2)
    assert a.order == b.order
    assert a.length == pytest.approx(b.length, rel=1e-9)
    h1, h2 = solve_order_heuristic(ends, pts), solve_order_heuristic(ends2, pts2)
    assert h1.length == pytest.approx(h2.length, rel=1e-9)


def test_open_path_terminal_cost():
    # the end point is far to the right, so the path must finish with the rightmost point
    pts = [(100.0, 0, 0), (-100.0, 0, 0)]
    tour = solve_order_exact((ORIGIN, (1000.0, 0, 0)), pts)
    assert tour.order == (1, 0)
    assert tour.length == pytest.approx(100 + 200 + 900)
