import math

import numpy as np
import pytest

from obliqueplan.chain import ChainProblem, InfeasibleStartError, SolveStatus, chain_length, solve_chain
from obliqueplan.config import SolverConfig
from obliqueplan.model import GroundTarget, Waypoint3D
from obliqueplan.surrogates import ConstraintBatch, SubproblemMode, SurrogatePoint, build_constraints
from conftest import CAMERA
from oracles import golden_section

Z_LO, Z_HI = 89.74358974358977, 102.45820672914627


class Box:
    """lo <= x <= hi on every coordinate of every block."""

    def __init__(self, lo, hi, K=1, d=1):
        self.lo, self.hi, self.K, self.d = lo, hi, K, d

    def evaluate(self, x):
        x = np.asarray(x, float).reshape(self.K, self.d)
        vals = np.concatenate([self.lo - x, x - self.hi], axis=1)
        grads = np.zeros((self.K, 2 * self.d, self.d))
        for i in range(self.d):
            grads[:, i, i] = -1.0
            grads[:, self.d + i, i] = 1.0
        return vals, grads, np.zeros((self.K, 2 * self.d, self.d, self.d))


def test_chain_length_examples():
    assert chain_length((0, 0, 0), (3, 4, 0)) == 5.0
    pts = [(100, 0, 100), (200, 0, 100)]
    assert chain_length((0, 0, 0), (0, 0, 0), pts) == pytest.approx(465.0281539872885, rel=1e-12)
    assert chain_length((0, 0, 0), (0, 0, 0), [(1, 2, 3), (1, 2, 3)]) == pytest.approx(2 * math.sqrt(14))


def test_unconstrained_block_lands_on_segment():
    p = ChainProblem((0, 0, 0), (10, 0, 0), [[5.0, 0.0, 0.0]], (0, 1), [[1.0, 3.0]])
    out = solve_chain(p)
    assert out.status is SolveStatus.CONVERGED
    assert out.objective == pytest.approx(10.0, abs=1e-6)
    assert abs(out.solution[0, 1]) < 1e-3


def test_altitude_box_goes_to_lowest_altitude():
    p = ChainProblem((0, 0, 0), (0, 0, 0), [[150.0, 0.0, 0.0]], (2,), [96.1], Box(Z_LO, Z_HI))
    out = solve_chain(p)
    z_ref = golden_section(lambda z: 2 * math.hypot(150, z), Z_LO, Z_HI)
    assert out.solution[0, 0] == pytest.approx(z_ref, abs=1e-3)
    assert out.solution[0, 0] == pytest.approx(89.74, abs=0.01)
    assert out.max_violation <= 1e-6


def test_optimal_start_is_kept():
    p = ChainProblem((0, 0, 0), (10, 0, 0), [[5.0, 0.0, 0.0]], (0, 1), [[0.0, 0.0]])
    start = p.objective(p.x0)
    assert solve_chain(p).objective == pytest.approx(start, abs=1e-9)


def test_infeasible_start_rejected():
    p = ChainProblem((0, 0, 0), (0, 0, 0), [[150.0, 0.0, 0.0]], (2,), [50.0], Box(Z_LO, Z_HI))
    with pytest.raises(InfeasibleStartError):
        solve_chain(p)


def test_boundary_start_block_is_held():
    p = ChainProblem((0, 0, 0), (0, 0, 0), [[150.0, 0.0, 0.0]], (2,), [Z_LO], Box(Z_LO, Z_HI))
    out = solve_chain(p)
    assert out.solution[0, 0] == Z_LO


def surrogate_problem(seed, mode, K):
    rng = np.random.default_rng(seed)
    sets, anchors, x0 = [], [], []
    for _ in range(K):
        gt = GroundTarget(tuple(rng.uniform(-150, 150, 2)), 20.0, rng.uniform(0.05, 0.35))
        z = rng.uniform(91.0, 98.0)
        sp = SurrogatePoint(z, (0.0, 0.0))
        sets.append(build_constraints(mode, gt, CAMERA, sp))
        if mode is SubproblemMode.ALTITUDE:
            anchors.append([gt.w[0], gt.w[1], 0.0])
            x0.append(z)
        else:
            anchors.append([gt.w[0], gt.w[1], z])
            x0.append([0.0, 0.0])
    start = tuple(rng.uniform(-100, 100, 2)) + (0.0,)
    end = tuple(rng.uniform(-100, 100, 2)) + (0.0,)
    axes = (2,) if mode is SubproblemMode.ALTITUDE else (0, 1)
    return ChainProblem(start, end, anchors, axes, x0, ConstraintBatch.from_sets(sets)), sets


def feasible_interval(cs, z0):
    def ok(z):
        return np.all(cs.evaluate(np.array([z]))[0] <= 0)

    def edge(inside, outside):
        for _ in range(200):
            mid = 0.5 * (inside + outside)
            inside, outside = (mid, outside) if ok(mid) else (inside, mid)
        return inside

    lo = edge(z0, 1e-3)
    hi = edge(z0, 10 * z0)
    return lo, hi


@pytest.mark.parametrize("seed", range(10))
def test_single_altitude_block_matches_golden_section(seed):
    p, (cs,) = surrogate_problem(seed, SubproblemMode.ALTITUDE, 1)
    lo, hi = feasible_interval(cs, p.x0[0, 0])
    grid = np.linspace(lo, hi, 2001)
    f = lambda z: p.objective(np.array([[z]]))  # noqa: E731
    z_grid = grid[np.argmin([f(z) for z in grid])]
    step = grid[1] - grid[0]
    z_best = golden_section(f, max(lo, z_grid - step), min(hi, z_grid + step))
    out = solve_chain(p)
    assert out.objective == pytest.approx(f(z_best), abs=1e-3)
    assert out.max_violation <= 1e-6


@pytest.mark.parametrize("seed", range(3))
def test_two_blocks_beat_random_feasible_points(seed):
    p, sets = surrogate_problem(100 + seed, SubproblemMode.HORIZONTAL, 2)
    out = solve_chain(p)
    rng = np.random.default_rng(seed)
    n = 0
    while n < 1000:
        x = rng.normal(0, 15, (2, 2))
        if np.all(p.constraints.values(x) <= 0):
            n += 1
            assert out.objective <= p.objective(x) + 1e-9
    assert out.objective <= p.objective(p.x0) + 1e-9


@pytest.mark.parametrize("mode", list(SubproblemMode))
def test_descent_and_feasibility(mode):
    for seed in range(5):
        p, _ = surrogate_problem(200 + seed, mode, 4)
        out = solve_chain(p)
        assert out.status in (SolveStatus.CONVERGED, SolveStatus.ITERATION_LIMIT)
        assert out.objective <= p.objective(p.x0) + 1e-9
        assert out.max_violation <= 1e-6
        assert out.objective == pytest.approx(p.objective(out.solution), abs=1e-12)


def test_iteration_limit_still_feasible():
    p, _ = surrogate_problem(7, SubproblemMode.HORIZONTAL, 3)
    out = solve_chain(p, SolverConfig(max_iters=3))
    assert out.status is SolveStatus.ITERATION_LIMIT
    assert out.iterations == 3
    assert out.objective <= p.objective(p.x0) + 1e-9
    assert out.max_violation <= 1e-6
