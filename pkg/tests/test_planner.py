import math

import numpy as np
import pytest

import obliqueplan.planner as planner
from obliqueplan.config import SolverConfig
from obliqueplan.model import GroundTarget, ModelDomainError, Scenario, ScenarioInfeasibleError, Waypoint3D
from obliqueplan.planner import (
    PlanResult,
    Scheme,
    SolverError,
    evaluate,
    initialize,
    plan,
    plan_chained,
    plan_op_2d,
    plan_vp_2d,
)
from obliqueplan.routing import solve_order
from obliqueplan.waypoints import as_array, optimize_waypoints, route_distance
from conftest import CAMERA, ORIGIN, random_scenario, single_target
from oracles import brute_force_order


def test_initialize_mid_interval_altitude():
    tour, (wp,) = initialize(single_target())
    assert tour.order == (0,)
    assert wp.z == pytest.approx(96.10089823636801, rel=1e-12)
    assert wp.q == (150.0, 0.0)


def test_initialize_orders_ground_points():
    scn = random_scenario(4, 6)
    tour, wps = initialize(scn)
    ground = [(t.w[0], t.w[1], 0.0) for t in scn.targets]
    assert tour.order == solve_order(scn.endpoints, ground).order
    assert tour.length == pytest.approx(route_distance(scn, tour.order, as_array(wps)), rel=1e-12)
    assert planner._report(scn, tour.order, wps).max_violation == 0.0


def test_initialize_names_infeasible_target():
    scn = Scenario(CAMERA, (GroundTarget((0, 0), 20, 0.2), GroundTarget((9, 9), 20, 0.55)), ORIGIN, ORIGIN)
    with pytest.raises(ScenarioInfeasibleError, match="target 2"):
        initialize(scn)


def test_single_target_plan_matches_waypoint_optimization():
    scn = single_target(i_min=0.25)
    tour, w0 = initialize(scn)
    w, _ = optimize_waypoints(scn, tour.order, w0)
    res = plan(scn)
    d = route_distance(scn, tour.order, as_array(w))
    assert res.tour.order == (0,)
    assert res.distance <= d + 1e-9
    assert res.distance == pytest.approx(d, rel=SolverConfig().obj_tol)


@pytest.mark.parametrize("seed", range(3))
def test_plan_descends_from_initialization(seed):
    scn = random_scenario(seed, 6)
    tour, w0 = initialize(scn)
    res = plan(scn)
    assert res.scheme is Scheme.OP3D
    assert res.distance <= tour.length + 1e-9
    assert res.trace.records[0].block == "ORDER"
    assert res.trace.records[0].objective == pytest.approx(tour.length, rel=1e-12)
    assert res.trace.records[-1].block == "ORDER"
    assert res.trace.is_monotone()
    assert res.feasibility_report.max_violation <= 1e-6
    assert res.distance == pytest.approx(route_distance(scn, res.tour.order, as_array(res.waypoints)), abs=1e-9)
    # the final order is optimal for the final waypoints
    order, length = brute_force_order(scn.start.as_tuple(), scn.end.as_tuple(), as_array(res.waypoints))
    assert res.distance == pytest.approx(length, rel=1e-10)


def test_vp2d_basics():
    scn = random_scenario(2, 7)
    res = plan_vp_2d(scn)
    assert all(w.z == 100.0 and w.q == t.w for w, t in zip(res.waypoints, scn.targets))
    assert res.tour.order == solve_order(scn.endpoints, [w.as_tuple() for w in res.waypoints]).order
    assert res.distance >= math.dist(scn.start.as_tuple(), scn.end.as_tuple())
    assert len(res.trace) == 1


def test_vp2d_feasibility_threshold_at_100m():
    plan_vp_2d(single_target(i_min=0.4199))
    with pytest.raises(ScenarioInfeasibleError, match="target 1"):
        plan_vp_2d(single_target(i_min=0.4200))
    with pytest.raises(ScenarioInfeasibleError, match="full_projection"):
        plan_vp_2d(single_target(i_min=0.1), altitude=50.0)


def test_op2d_from_vp2d():
    scn = random_scenario(5, 6)
    vp = plan_vp_2d(scn)
    op = plan_op_2d(scn, init=vp)
    assert op.scheme is Scheme.OP2D
    assert op.distance <= vp.distance + 1e-9
    assert all(w.z == 100.0 for w in op.waypoints)
    assert all(r.block in ("Q", "ORDER") for r in op.trace.records)
    assert op.feasibility_report.max_violation <= 1e-6
    assert plan_op_2d(scn) == op  # the default start is the VP2D plan
    with pytest.raises(ValueError, match="fixed altitude"):
        plan_op_2d(scn, init=plan(scn))


def test_chained_dominance_single_instance():
    res = plan_chained(random_scenario(8, 6))
    assert res[Scheme.OP3D].distance <= res[Scheme.OP2D].distance <= res[Scheme.VP2D].distance


def test_evaluate_reports_and_detects_tampering():
    scn = random_scenario(6, 4)
    res = plan(scn)
    rep = evaluate(scn, res)
    assert rep.max_violation <= 1e-6
    assert rep.distance == pytest.approx(res.distance, abs=1e-9)
    for t in rep.targets:
        assert set(t.margins) == set(t.exact_margins) == {"resolution", "full_projection", "focal"}
        # the exact trapezoid differs from the working model only at the f0 / d_u level
        assert t.exact_margins["full_projection"] == pytest.approx(t.margins["full_projection"], abs=0.1)

    wps = list(res.waypoints)
    wps[2] = Waypoint3D(scn.targets[2].w, 1.0)
    tampered = PlanResult(res.scheme, res.tour, tuple(wps), res.distance, res.trace, res.feasibility_report)
    rep = evaluate(scn, tampered)
    assert (2, "full_projection") in rep.violated(1e-6)
    assert rep.max_violation > 19.0  # d1 = 1 / b1 against r = 20
    assert rep.distance != pytest.approx(res.distance)


def test_deterministic():
    scn = random_scenario(9, 5)
    assert plan(scn) == plan(scn)
    assert plan_chained(scn) == plan_chained(scn)


def test_heuristic_order_solver_path():
    scn = random_scenario(10, 6)
    res = plan(scn, SolverConfig(order_solver="heuristic"))
    assert res.trace.is_monotone()
    assert res.feasibility_report.max_violation <= 1e-6


def test_solver_errors_are_wrapped(monkeypatch):
    def broken(*args, **kwargs):
        raise ModelDomainError("boom")

    monkeypatch.setattr(planner, "optimize_waypoints", broken)
    with pytest.raises(SolverError, match="boom"):
        plan(single_target())


def test_rejects_bad_initial_point():
    scn = single_target()
    with pytest.raises(ValueError):
        plan(scn, init=((0,), (Waypoint3D((150, 0), 50.0),)))
    with pytest.raises(ValueError):
        plan(scn, init=((0, 1), (Waypoint3D((150, 0), 96.0),)))
