"""Shortest UAV photo-survey routes under an oblique-camera resolution model."""
from .config import SolverConfig
from .model import (
    CameraIntrinsics,
    GroundTarget,
    ModelDomainError,
    Scenario,
    ScenarioInfeasibleError,
    Waypoint3D,
    coverage_area,
    coverage_area_exact,
    inner_distances,
    inner_distances_exact,
    nadir_interval,
    neighbourhood_contains,
    resolution,
)
from .planner import PlanResult, Scheme, SolverError, evaluate, initialize, plan, plan_op_2d, plan_vp_2d
from .routing import Tour, solve_order_exact, solve_order_heuristic
from .scenario_io import DEFAULT_CAMERA

__all__ = [
    "CameraIntrinsics", "GroundTarget", "ModelDomainError", "Scenario", "ScenarioInfeasibleError",
    "Waypoint3D", "coverage_area", "coverage_area_exact", "inner_distances", "inner_distances_exact",
    "nadir_interval", "neighbourhood_contains", "resolution", "SolverConfig", "PlanResult", "Scheme",
    "SolverError", "evaluate", "initialize", "plan", "plan_op_2d", "plan_vp_2d", "Tour",
    "solve_order_exact", "solve_order_heuristic", "DEFAULT_CAMERA",
]
