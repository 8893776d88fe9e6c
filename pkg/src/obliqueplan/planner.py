"""Joint planning of waypoints and visiting order, plus the two fixed-altitude
baselines.

``plan`` alternates waypoint optimization (altitudes and horizontal positions)
with re-solving the visiting order.  ``plan_vp_2d`` flies straight over every
target at one altitude; ``plan_op_2d`` keeps that altitude but lets the
waypoints slide horizontally.  Each scheme accepts the result of a cheaper
one as its starting point, so chaining VP2D -> OP2D -> OP3D can only shorten
the route.
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .chain import InfeasibleStartError
from .config import SolverConfig
from .model import (
    ModelDomainError,
    Scenario,
    ScenarioInfeasibleError,
    Waypoint3D,
    constraint_margins,
    coverage_area_exact,
    inner_distances_exact,
    nadir_interval,
    neighbourhood_contains,
)
from .routing import Tour, solve_order
from .waypoints import IterationTrace, as_array, as_waypoints, max_violation, optimize_waypoints, route_distance

log = logging.getLogger(__name__)

DEFAULT_ALTITUDE = 100.0
MARGIN_NAMES = ("resolution", "full_projection", "focal")


class Scheme(enum.Enum):
    OP3D = "OP3D"
    OP2D = "OP2D"
    VP2D = "VP2D"


class SolverError(RuntimeError):
    """The optimizer could not produce a feasible, non-worsening result."""


@dataclass(frozen=True)
class TargetReport:
    """Constraint slack for one target; non-negative means satisfied.

    ``margins`` uses the model the optimizer works with, ``exact_margins`` the
    full trapezoid construction (diagnostic only).
    """

    index: int
    margins: dict
    exact_margins: dict

    @property
    def violation(self) -> float:
        return max(0.0, -min(self.margins.values()))


@dataclass(frozen=True)
class FeasibilityReport:
    targets: Tuple[TargetReport, ...]
    distance: float

    @property
    def max_violation(self) -> float:
        return max((t.violation for t in self.targets), default=0.0)

    def violated(self, tol: float) -> Tuple[Tuple[int, str], ...]:
        """``(target index, constraint name)`` pairs with slack below ``-tol``."""
        return tuple((t.index, n) for t in self.targets for n in MARGIN_NAMES if t.margins[n] < -tol)


@dataclass(frozen=True)
class PlanResult:
    scheme: Scheme
    tour: Tour
    waypoints: Tuple[Waypoint3D, ...]  # in target order, not visiting order
    distance: float
    trace: IterationTrace
    feasibility_report: FeasibilityReport

    @property
    def iterations(self) -> int:
        return len(self.trace)


def _exact_margins(scn: Scenario, wp: Waypoint3D, gt) -> dict:
    focal = scn.camera.b1 * wp.z - math.hypot(wp.q[0] - gt.w[0], wp.q[1] - gt.w[1])
    try:
        area = coverage_area_exact(scn.camera, wp, gt)
        d = inner_distances_exact(scn.camera, wp, gt)
    except ModelDomainError:
        return {"resolution": -math.inf, "full_projection": -math.inf, "focal": focal}
    return {
        "resolution": math.pi * gt.r**2 / area - gt.i_min,
        "full_projection": min(d.d1, d.d2) - gt.r,
        "focal": focal,
    }


def _report(scn: Scenario, order: Sequence[int], waypoints: Sequence[Waypoint3D]) -> FeasibilityReport:
    reports = tuple(
        TargetReport(k, constraint_margins(scn.camera, wp, gt), _exact_margins(scn, wp, gt))
        for k, (wp, gt) in enumerate(zip(waypoints, scn.targets))
    )
    return FeasibilityReport(reports, route_distance(scn, order, as_array(waypoints)))


def evaluate(scn: Scenario, result: PlanResult) -> FeasibilityReport:
    """Recompute every constraint margin and the route length from scratch."""
    if len(result.waypoints) != len(scn.targets):
        raise ValueError(f"result has {len(result.waypoints)} waypoints for {len(scn.targets)} targets")
    if sorted(result.tour.order) != list(range(len(scn.targets))):
        raise ValueError(f"visiting order {result.tour.order} is not a permutation of the targets")
    return _report(scn, result.tour.order, result.waypoints)


def _order_step(scn: Scenario, W: np.ndarray, cfg: SolverConfig, incumbent=None) -> Tour:
    method = "auto" if cfg.order_solver == "auto" else cfg.order_solver
    return solve_order(
        scn.endpoints, [tuple(p) for p in W], method=method, exact_cap=cfg.exact_cap,
        rng_seed=cfg.rng_seed, restarts=cfg.heuristic_restarts, incumbent=incumbent,
    )


def _finish(scheme: Scheme, scn: Scenario, order, waypoints, trace: IterationTrace, cfg: SolverConfig) -> PlanResult:
    order = tuple(int(k) for k in order)
    report = _report(scn, order, waypoints)
    if report.max_violation > cfg.feas_tol:
        raise SolverError(f"{scheme.value} result violates constraints by {report.max_violation:.3g}")
    return PlanResult(scheme, Tour(order, report.distance), tuple(waypoints), report.distance, trace, report)


def initialize(scn: Scenario, cfg: SolverConfig = SolverConfig()) -> Tuple[Tour, Tuple[Waypoint3D, ...]]:
    """Visiting order over the targets' ground positions and mid-interval nadir waypoints."""
    scn.check_nadir_feasible()
    ground = np.array([[gt.w[0], gt.w[1], 0.0] for gt in scn.targets])
    order = _order_step(scn, ground, cfg).order
    waypoints = tuple(Waypoint3D(gt.w, sum(nadir_interval(scn.camera, gt)) / 2.0) for gt in scn.targets)
    return Tour(order, route_distance(scn, order, as_array(waypoints))), waypoints


def _unpack_init(init) -> Tuple[Tuple[int, ...], Tuple[Waypoint3D, ...]]:
    if isinstance(init, PlanResult):
        return init.tour.order, init.waypoints
    tour, waypoints = init
    order = tour.order if isinstance(tour, Tour) else tuple(tour)
    return tuple(int(k) for k in order), tuple(waypoints)


def _alternate(scheme: Scheme, scn: Scenario, order, waypoints, cfg: SolverConfig, blocks: str) -> PlanResult:
    W = as_array(waypoints)
    if sorted(order) != list(range(len(scn.targets))) or len(W) != len(scn.targets):
        raise ValueError("initial order and waypoints must cover every target exactly once")
    viol = max_violation(scn, W)
    if viol > cfg.feas_tol:
        raise ValueError(f"initial waypoints violate their constraints by {viol:.3g}")
    order = list(order)
    trace = IterationTrace()
    dist = route_distance(scn, order, W)
    trace.add("ORDER", dist, viol)
    converged = False
    try:
        for _ in range(cfg.max_outer_iters):
            before = dist
            waypoints, trace = optimize_waypoints(scn, order, waypoints, cfg, trace, blocks=blocks)
            W = as_array(waypoints)
            dist = route_distance(scn, order, W)
            tour = _order_step(scn, W, cfg, incumbent=order)
            if tour.length < dist:
                order, dist = list(tour.order), route_distance(scn, tour.order, W)
            trace.add("ORDER", dist, max_violation(scn, W))
            if before - dist < cfg.obj_tol * before:
                converged = True
                break
    except (ModelDomainError, InfeasibleStartError, np.linalg.LinAlgError) as exc:
        raise SolverError(f"{scheme.value} optimization failed: {exc}") from exc
    trace.converged = converged
    return _finish(scheme, scn, order, waypoints, trace, cfg)


def plan(scn: Scenario, cfg: SolverConfig = SolverConfig(),
         init: Union[PlanResult, Tuple, None] = None) -> PlanResult:
    """Alternate full 3D waypoint optimization with re-ordering.

    ``init`` is a previous :class:`PlanResult` or an ``(order, waypoints)``
    pair; by default :func:`initialize` supplies it.
    """
    order, waypoints = _unpack_init(init if init is not None else initialize(scn, cfg))
    return _alternate(Scheme.OP3D, scn, order, waypoints, cfg, cfg.bcd_order)


def _fixed_altitude_waypoints(scn: Scenario, altitude: float, cfg: SolverConfig) -> Tuple[Waypoint3D, ...]:
    if not altitude > 0:
        raise ValueError(f"altitude must be positive, got {altitude!r}")
    waypoints = tuple(Waypoint3D(gt.w, altitude) for gt in scn.targets)
    for k, (wp, gt) in enumerate(zip(waypoints, scn.targets)):
        check = neighbourhood_contains(scn.camera, wp, gt, tol=cfg.model_tol)
        if not check:
            raise ScenarioInfeasibleError(
                f"target {k + 1} at {gt.w}: not photographable from directly above at "
                f"z = {altitude:g} m (fails {', '.join(check.failed)})",
                target_index=k,
            )
    return waypoints


def plan_vp_2d(scn: Scenario, altitude: float = DEFAULT_ALTITUDE, cfg: SolverConfig = SolverConfig()) -> PlanResult:
    """Fly over every target at one altitude; only the order is optimized."""
    waypoints = _fixed_altitude_waypoints(scn, altitude, cfg)
    W = as_array(waypoints)
    tour = _order_step(scn, W, cfg)
    trace = IterationTrace()
    trace.add("ORDER", tour.length, max_violation(scn, W))
    trace.converged = True
    return _finish(Scheme.VP2D, scn, tour.order, waypoints, trace, cfg)


def plan_op_2d(scn: Scenario, altitude: float = DEFAULT_ALTITUDE, cfg: SolverConfig = SolverConfig(),
               init: Union[PlanResult, Tuple, None] = None) -> PlanResult:
    """Optimize horizontal positions and order at a frozen altitude.

    Starts from the VP2D plan at the same altitude unless ``init`` is given;
    ``init`` waypoints must already sit at ``altitude``.
    """
    if init is None:
        init = plan_vp_2d(scn, altitude, cfg)
    else:
        _fixed_altitude_waypoints(scn, altitude, cfg)
    order, waypoints = _unpack_init(init)
    if any(abs(wp.z - altitude) > 1e-9 * max(1.0, altitude) for wp in waypoints):
        raise ValueError(f"initial waypoints must all be at the fixed altitude {altitude:g} m")
    return _alternate(Scheme.OP2D, scn, order, waypoints, cfg, "Q")


def plan_chained(scn: Scenario, altitude: float = DEFAULT_ALTITUDE, cfg: SolverConfig = SolverConfig()):
    """VP2D, then OP2D started from it, then OP3D started from OP2D."""
    vp = plan_vp_2d(scn, altitude, cfg)
    op2 = plan_op_2d(scn, altitude, cfg, init=vp)
    op3 = plan(scn, cfg, init=op2)
    return {Scheme.VP2D: vp, Scheme.OP2D: op2, Scheme.OP3D: op3}
