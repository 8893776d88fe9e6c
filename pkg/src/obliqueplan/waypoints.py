"""Waypoint optimization for a fixed visiting order.

Altitudes and horizontal positions are optimized alternately.  Each block is
handled by successive convex approximation: rebuild the surrogate constraints
at the incumbent, solve the convex chain problem, repeat until the distance
stops improving.  Every accepted iterate is feasible for the original
neighbourhood constraints, and the distance never increases.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import _kernels
from .chain import ChainProblem, SolveStatus, solve_chain
from .config import SolverConfig
from .model import Scenario, Waypoint3D, constraint_margins
from .surrogates import ConstraintBatch, SubproblemMode, SurrogatePoint, build_constraints

log = logging.getLogger(__name__)

MONOTONE_SLACK = 1e-8
BLOCKS = ("Z", "Q", "ORDER")


@dataclass(frozen=True)
class TraceRecord:
    iter: int
    block: str
    objective: float
    max_violation: float


@dataclass
class IterationTrace:
    records: List[TraceRecord] = field(default_factory=list)
    converged: bool = False

    def add(self, block: str, objective: float, max_violation: float) -> TraceRecord:
        if block not in BLOCKS:
            raise ValueError(f"unknown block {block!r}")
        rec = TraceRecord(len(self.records), block, float(objective), float(max_violation))
        self.records.append(rec)
        return rec

    def objectives(self) -> np.ndarray:
        return np.array([r.objective for r in self.records])

    def is_monotone(self, slack: float = MONOTONE_SLACK) -> bool:
        obj = self.objectives()
        return bool(np.all(np.diff(obj) <= slack))

    def __len__(self) -> int:
        return len(self.records)


def as_array(waypoints: Sequence[Waypoint3D]) -> np.ndarray:
    return np.array([wp.as_tuple() for wp in waypoints], float).reshape(-1, 3)


def as_waypoints(arr: np.ndarray) -> Tuple[Waypoint3D, ...]:
    return tuple(Waypoint3D((p[0], p[1]), p[2]) for p in np.asarray(arr, float))


def route_distance(scn: Scenario, order: Sequence[int], W: np.ndarray) -> float:
    pts = np.vstack([scn.start.as_tuple(), W[list(order)], scn.end.as_tuple()])
    return _kernels.chain_length(pts)


def max_violation(scn: Scenario, W: np.ndarray) -> float:
    """Largest violation of the original neighbourhood constraints (0 if feasible)."""
    worst = 0.0
    for gt, p in zip(scn.targets, W):
        m = constraint_margins(scn.camera, Waypoint3D((p[0], p[1]), p[2]), gt)
        worst = max(worst, -min(m.values()))
    return worst


def _sca_block(scn: Scenario, order, W: np.ndarray, cfg: SolverConfig, mode: SubproblemMode, max_iters: int):
    W = W.copy()
    order = list(order)
    targets = [scn.targets[k] for k in order]
    w = np.array([gt.w for gt in targets], float)
    obj = route_distance(scn, order, W)
    start, end = scn.endpoints
    for _ in range(max_iters):
        sets = [
            build_constraints(mode, gt, scn.camera, SurrogatePoint.from_waypoint(Waypoint3D(W[k, :2], W[k, 2]), gt), cfg.model_tol)
            for gt, k in zip(targets, order)
        ]
        batch = ConstraintBatch.from_sets(sets)
        if mode is SubproblemMode.ALTITUDE:
            anchors = np.column_stack([W[order, :2], np.zeros(len(order))])
            problem = ChainProblem(start, end, anchors, (2,), W[order, 2], batch)
        else:
            anchors = np.column_stack([w, W[order, 2]])
            problem = ChainProblem(start, end, anchors, (0, 1), W[order, :2] - w, batch)
        out = solve_chain(problem, cfg)
        if out.status is SolveStatus.NUMERICAL_FAILURE:
            log.warning("%s-block solve failed; keeping the incumbent", mode.value)
            break
        W_new = W.copy()
        W_new[order] = problem.points(out.solution)[1:-1]
        new_obj = route_distance(scn, order, W_new)
        if new_obj > obj or max_violation(scn, W_new) > cfg.model_tol:
            break
        improvement = obj - new_obj
        W, obj = W_new, new_obj
        if improvement < cfg.obj_tol * obj:
            break
    return W, obj


def _run_block(scn, order, waypoints, cfg, trace, mode, max_iters):
    W = as_array(waypoints)
    if max_violation(scn, W) > cfg.feas_tol:
        raise ValueError("input waypoints violate their neighbourhood constraints")
    trace = trace if trace is not None else IterationTrace()
    W, obj = _sca_block(scn, order, W, cfg, mode, max_iters)
    trace.add(mode.value, obj, max_violation(scn, W))
    return as_waypoints(W), trace


def optimize_altitudes(scn: Scenario, order, waypoints, cfg: SolverConfig = SolverConfig(),
                       trace: Optional[IterationTrace] = None):
    """Lower or raise each waypoint with horizontal positions held fixed."""
    return _run_block(scn, order, waypoints, cfg, trace, SubproblemMode.ALTITUDE, cfg.max_sca_iters)


def optimize_horizontal(scn: Scenario, order, waypoints, cfg: SolverConfig = SolverConfig(),
                        trace: Optional[IterationTrace] = None):
    """Move each waypoint horizontally with altitudes held fixed."""
    return _run_block(scn, order, waypoints, cfg, trace, SubproblemMode.HORIZONTAL, cfg.max_sca_iters)


def optimize_waypoints(scn: Scenario, order, waypoints, cfg: SolverConfig = SolverConfig(),
                       trace: Optional[IterationTrace] = None, blocks: Optional[str] = None):
    """Block coordinate descent over altitudes and horizontal positions.

    ``blocks`` restricts the sweep (e.g. ``"Q"`` for fixed-altitude planning);
    it defaults to ``cfg.bcd_order``.  With ``cfg.sca_interleave`` each block
    takes a single convex-approximation step per sweep instead of running to
    convergence.  Sets ``trace.converged`` when a sweep improves the distance
    by less than ``obj_tol`` relative.
    """
    trace = trace if trace is not None else IterationTrace()
    blocks = blocks or cfg.bcd_order
    sca_iters = 1 if cfg.sca_interleave else cfg.max_sca_iters
    modes = {"Z": SubproblemMode.ALTITUDE, "Q": SubproblemMode.HORIZONTAL}
    prev = route_distance(scn, order, as_array(waypoints))
    trace.converged = False
    for _ in range(cfg.max_bcd_iters):
        for b in blocks:
            waypoints, trace = _run_block(scn, order, waypoints, cfg, trace, modes[b], sca_iters)
        obj = trace.records[-1].objective
        if prev - obj < cfg.obj_tol * prev:
            trace.converged = True
            break
        prev = obj
    return waypoints, trace
