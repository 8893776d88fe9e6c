"""Shortest waypoint chain under per-waypoint convex constraints.

The problem: points ``p_1 .. p_K`` between two fixed endpoints, where each
``p_k`` has either its altitude or its horizontal position free (the same
choice for every waypoint), and each waypoint's free block must satisfy a
few smooth convex inequalities ``g(x_k) <= 0``.  The objective is the chain
length.

It is solved by a feasible-start log-barrier method: damped Newton centering
on ``t * L_eps(x) - sum log(-g(x))`` with ``t`` growing geometrically, where
``L_eps`` is the chain length with every leg smoothed to
``sqrt(|d|^2 + eps^2)`` and ``eps`` shrinks alongside ``t``.  Iterates stay
strictly feasible, so an inner approximation of a nonconvex set is never
left.  The reported objective is always the unsmoothed chain length.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from typing import Optional, Protocol, Sequence

import numpy as np

from . import _kernels
from .config import SolverConfig

log = logging.getLogger(__name__)

# blocks whose start point has a constraint slack below this are held fixed
PIN_SLACK = 1e-13
CENTERING_TOL = 1e-7
ARMIJO = 0.25
MIN_STEP = 1e-14


class ConstraintFamily(Protocol):
    def evaluate(self, x: np.ndarray):
        """Return values ``(K, m)``, gradients ``(K, m, d)`` and Hessians ``(K, m, d, d)``."""


class SolveStatus(enum.Enum):
    CONVERGED = "Converged"
    ITERATION_LIMIT = "IterationLimit"
    NUMERICAL_FAILURE = "NumericalFailure"


class InfeasibleStartError(ValueError):
    pass


def chain_length(start, end, waypoints: Sequence = ()) -> float:
    pts = [np.asarray(start, float)] + [np.asarray(w, float) for w in waypoints] + [np.asarray(end, float)]
    return _kernels.chain_length(np.vstack(pts))


@dataclass
class ChainProblem:
    """``anchors`` is ``(K, 3)``; the free block of waypoint ``k`` replaces
    (altitude mode, ``free_axes=(2,)``) or offsets (horizontal mode,
    ``free_axes=(0, 1)``) the anchor's coordinates on ``free_axes``:
    ``p_k[free_axes] = anchors[k, free_axes] + x_k``.  For altitude mode the
    anchor altitude is therefore 0.
    """

    start: np.ndarray
    end: np.ndarray
    anchors: np.ndarray
    free_axes: tuple
    x0: np.ndarray
    constraints: Optional[ConstraintFamily] = None

    def __post_init__(self):
        self.start = np.asarray(self.start, float).reshape(3)
        self.end = np.asarray(self.end, float).reshape(3)
        self.anchors = np.asarray(self.anchors, float).reshape(-1, 3)
        self.free_axes = tuple(self.free_axes)
        self.x0 = np.asarray(self.x0, float).reshape(len(self.anchors), len(self.free_axes))

    @property
    def dim(self) -> int:
        return len(self.free_axes)

    def points(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, float).reshape(len(self.anchors), self.dim)
        pts = np.empty((len(self.anchors) + 2, 3))
        pts[0] = self.start
        pts[-1] = self.end
        pts[1:-1] = self.anchors
        pts[1:-1, list(self.free_axes)] += x
        return pts

    def objective(self, x: np.ndarray) -> float:
        return _kernels.chain_length(self.points(x))


@dataclass
class SolveOutcome:
    solution: np.ndarray
    objective: float
    iterations: int
    status: SolveStatus
    max_violation: float


def _constraint_eval(problem: ChainProblem, x: np.ndarray):
    if problem.constraints is None:
        K = len(problem.anchors)
        d = problem.dim
        return np.zeros((K, 0)), np.zeros((K, 0, d)), np.zeros((K, 0, d, d))
    return problem.constraints.evaluate(x)


def _constraint_values(problem: ChainProblem, x: np.ndarray) -> np.ndarray:
    c = problem.constraints
    if c is None:
        return np.zeros((len(problem.anchors), 0))
    if hasattr(c, "values"):
        return c.values(x)
    return c.evaluate(x)[0]


def max_violation(problem: ChainProblem, x: np.ndarray) -> float:
    vals = _constraint_values(problem, x)
    if vals.size == 0:
        return 0.0
    worst = float(np.max(vals))
    return max(0.0, worst) if np.isfinite(worst) else float("inf")


class _Barrier:
    """Barrier objective over the free (unpinned) blocks."""

    def __init__(self, problem: ChainProblem, free: np.ndarray, x_full: np.ndarray):
        self.p = problem
        self.free = free
        self.x_full = x_full.copy()
        self.d = problem.dim
        self.axes = list(problem.free_axes)
        # free blocks i, i + 1 that are consecutive waypoints share a leg
        self.pos = np.arange(len(free))
        self.linked = np.nonzero(np.diff(free) == 1)[0]

    def expand(self, xf: np.ndarray) -> np.ndarray:
        x = self.x_full.copy()
        x[self.free] = xf.reshape(-1, self.d)
        return x

    def constraint_terms(self, x: np.ndarray):
        vals, grads, hess = _constraint_eval(self.p, x)
        return vals[self.free], grads[self.free], hess[self.free]

    def value(self, xf: np.ndarray, t: float, eps: float) -> float:
        x = self.expand(xf)
        vals = _constraint_values(self.p, x)[self.free]
        if vals.size and not np.all(vals < 0):
            return np.inf
        obj = _kernels.smoothed_chain(self.p.points(x), eps)[0]
        return t * obj - float(np.sum(np.log(-vals)))

    def derivatives(self, xf: np.ndarray, t: float, eps: float):
        x = self.expand(xf)
        d = self.d
        nf = len(self.free)
        obj, gpts, leg_h = _kernels.smoothed_chain(self.p.points(x), eps)
        # waypoint k is point k + 1
        g = gpts[1:-1][:, self.axes][self.free]
        hsel = leg_h[:, self.axes][:, :, self.axes]
        diag = hsel[:-1] + hsel[1:]
        H = np.zeros((nf, d, nf, d))
        H[self.pos, :, self.pos, :] = diag[self.free]
        i = self.linked
        off = -hsel[self.free[i] + 1]
        H[i, :, i + 1, :] = off
        H[i + 1, :, i, :] = off
        H = H.reshape(nf * d, nf * d)
        g = t * g
        H *= t
        vals, cg, ch = self.constraint_terms(x)
        if vals.size:
            inv = 1.0 / (-vals)  # (nf, m)
            g = g + np.einsum("km,kmd->kd", inv, cg)
            blocks = np.einsum("km,kmd,kme->kde", inv**2, cg, cg) + np.einsum("km,kmde->kde", inv, ch)
            H4 = H.reshape(nf, d, nf, d)
            H4[self.pos, :, self.pos, :] += blocks
        value = t * obj - (float(np.sum(np.log(-vals))) if vals.size else 0.0)
        return value, g.reshape(-1), H


def _newton_direction(g: np.ndarray, H: np.ndarray) -> np.ndarray:
    reg = 0.0
    scale = max(1.0, float(np.max(np.abs(np.diag(H)))))
    for _ in range(8):
        try:
            L = np.linalg.cholesky(H + reg * np.eye(len(g)))
        except np.linalg.LinAlgError:
            reg = max(reg * 100.0, 1e-12 * scale)
            continue
        y = np.linalg.solve(L, -g)
        step = np.linalg.solve(L.T, y)
        if np.all(np.isfinite(step)):
            return step
        reg = max(reg * 100.0, 1e-12 * scale)
    raise np.linalg.LinAlgError("barrier Hessian could not be factorized")


def solve_chain(problem: ChainProblem, cfg: SolverConfig = SolverConfig()) -> SolveOutcome:
    x0 = problem.x0.copy()
    f_start = problem.objective(x0)
    vals0 = _constraint_values(problem, x0)
    if vals0.size and not np.all(vals0 <= cfg.feas_tol):
        raise InfeasibleStartError(f"start point violates constraints by {float(np.max(vals0)):.3g}")

    K = len(problem.anchors)
    m_per = vals0.shape[1]
    if m_per:
        free = np.nonzero(np.all(vals0 < -PIN_SLACK, axis=1))[0]
    else:
        free = np.arange(K)
    if len(free) < K:
        log.debug("holding %d block(s) fixed: start on the constraint boundary", K - len(free))
    if len(free) == 0:
        return SolveOutcome(x0, f_start, 0, SolveStatus.CONVERGED, max_violation(problem, x0))

    bar = _Barrier(problem, free, x0)
    xf = x0[free].reshape(-1)
    m = len(free) * m_per
    t = cfg.barrier_t0
    eps = cfg.smoothing_start
    iters = 0
    status = SolveStatus.ITERATION_LIMIT
    try:
        while iters < cfg.max_iters:
            for _ in range(cfg.newton_per_stage):
                if iters >= cfg.max_iters:
                    break
                value, g, H = bar.derivatives(xf, t, eps)
                step = _newton_direction(g, H)
                decrement = -float(g @ step)
                iters += 1
                if decrement / 2.0 <= CENTERING_TOL:
                    break
                alpha = 1.0
                while alpha > MIN_STEP:
                    trial = bar.value(xf + alpha * step, t, eps)
                    if trial <= value - ARMIJO * alpha * decrement:
                        break
                    alpha *= 0.5
                else:
                    break
                xf = xf + alpha * step
            gap = m / t
            obj = problem.objective(bar.expand(xf))
            if gap <= cfg.obj_tol * max(obj, 1.0) and eps <= cfg.smoothing_end:
                status = SolveStatus.CONVERGED
                break
            t *= cfg.barrier_mu
            eps = max(cfg.smoothing_end, eps / 10.0)
    except (np.linalg.LinAlgError, FloatingPointError) as exc:
        log.warning("chain solve failed: %s", exc)
        return SolveOutcome(x0, f_start, iters, SolveStatus.NUMERICAL_FAILURE, max_violation(problem, x0))

    x = bar.expand(xf)
    f = problem.objective(x)
    viol = max_violation(problem, x)
    if not np.isfinite(f) or f > f_start or viol > cfg.feas_tol:
        x, f, viol = x0, f_start, max_violation(problem, x0)
    return SolveOutcome(x, f, iters, status, viol)
