"""Convex inner approximations of the neighbourhood constraints.

The resolution and full-projection constraints are rewritten as

    resolution:      -1.5 ln(|l|^2 + z^2) - 3 ln z        >= f1(z, l)
    full projection:  z^4 + 2 z^2 |l|^2 + |l|^4           >= f2(z, l)

with ``l = q - w``.  Each left-hand term is convex in the free block, so its
first-order Taylor expansion at the incumbent is a global under-estimator.
Replacing the left-hand sides by those expansions yields convex constraints
whose feasible set lies inside the original one and touches it at the
expansion point.

Constraint functions are returned in ``g(x) <= 0`` form together with their
analytic gradients and Hessians with respect to the free block.  Quartic
constraints are divided by ``(z_ref^2 + |l_ref|^2)^2`` so every value is O(1);
positive rescaling does not change the feasible set.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from . import _kernels
from .model import CameraIntrinsics, GroundTarget, ModelDomainError, Waypoint3D, neighbourhood_contains

DOMAIN_GUARD = 1e-8
# sqrt(|l|^2 + (NORM_SMOOTHING * z)^2) replaces |l| in the (b1 z + |l|)^2 branch.
NORM_SMOOTHING = 1e-9

CONSTRAINT_NAMES = ("resolution", "projection_near", "projection_side", "focal")


class SubproblemMode(enum.Enum):
    ALTITUDE = "Z"
    HORIZONTAL = "Q"


# -- the two nonconvex right-hand sides -------------------------------------------------


def f1(z: float, l_norm: float, gt: GroundTarget, cam: CameraIntrinsics) -> float:
    """``ln(i_min / a) - 2 ln(z^2 - |l|^2 / b1^2)``."""
    inner = z * z - l_norm * l_norm / cam.b1**2
    if not inner > 0:
        raise ModelDomainError(f"f1 undefined: z^2 - |l|^2/b1^2 = {inner!r}")
    return math.log(gt.i_min / gt.area_constant(cam)) - 2.0 * math.log(inner)


def f2(z: float, l_norm: float, gt: GroundTarget, cam: CameraIntrinsics) -> float:
    """``r^2 max((b1 z + |l|)^2, b2^2 z^2 + (1 + b2^2) |l|^2)``."""
    b1, b2 = cam.b1, cam.b2
    return gt.r**2 * max((b1 * z + l_norm) ** 2, b2**2 * z * z + (1.0 + b2**2) * l_norm**2)


def resolution_lhs(z: float, l_norm: float) -> float:
    return -1.5 * math.log(l_norm**2 + z * z) - 3.0 * math.log(z)


def projection_lhs(z: float, l_norm: float) -> float:
    return z**4 + 2.0 * z * z * l_norm**2 + l_norm**4


# -- Taylor under-estimators ------------------------------------------------------------
# phi*: altitude block (l fixed), theta*: horizontal block (z fixed).


def phi1(z, z_ref, l_norm):
    """Under-estimator of ``-1.5 ln(|l|^2 + z^2)``, linear in ``z^2``."""
    s = l_norm**2 + z_ref**2
    return -1.5 * np.log(s) - 1.5 / s * (z**2 - z_ref**2)


def phi2(z, z_ref):
    """Under-estimator of ``-3 ln z``."""
    return -3.0 * np.log(z_ref) - 3.0 / z_ref * (z - z_ref)


def phi3(z, z_ref):
    """Under-estimator of ``z^4``."""
    return z_ref**4 + 4.0 * z_ref**3 * (z - z_ref)


def phi4(z, z_ref, l_norm):
    """Under-estimator of ``2 z^2 |l|^2``."""
    return 2.0 * z_ref**2 * l_norm**2 + 4.0 * z_ref * l_norm**2 * (z - z_ref)


def theta1(l, l_ref, z):
    """Under-estimator of ``-1.5 ln(|l|^2 + z^2)``, expanded in ``|l|^2``."""
    l, l_ref = np.asarray(l, float), np.asarray(l_ref, float)
    n2, n2_ref = np.sum(l * l, axis=-1), np.sum(l_ref * l_ref, axis=-1)
    s = n2_ref + z**2
    return -1.5 * np.log(s) - 1.5 / s * (n2 - n2_ref)


def theta2(l, l_ref, z):
    """Under-estimator of ``2 z^2 |l|^2``, expanded in the vector ``l``."""
    l, l_ref = np.asarray(l, float), np.asarray(l_ref, float)
    n2_ref = np.sum(l_ref * l_ref, axis=-1)
    return 2.0 * z**2 * n2_ref + 4.0 * z**2 * np.sum(l_ref * (l - l_ref), axis=-1)


def theta3(l, l_ref):
    """Under-estimator of ``|l|^4``, expanded in the vector ``l``."""
    l, l_ref = np.asarray(l, float), np.asarray(l_ref, float)
    n2_ref = np.sum(l_ref * l_ref, axis=-1)
    return n2_ref**2 + 4.0 * n2_ref * np.sum(l_ref * (l - l_ref), axis=-1)


# -- constraint sets --------------------------------------------------------------------


@dataclass(frozen=True)
class SurrogatePoint:
    z_ref: float
    l_ref: Tuple[float, float]

    def __post_init__(self):
        object.__setattr__(self, "l_ref", (float(self.l_ref[0]), float(self.l_ref[1])))
        if not self.z_ref > 0:
            raise ValueError(f"expansion altitude must be positive, got {self.z_ref!r}")

    @property
    def l_norm(self) -> float:
        return math.hypot(*self.l_ref)

    @classmethod
    def from_waypoint(cls, wp: Waypoint3D, gt: GroundTarget) -> "SurrogatePoint":
        return cls(wp.z, (wp.q[0] - gt.w[0], wp.q[1] - gt.w[1]))


@dataclass(frozen=True)
class ConstraintBatch:
    """Surrogate constraints for several waypoints of one subproblem, stacked.

    Per-waypoint parameters are 1-D arrays of length ``K``; ``l_ref`` is ``(K, 2)``.
    In altitude mode the free variable of waypoint ``k`` is ``z_k``; in
    horizontal mode it is the offset ``l_k`` and ``z_ref`` is the frozen altitude.
    """

    mode: SubproblemMode
    b1: float
    b2: float
    r: np.ndarray
    log_ratio: np.ndarray  # ln(i_min / a)
    z_ref: np.ndarray
    l_ref: np.ndarray

    @property
    def size(self) -> int:
        return len(self.r)

    @property
    def dim(self) -> int:
        return 1 if self.mode is SubproblemMode.ALTITUDE else 2

    @property
    def scale(self) -> np.ndarray:
        return (self.z_ref**2 + np.sum(self.l_ref**2, axis=1)) ** 2

    def evaluate(self, x: np.ndarray):
        """Values ``(K, 4)``, gradients ``(K, 4, d)`` and Hessians ``(K, 4, d, d)``.

        ``x`` is ``(K,)`` altitudes or ``(K, 2)`` offsets.  Points outside the
        logarithm's guarded domain get value ``+inf``.
        """
        if self.mode is SubproblemMode.ALTITUDE:
            return _altitude_constraints(self, np.asarray(x, float).reshape(-1))
        return _horizontal_constraints(self, np.asarray(x, float).reshape(-1, 2))

    def values(self, x: np.ndarray) -> np.ndarray:
        """Constraint values only, ``(K, 4)``."""
        if self.mode is SubproblemMode.ALTITUDE:
            return _altitude_constraints(self, np.asarray(x, float).reshape(-1), derivatives=False)
        return _horizontal_constraints(self, np.asarray(x, float).reshape(-1, 2), derivatives=False)

    @classmethod
    def from_sets(cls, sets: Sequence["WaypointConstraintSet"]) -> "ConstraintBatch":
        if not sets:
            raise ValueError("no constraint sets given")
        mode, cam = sets[0].mode, sets[0].camera
        if any(s.mode is not mode for s in sets):
            raise ValueError("constraint sets of mixed modes cannot be stacked")
        return cls(
            mode=mode,
            b1=cam.b1,
            b2=cam.b2,
            r=np.array([s.target.r for s in sets], float),
            log_ratio=np.array([math.log(s.target.i_min / s.target.area_constant(s.camera)) for s in sets]),
            z_ref=np.array([s.surrogate.z_ref for s in sets], float),
            l_ref=np.array([s.surrogate.l_ref for s in sets], float).reshape(-1, 2),
        )


def _altitude_constraints(b: ConstraintBatch, z: np.ndarray, derivatives: bool = True):
    L2 = np.einsum("ki,ki->k", b.l_ref, b.l_ref)
    return _kernels.altitude_constraints(
        z, b.z_ref, L2, b.r**2, b.log_ratio, b.b1, b.b2, DOMAIN_GUARD, derivatives
    )


def _horizontal_constraints(b: ConstraintBatch, l: np.ndarray, derivatives: bool = True):
    return _kernels.horizontal_constraints(
        l, b.z_ref, b.l_ref, b.r**2, b.log_ratio, b.b1, b.b2, DOMAIN_GUARD, NORM_SMOOTHING, derivatives
    )


@dataclass(frozen=True)
class WaypointConstraintSet:
    """Convex surrogate constraints for one waypoint, expanded at ``surrogate``.

    ``frozen`` is the block held fixed: the offset ``l_ref`` in altitude mode,
    the altitude in horizontal mode.
    """

    target: GroundTarget
    camera: CameraIntrinsics
    surrogate: SurrogatePoint
    mode: SubproblemMode

    @property
    def frozen(self):
        if self.mode is SubproblemMode.ALTITUDE:
            return self.surrogate.l_ref
        return self.surrogate.z_ref

    @property
    def start(self) -> np.ndarray:
        if self.mode is SubproblemMode.ALTITUDE:
            return np.array([self.surrogate.z_ref])
        return np.array(self.surrogate.l_ref)

    def batch(self) -> ConstraintBatch:
        return ConstraintBatch.from_sets([self])

    def evaluate(self, x):
        """Values ``(4,)``, gradients ``(4, d)`` and Hessians ``(4, d, d)`` at ``x``."""
        v, g, h = self.batch().evaluate(np.asarray(x, float).reshape(1, -1))
        return v[0], g[0], h[0]

    def is_feasible(self, x, tol: float = 0.0) -> bool:
        return bool(np.all(self.evaluate(x)[0] <= tol))


def build_constraints(
    mode: SubproblemMode,
    gt: GroundTarget,
    cam: CameraIntrinsics,
    surrogate: SurrogatePoint,
    tol: float = 1e-9,
) -> WaypointConstraintSet:
    wp = Waypoint3D((gt.w[0] + surrogate.l_ref[0], gt.w[1] + surrogate.l_ref[1]), surrogate.z_ref)
    check = neighbourhood_contains(cam, wp, gt, tol)
    if not check.ok:
        raise ModelDomainError(
            f"expansion point infeasible for target at {gt.w}: violates {', '.join(check.failed)}"
        )
    return WaypointConstraintSet(target=gt, camera=cam, surrogate=surrogate, mode=mode)
