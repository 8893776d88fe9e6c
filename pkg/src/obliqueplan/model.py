"""Oblique-photography camera geometry.

A camera tilted toward a disk-shaped ground target images an isosceles
trapezoid on the ground.  Everything here is a closed-form function of the
UAV pose ``(q, z)`` relative to the target centre ``w``:

* the coverage area and its growth factor over the nadir footprint,
* the image resolution, i.e. target area divided by coverage area,
* the two inner distances from the target centre to the trapezoid sides,
* membership of a pose in the target's feasible region ("neighbourhood").

The optimizer works with the large-distance approximations (``d_u - f0 ~ d_u``);
the ``*_exact`` variants keep the full trapezoid construction and serve as
reference values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Tuple

DEFAULT_MODEL_TOL = 1e-9


class ModelDomainError(ValueError):
    """A pose lies outside the domain where the camera model is defined."""


@dataclass(frozen=True)
class CameraIntrinsics:
    f0: float
    w0: float
    l0: float

    def __post_init__(self):
        for name in ("f0", "w0", "l0"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ValueError(f"{name} must be positive and finite, got {v!r}")

    @property
    def b1(self) -> float:
        return 2.0 * self.f0 / self.w0

    @property
    def b2(self) -> float:
        return 2.0 * self.f0 / self.l0

    @property
    def max_angle(self) -> float:
        """Largest oblique angle before the near image edge leaves the focal plane."""
        return math.atan(self.b1)


@dataclass(frozen=True)
class GroundTarget:
    w: Tuple[float, float]
    r: float
    i_min: float

    def __post_init__(self):
        object.__setattr__(self, "w", (float(self.w[0]), float(self.w[1])))
        if not self.r > 0:
            raise ValueError(f"target radius must be positive, got {self.r!r}")
        if not 0 < self.i_min < 1:
            raise ValueError(f"i_min must lie in (0, 1), got {self.i_min!r}")

    def area_constant(self, cam: CameraIntrinsics) -> float:
        """``a = b1 * b2 * pi * r^2 / 4``; nadir resolution is ``a / z^2``."""
        return cam.b1 * cam.b2 * math.pi * self.r**2 / 4.0


@dataclass(frozen=True)
class Waypoint3D:
    q: Tuple[float, float]
    z: float

    def __post_init__(self):
        object.__setattr__(self, "q", (float(self.q[0]), float(self.q[1])))
        object.__setattr__(self, "z", float(self.z))

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.q[0], self.q[1], self.z)


@dataclass(frozen=True)
class FootprintExtents:
    ef: float
    ad: float
    bc: float


@dataclass(frozen=True)
class InnerDistances:
    d1: float
    d2: float


@dataclass(frozen=True)
class NeighbourhoodCheck:
    """Outcome of a membership test.

    ``margins`` holds the signed slack of each constraint (non-negative when
    satisfied): ``resolution`` is ``I - i_min``, ``full_projection`` is
    ``min(d1, d2) - r`` and ``focal`` is ``b1 z - |q - w|``.  ``failed`` names the
    violated ones; when ``focal`` fails the other two are not evaluated and
    carry ``-inf``.
    """

    ok: bool
    failed: Tuple[str, ...] = ()
    margins: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok


def horizontal_offset(wp: Waypoint3D, gt: GroundTarget) -> float:
    return math.hypot(wp.q[0] - gt.w[0], wp.q[1] - gt.w[1])


def _require_pose(cam: CameraIntrinsics, wp: Waypoint3D, gt: GroundTarget) -> float:
    if not wp.z > 0:
        raise ModelDomainError(f"altitude must be positive, got z={wp.z!r}")
    ell = horizontal_offset(wp, gt)
    if not cam.b1 * wp.z - ell > 0:
        raise ModelDomainError(
            f"pose violates the focal constraint: b1*z - |q-w| = {cam.b1 * wp.z - ell:.6g}"
        )
    return ell


def _require_angle(cam: CameraIntrinsics, theta: float) -> None:
    if not 0 <= theta < cam.max_angle:
        raise ModelDomainError(
            f"oblique angle {theta!r} outside [0, arctan(b1)={cam.max_angle:.6g})"
        )


def slant_distance(wp: Waypoint3D, gt: GroundTarget) -> float:
    return math.sqrt(horizontal_offset(wp, gt) ** 2 + wp.z**2)


def oblique_angle(wp: Waypoint3D, gt: GroundTarget) -> float:
    if not wp.z > 0:
        raise ModelDomainError(f"oblique angle needs z > 0, got z={wp.z!r}")
    return math.atan2(horizontal_offset(wp, gt), wp.z)


def footprint_extents_exact(cam: CameraIntrinsics, d_u: float, theta: float) -> FootprintExtents:
    """Exact trapezoid extents |EF| (depth), |AD| (near side) and |BC| (far side)."""
    _require_angle(cam, theta)
    if not d_u > cam.f0:
        raise ModelDomainError(f"slant distance {d_u!r} must exceed the focal length")
    f0, w0, l0 = cam.f0, cam.w0, cam.l0
    c, s = math.cos(theta), math.sin(theta)
    depth = (d_u - f0) * c
    ef = f0 * w0 * depth / (f0**2 * c**2 - 0.25 * w0**2 * s**2)
    bc = l0 * depth / (f0 * c - 0.5 * w0 * s)
    ad = l0 * depth / (f0 * c + 0.5 * w0 * s)
    return FootprintExtents(ef=ef, ad=ad, bc=bc)


def coverage_scale_factor(cam: CameraIntrinsics, theta: float) -> float:
    _require_angle(cam, theta)
    t = math.tan(theta)
    return 1.0 / ((1.0 - t * t / cam.b1**2) ** 2 * math.cos(theta) ** 3)


def nadir_coverage_area(cam: CameraIntrinsics, z: float) -> float:
    return 4.0 * z * z / (cam.b1 * cam.b2)


def coverage_area(cam: CameraIntrinsics, wp: Waypoint3D, gt: GroundTarget) -> float:
    _require_pose(cam, wp, gt)
    return nadir_coverage_area(cam, wp.z) * coverage_scale_factor(cam, oblique_angle(wp, gt))


def coverage_area_exact(cam: CameraIntrinsics, wp: Waypoint3D, gt: GroundTarget) -> float:
    """Trapezoid area with the ``(d_u - f0)^2`` factor kept."""
    _require_pose(cam, wp, gt)
    theta = oblique_angle(wp, gt)
    ext = footprint_extents_exact(cam, slant_distance(wp, gt), theta)
    return 0.5 * ext.ef * (ext.ad + ext.bc)


def resolution(cam: CameraIntrinsics, wp: Waypoint3D, gt: GroundTarget) -> float:
    ell = _require_pose(cam, wp, gt)
    z = wp.z
    a = gt.area_constant(cam)
    num = (z * z - ell * ell / cam.b1**2) ** 2
    return a * num / ((ell * ell + z * z) ** 1.5 * z**3)


def inner_distances(cam: CameraIntrinsics, wp: Waypoint3D, gt: GroundTarget) -> InnerDistances:
    ell = _require_pose(cam, wp, gt)
    z = wp.z
    rho2 = z * z + ell * ell
    d1 = rho2 / (cam.b1 * z + ell)
    d2 = rho2 / math.sqrt(cam.b2**2 * z * z + (1.0 + cam.b2**2) * ell * ell)
    return InnerDistances(d1=d1, d2=d2)


def inner_distances_exact(cam: CameraIntrinsics, wp: Waypoint3D, gt: GroundTarget) -> InnerDistances:
    """Inner distances from the exact trapezoid via similar triangles."""
    _require_pose(cam, wp, gt)
    ext = footprint_extents_exact(cam, slant_distance(wp, gt), oblique_angle(wp, gt))
    ad, bc, ef = ext.ad, ext.bc, ext.ef
    d1 = ad * ef / (ad + bc)
    ab = math.sqrt((bc - ad) ** 2 / 4.0 + ef**2)
    d2 = ad * bc * ef / ((ad + bc) * ab)
    return InnerDistances(d1=d1, d2=d2)


def nadir_interval(cam: CameraIntrinsics, gt: GroundTarget) -> Tuple[float, float]:
    """Altitude range ``[z_lo, z_hi]`` that is feasible directly above the target.

    The interval is empty when ``z_lo > z_hi``.
    """
    z_lo = gt.r * max(cam.b1, cam.b2)
    z_hi = math.sqrt(gt.area_constant(cam) / gt.i_min)
    return z_lo, z_hi


def constraint_margins(cam: CameraIntrinsics, wp: Waypoint3D, gt: GroundTarget) -> dict:
    """Signed slack of the resolution, full-projection and focal constraints."""
    ell = horizontal_offset(wp, gt)
    focal = cam.b1 * wp.z - ell
    if not (wp.z > 0 and focal > 0):
        return {"resolution": -math.inf, "full_projection": -math.inf, "focal": focal}
    d = inner_distances(cam, wp, gt)
    return {
        "resolution": resolution(cam, wp, gt) - gt.i_min,
        "full_projection": min(d.d1, d.d2) - gt.r,
        "focal": focal,
    }


def neighbourhood_contains(
    cam: CameraIntrinsics, wp: Waypoint3D, gt: GroundTarget, tol: float = DEFAULT_MODEL_TOL
) -> NeighbourhoodCheck:
    margins = constraint_margins(cam, wp, gt)
    failed = tuple(name for name in ("resolution", "full_projection", "focal") if margins[name] < -tol)
    return NeighbourhoodCheck(ok=not failed, failed=failed, margins=margins)


class ScenarioInfeasibleError(ValueError):
    """Some target admits no feasible image-taking pose under the checked rule."""

    def __init__(self, message: str, target_index: int | None = None):
        super().__init__(message)
        self.target_index = target_index


@dataclass(frozen=True)
class Scenario:
    camera: CameraIntrinsics
    targets: Tuple[GroundTarget, ...]
    start: Waypoint3D
    end: Waypoint3D

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(self.targets))
        if not self.targets:
            raise ValueError("a scenario needs at least one target")
        if self.start.z < 0 or self.end.z < 0:
            raise ValueError("trajectory endpoints must not lie below ground")

    @property
    def endpoints(self):
        return self.start.as_tuple(), self.end.as_tuple()

    def check_nadir_feasible(self) -> None:
        """Raise :class:`ScenarioInfeasibleError` for the first target with an empty
        nadir altitude interval.

        Only poses directly above a target are examined; a target feasible solely
        from oblique poses is reported as infeasible too.
        """
        for k, gt in enumerate(self.targets):
            z_lo, z_hi = nadir_interval(self.camera, gt)
            if z_lo > z_hi:
                raise ScenarioInfeasibleError(
                    f"target {k + 1} at {gt.w}: no feasible altitude above it "
                    f"(needs z >= {z_lo:.4g} m for full projection but z <= {z_hi:.4g} m "
                    f"for resolution {gt.i_min}); oblique-only feasibility is not checked",
                    target_index=k,
                )
