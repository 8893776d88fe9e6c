"""Scenario generation and the JSON scenario/result file formats.

Files are plain JSON with a ``schema_version`` field; unknown fields are
rejected.  Floats are written with 12 significant digits.  Generated
scenarios are quantized to that precision up front, so they survive a
write/read cycle unchanged.  Target indices in files are 1-based.
"""
from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Dict, Tuple

import numpy as np

from .model import CameraIntrinsics, GroundTarget, Scenario, ScenarioInfeasibleError, Waypoint3D
from .planner import FeasibilityReport, PlanResult, Scheme, TargetReport
from .routing import Tour
from .waypoints import IterationTrace, TraceRecord

SCHEMA_VERSION = 1
SIG_DIGITS = 12
DEFAULT_CAMERA = CameraIntrinsics(f0=0.035, w0=0.0156, l0=0.0235)
MARGIN_NAMES = ("resolution", "full_projection", "focal")


class ScenarioFormatError(ValueError):
    """A scenario or result document is malformed or inconsistent."""


def quantize(x: float) -> float:
    """Round to the precision used in files."""
    x = float(x)
    if not math.isfinite(x):
        return x
    return float(f"{x:.{SIG_DIGITS}g}")


def generate(
    seed: int,
    k: int = 30,
    area_m: float = 300.0,
    r_m: float = 20.0,
    i_min_range: Tuple[float, float] = (0.01, 0.4),
    camera: CameraIntrinsics = DEFAULT_CAMERA,
) -> Scenario:
    """Random targets, uniform in ``[0, area_m]^2``, start and end at the origin."""
    lo, hi = i_min_range
    if k < 1:
        raise ValueError(f"need at least one target, got k={k}")
    if area_m < 0 or not r_m > 0:
        raise ValueError("area must be non-negative and radius positive")
    if not 0 < lo <= hi < 1:
        raise ValueError(f"i_min range must satisfy 0 < lo <= hi < 1, got ({lo}, {hi})")
    rng = np.random.default_rng(seed)
    xy = rng.uniform(0.0, area_m, size=(k, 2))
    i_min = rng.uniform(lo, hi, size=k)
    targets = tuple(
        GroundTarget((quantize(p[0]), quantize(p[1])), quantize(r_m), quantize(i))
        for p, i in zip(xy, i_min)
    )
    origin = Waypoint3D((0.0, 0.0), 0.0)
    scn = Scenario(camera, targets, origin, origin)
    scn.check_nadir_feasible()
    return scn


def _fmt(x: float) -> Any:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return quantize(x)


def _num(obj: dict, key: str, where: str) -> float:
    try:
        v = obj[key]
    except KeyError:
        raise ScenarioFormatError(f"{where}: missing field {key!r}") from None
    if isinstance(v, str) and v in ("inf", "-inf", "nan"):
        return float(v)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ScenarioFormatError(f"{where}.{key}: expected a number, got {v!r}")
    return float(v)


def _check_fields(obj: Any, allowed, where: str) -> dict:
    if not isinstance(obj, dict):
        raise ScenarioFormatError(f"{where}: expected an object, got {type(obj).__name__}")
    extra = set(obj) - set(allowed)
    if extra:
        raise ScenarioFormatError(f"{where}: unknown field(s) {sorted(extra)}")
    missing = set(allowed) - set(obj)
    if missing:
        raise ScenarioFormatError(f"{where}: missing field(s) {sorted(missing)}")
    return obj


def _check_version(doc: dict, where: str) -> None:
    v = doc.get("schema_version")
    if v != SCHEMA_VERSION:
        raise ScenarioFormatError(f"{where}: unsupported schema_version {v!r} (expected {SCHEMA_VERSION})")


def _point(p: Waypoint3D) -> Dict[str, Any]:
    return {"x_m": _fmt(p.q[0]), "y_m": _fmt(p.q[1]), "z_m": _fmt(p.z)}


def _parse_point(obj, where: str) -> Waypoint3D:
    _check_fields(obj, ("x_m", "y_m", "z_m"), where)
    return Waypoint3D((_num(obj, "x_m", where), _num(obj, "y_m", where)), _num(obj, "z_m", where))


def scenario_to_dict(scn: Scenario) -> Dict[str, Any]:
    cam = scn.camera
    return {
        "schema_version": SCHEMA_VERSION,
        "camera": {"f0_m": _fmt(cam.f0), "w0_m": _fmt(cam.w0), "l0_m": _fmt(cam.l0)},
        "targets": [
            {"x_m": _fmt(gt.w[0]), "y_m": _fmt(gt.w[1]), "r_m": _fmt(gt.r), "i_min": _fmt(gt.i_min)}
            for gt in scn.targets
        ],
        "start": _point(scn.start),
        "end": _point(scn.end),
    }


def scenario_from_dict(doc: Any) -> Scenario:
    _check_fields(doc, ("schema_version", "camera", "targets", "start", "end"), "scenario")
    _check_version(doc, "scenario")
    c = _check_fields(doc["camera"], ("f0_m", "w0_m", "l0_m"), "camera")
    if not isinstance(doc["targets"], list) or not doc["targets"]:
        raise ScenarioFormatError("targets: expected a non-empty list")
    try:
        camera = CameraIntrinsics(_num(c, "f0_m", "camera"), _num(c, "w0_m", "camera"), _num(c, "l0_m", "camera"))
        targets = []
        for i, t in enumerate(doc["targets"], start=1):
            where = f"targets[{i}]"
            _check_fields(t, ("x_m", "y_m", "r_m", "i_min"), where)
            targets.append(GroundTarget((_num(t, "x_m", where), _num(t, "y_m", where)),
                                        _num(t, "r_m", where), _num(t, "i_min", where)))
        return Scenario(camera, tuple(targets), _parse_point(doc["start"], "start"), _parse_point(doc["end"], "end"))
    except ScenarioFormatError:
        raise
    except ValueError as exc:
        raise ScenarioFormatError(f"invalid scenario: {exc}") from exc


def _margins(m: dict) -> Dict[str, Any]:
    return {name: _fmt(m[name]) for name in MARGIN_NAMES}


def result_to_dict(result: PlanResult) -> Dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "scheme": result.scheme.value,
        "order": [k + 1 for k in result.tour.order],
        "waypoints": [_point(wp) for wp in result.waypoints],
        "distance_m": _fmt(result.distance),
        "converged": bool(result.trace.converged),
        "trace": [
            {"iter": r.iter, "block": r.block, "objective_m": _fmt(r.objective), "max_violation": _fmt(r.max_violation)}
            for r in result.trace.records
        ],
        "feasibility": [
            {"target": t.index + 1, "margins": _margins(t.margins), "exact_margins": _margins(t.exact_margins)}
            for t in result.feasibility_report.targets
        ],
    }


def result_from_dict(doc: Any) -> PlanResult:
    keys = ("schema_version", "scheme", "order", "waypoints", "distance_m", "converged", "trace", "feasibility")
    _check_fields(doc, keys, "result")
    _check_version(doc, "result")
    try:
        scheme = Scheme(doc["scheme"])
    except ValueError:
        raise ScenarioFormatError(f"result.scheme: unknown scheme {doc['scheme']!r}") from None
    for key in ("order", "waypoints", "trace", "feasibility"):
        if not isinstance(doc[key], list):
            raise ScenarioFormatError(f"result.{key}: expected a list")
    K = len(doc["waypoints"])
    order = doc["order"]
    if sorted(order) != list(range(1, K + 1)) or any(isinstance(k, bool) for k in order):
        raise ScenarioFormatError(f"result.order: expected a permutation of 1..{K}, got {order!r}")
    if not isinstance(doc["converged"], bool):
        raise ScenarioFormatError("result.converged: expected true or false")
    waypoints = tuple(_parse_point(p, f"waypoints[{i}]") for i, p in enumerate(doc["waypoints"], start=1))
    distance = _num(doc, "distance_m", "result")

    trace = IterationTrace(converged=doc["converged"])
    for i, r in enumerate(doc["trace"]):
        where = f"trace[{i}]"
        _check_fields(r, ("iter", "block", "objective_m", "max_violation"), where)
        if r["iter"] != i or r["block"] not in ("Z", "Q", "ORDER"):
            raise ScenarioFormatError(f"{where}: bad iteration number or block {r['block']!r}")
        trace.records.append(TraceRecord(i, r["block"], _num(r, "objective_m", where), _num(r, "max_violation", where)))

    reports = []
    if len(doc["feasibility"]) != K:
        raise ScenarioFormatError(f"result.feasibility: expected {K} entries")
    for i, f in enumerate(doc["feasibility"], start=1):
        where = f"feasibility[{i}]"
        _check_fields(f, ("target", "margins", "exact_margins"), where)
        if f["target"] != i:
            raise ScenarioFormatError(f"{where}: target index {f['target']!r} out of sequence")
        parsed = []
        for key in ("margins", "exact_margins"):
            _check_fields(f[key], MARGIN_NAMES, f"{where}.{key}")
            parsed.append({n: _num(f[key], n, f"{where}.{key}") for n in MARGIN_NAMES})
        reports.append(TargetReport(i - 1, parsed[0], parsed[1]))

    tour = Tour(tuple(k - 1 for k in order), distance)
    return PlanResult(scheme, tour, waypoints, distance, trace, FeasibilityReport(tuple(reports), distance))


def dumps(doc: Dict[str, Any]) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _read_json(path) -> Any:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ScenarioFormatError(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioFormatError(f"{path}: invalid JSON ({exc})") from exc


def write_scenario(scn: Scenario, path) -> None:
    Path(path).write_text(dumps(scenario_to_dict(scn)))


def read_scenario(path) -> Scenario:
    return scenario_from_dict(_read_json(path))


def write_result(result: PlanResult, path) -> None:
    Path(path).write_text(dumps(result_to_dict(result)))


def read_result(path) -> PlanResult:
    return result_from_dict(_read_json(path))


def check_consistent(scn: Scenario, result: PlanResult) -> None:
    """Raise :class:`ScenarioFormatError` if ``result`` cannot belong to ``scn``."""
    if len(result.waypoints) != len(scn.targets):
        raise ScenarioFormatError(
            f"result has {len(result.waypoints)} waypoints but the scenario has {len(scn.targets)} targets"
        )


__all__ = [
    "SCHEMA_VERSION", "ScenarioFormatError", "ScenarioInfeasibleError", "generate", "quantize",
    "scenario_to_dict", "scenario_from_dict", "result_to_dict", "result_from_dict", "dumps",
    "read_scenario", "write_scenario", "read_result", "write_result", "check_consistent",
]
