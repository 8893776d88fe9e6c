"""SVG figure of a planned route plus a CSV copy of its convergence trace.

The figure has three panels: the route seen from above with the target
disks, the altitude along the flown path, and the distance per iteration with
order-update steps circled.
"""
from __future__ import annotations

import csv
import io
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .model import Scenario  # noqa: E402
from .planner import PlanResult  # noqa: E402
from .scenario_io import ScenarioFormatError, check_consistent  # noqa: E402
from .waypoints import as_array  # noqa: E402

# fixed ids and no timestamp, so identical inputs give identical files
SVG_RC = {"svg.hashsalt": "obliqueplan", "svg.fonttype": "none"}


def route_points(scn: Scenario, result: PlanResult) -> np.ndarray:
    W = as_array(result.waypoints)
    return np.vstack([scn.start.as_tuple(), W[list(result.tour.order)], scn.end.as_tuple()])


def trace_csv(result: PlanResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["iter", "block", "objective_m", "max_violation"])
    for r in result.trace.records:
        w.writerow([r.iter, r.block, f"{r.objective:.12g}", f"{r.max_violation:.12g}"])
    return buf.getvalue()


def figure(scn: Scenario, result: PlanResult):
    check_consistent(scn, result)
    pts = route_points(scn, result)
    fig, (ax_top, ax_alt, ax_conv) = plt.subplots(1, 3, figsize=(15, 4.8))

    for k, gt in enumerate(scn.targets):
        ax_top.add_patch(plt.Circle(gt.w, gt.r, color="tab:green", alpha=0.25, lw=0))
        ax_top.annotate(str(k + 1), gt.w, ha="center", va="center", fontsize=7)
    ax_top.plot(pts[:, 0], pts[:, 1], "-", color="tab:blue", lw=1.2)
    ax_top.plot(pts[1:-1, 0], pts[1:-1, 1], "o", color="tab:blue", ms=4)
    ax_top.plot(*pts[0, :2], "ks", ms=6)
    ax_top.set_aspect("equal", adjustable="datalim")
    ax_top.set_xlabel("x (m)")
    ax_top.set_ylabel("y (m)")
    ax_top.set_title(f"{result.scheme.value} route, {result.distance:.1f} m")

    progress = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(pts, axis=0), axis=1))])
    ax_alt.plot(progress, pts[:, 2], "-", color="tab:blue", lw=1.2)
    ax_alt.plot(progress[1:-1], pts[1:-1, 2], "o", color="tab:blue", ms=4)
    ax_alt.set_xlabel("distance flown (m)")
    ax_alt.set_ylabel("altitude (m)")
    ax_alt.set_title("altitude profile")

    recs = result.trace.records
    if recs:
        it = np.array([r.iter for r in recs])
        obj = np.array([r.objective for r in recs])
        ax_conv.plot(it, obj, "-", color="tab:blue", lw=1.2)
        ax_conv.plot(it, obj, ".", color="tab:blue", ms=5)
        is_order = np.array([r.block == "ORDER" for r in recs])
        ax_conv.plot(it[is_order], obj[is_order], "o", mfc="none", mec="tab:red", ms=9, label="order update")
        ax_conv.legend(loc="upper right", fontsize=8)
    else:
        ax_conv.plot([0], [result.distance], "o", color="tab:blue", ms=5)
    ax_conv.set_xlabel("iteration")
    ax_conv.set_ylabel("route length (m)")
    ax_conv.set_title("convergence")
    fig.tight_layout()
    return fig


def plot(scn: Scenario, result: PlanResult, out) -> Path:
    """Write ``out`` (SVG) and the trace CSV next to it; returns the CSV path."""
    out = Path(out)
    csv_path = out.with_suffix(".csv")
    with plt.rc_context(SVG_RC):
        fig = figure(scn, result)
        try:
            fig.savefig(out, format="svg", metadata={"Date": None})
        except OSError as exc:
            raise ScenarioFormatError(f"cannot write {out}: {exc.strerror or exc}") from exc
        finally:
            plt.close(fig)
    csv_path.write_text(trace_csv(result))
    return csv_path
