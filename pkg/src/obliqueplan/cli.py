"""Command-line entry point: ``obliqueplan gen|plan|eval|bench|plot``.

Exit codes: 0 success, 1 infeasible scenario or result, 2 I/O or parse
error, 3 solver failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .config import SolverConfig
from .model import ScenarioInfeasibleError
from .planner import DEFAULT_ALTITUDE, PlanResult, Scheme, SolverError, evaluate, plan, plan_op_2d, plan_vp_2d
from .scenario_io import (
    ScenarioFormatError,
    check_consistent,
    dumps,
    generate,
    read_result,
    read_scenario,
    result_to_dict,
    scenario_to_dict,
    write_result,
)

EXIT_OK, EXIT_INFEASIBLE, EXIT_IO, EXIT_SOLVER = 0, 1, 2, 3
SCHEMES = ("vp2d", "op2d", "op3d")
BENCH_COLUMNS = ("seed", "scheme", "distance_m", "iterations", "wall_ms")
DISTANCE_TOL = 1e-9

log = logging.getLogger("obliqueplan")


def _load_config(path) -> SolverConfig:
    if path is None:
        return SolverConfig()
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ScenarioFormatError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise ScenarioFormatError(f"{path}: invalid JSON ({exc})") from exc
    try:
        return SolverConfig.from_mapping(doc)
    except (TypeError, ValueError) as exc:
        raise ScenarioFormatError(f"{path}: {exc}") from exc


def _write_text(path, text: str) -> None:
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise ScenarioFormatError(f"cannot write {path}: {exc.strerror or exc}") from exc


def run_scheme(scn, scheme: str, altitude: float, cfg: SolverConfig, init: str = "chained") -> PlanResult:
    """Plan with one scheme.  ``init="chained"`` starts OP2D from VP2D and OP3D
    from OP2D; ``"nadir"`` starts OP3D from the mid-interval nadir waypoints."""
    if scheme == "vp2d":
        return plan_vp_2d(scn, altitude, cfg)
    if scheme == "op2d":
        return plan_op_2d(scn, altitude, cfg)
    if init == "nadir":
        return plan(scn, cfg)
    return plan(scn, cfg, init=plan_op_2d(scn, altitude, cfg))


def cmd_gen(args) -> int:
    scn = generate(args.seed, k=args.k, area_m=args.area, r_m=args.radius, i_min_range=(args.imin_lo, args.imin_hi))
    _write_text(args.out, dumps(scenario_to_dict(scn)))
    return EXIT_OK


def cmd_plan(args) -> int:
    scn = read_scenario(args.scenario)
    cfg = _load_config(args.config)
    if args.scheme == "op3d" and args.init == "nadir":
        scn.check_nadir_feasible()
    result = run_scheme(scn, args.scheme, args.altitude, cfg, args.init)
    if args.out is None:
        sys.stdout.write(dumps(result_to_dict(result)))
    else:
        try:
            write_result(result, args.out)
        except OSError as exc:
            raise ScenarioFormatError(f"cannot write {args.out}: {exc.strerror or exc}") from exc
    print(f"{result.scheme.value}: {result.distance:.6f} m in {result.iterations} trace steps", file=sys.stderr)
    return EXIT_OK


def cmd_eval(args) -> int:
    scn = read_scenario(args.scenario)
    result = read_result(args.result)
    check_consistent(scn, result)
    report = evaluate(scn, result)
    tol = args.tol
    print(f"scheme {result.scheme.value}, {len(scn.targets)} targets")
    print(f"distance recomputed {report.distance:.9f} m, stored {result.distance:.9f} m")
    for t in report.targets:
        m, e = t.margins, t.exact_margins
        print(
            f"  target {t.index + 1:3d}: resolution {m['resolution']:+.3e}  projection {m['full_projection']:+.3e}  "
            f"focal {m['focal']:+.3e}   exact: {e['resolution']:+.3e} {e['full_projection']:+.3e}"
        )
    print(f"max violation {report.max_violation:.3e}")
    ok = True
    if abs(report.distance - result.distance) > DISTANCE_TOL * max(1.0, result.distance):
        print("error: stored distance does not match the waypoints and order", file=sys.stderr)
        ok = False
    for k, name in report.violated(tol):
        print(f"error: target {k + 1} violates its {name} constraint", file=sys.stderr)
        ok = False
    return EXIT_OK if ok else EXIT_INFEASIBLE


def _bench_one(job):
    seed, k, schemes, altitude, cfg, timing = job
    scn = generate(seed, k=k)
    rows = []
    prev = None
    # later schemes start from the earlier ones, so run the chain up to the last requested
    for scheme in SCHEMES:
        t0 = time.perf_counter()
        if scheme == "vp2d":
            res = plan_vp_2d(scn, altitude, cfg)
        elif scheme == "op2d":
            res = plan_op_2d(scn, altitude, cfg, init=prev)
        else:
            res = plan(scn, cfg, init=prev)
        wall = (time.perf_counter() - t0) * 1e3
        prev = res
        if scheme in schemes:
            rows.append((seed, scheme, f"{res.distance:.12g}", res.iterations, f"{wall:.1f}" if timing else ""))
        if scheme == schemes[-1]:
            break
    return rows


def cmd_bench(args) -> int:
    schemes = sorted(set(args.schemes), key=SCHEMES.index)
    cfg = _load_config(args.config)
    jobs = [(args.seed_base + i, args.k, tuple(schemes), args.altitude, cfg, args.timing) for i in range(args.seeds)]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_bench_one, jobs))
    else:
        results = [_bench_one(j) for j in jobs]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BENCH_COLUMNS)
    for rows in sorted(results, key=lambda rs: rs[0][0]):
        w.writerows(rows)
    _write_text(args.out_csv, buf.getvalue())
    return EXIT_OK


def cmd_plot(args) -> int:
    from .plotting import plot

    scn = read_scenario(args.scenario)
    result = read_result(args.result)
    csv_path = plot(scn, result, args.out)
    print(f"wrote {args.out} and {csv_path}", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="obliqueplan", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="log solver progress")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a random scenario")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--k", type=int, default=30, help="number of targets")
    g.add_argument("--area", type=float, default=300.0, help="side of the square area (m)")
    g.add_argument("--radius", type=float, default=20.0, help="target radius (m)")
    g.add_argument("--imin-lo", type=float, default=0.01)
    g.add_argument("--imin-hi", type=float, default=0.4)
    g.add_argument("--out", default=None, help="output file (default stdout)")
    g.set_defaults(func=cmd_gen)

    pl = sub.add_parser("plan", help="plan a route for a scenario")
    pl.add_argument("--scenario", required=True)
    pl.add_argument("--scheme", choices=SCHEMES, default="op3d")
    pl.add_argument("--altitude", type=float, default=DEFAULT_ALTITUDE, help="fixed altitude for 2D schemes and chaining")
    pl.add_argument("--init", choices=("chained", "nadir"), default="chained",
                    help="op3d start: the op2d plan (chained) or mid-interval nadir waypoints")
    pl.add_argument("--config", default=None, help="JSON file with solver settings")
    pl.add_argument("--out", default=None, help="result file (default stdout)")
    pl.set_defaults(func=cmd_plan)

    e = sub.add_parser("eval", help="check a result against its scenario")
    e.add_argument("--scenario", required=True)
    e.add_argument("--result", required=True)
    e.add_argument("--tol", type=float, default=1e-6, help="allowed constraint violation")
    e.set_defaults(func=cmd_eval)

    b = sub.add_parser("bench", help="compare schemes on generated scenarios")
    b.add_argument("--seeds", type=int, default=20, help="number of scenarios")
    b.add_argument("--seed-base", type=int, default=0)
    b.add_argument("--k", type=int, default=10)
    b.add_argument("--schemes", nargs="+", choices=SCHEMES, default=list(SCHEMES))
    b.add_argument("--altitude", type=float, default=DEFAULT_ALTITUDE)
    b.add_argument("--config", default=None)
    b.add_argument("--jobs", type=int, default=1, help="worker processes")
    b.add_argument("--timing", action="store_true", help="fill the wall_ms column (makes output run-dependent)")
    b.add_argument("--out-csv", default=None, help="CSV file (default stdout)")
    b.set_defaults(func=cmd_bench)

    pt = sub.add_parser("plot", help="draw a result as SVG plus a trace CSV")
    pt.add_argument("--scenario", required=True)
    pt.add_argument("--result", required=True)
    pt.add_argument("--out", required=True, help="SVG file; the CSV goes next to it")
    pt.set_defaults(func=cmd_plot)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ScenarioInfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ScenarioFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
