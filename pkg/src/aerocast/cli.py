"""``aerocast`` command line: plan, simulate, overlap-graph, validate.

Exit codes: 0 ok, 2 parse/validation error, 3 planning failure,
4 simulation failure, 5 unknown drone.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

from .errors import AerocastError, InvalidRequest, InvalidScenario, PlanningFailure
from .overlap import build_overlap_graph, to_dot
from .scenario_file import ParseError, load
from .simulator import Policy, build_tree, plan_mobile, run, sweep_rates

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_PLANNING = 3
EXIT_SIMULATION = 4
EXIT_UNKNOWN_DRONE = 5

CSV_COLUMNS = (
    "scenario_id", "policy", "traffic_rate_bps", "amd_s", "amt_bps",
    "mobile_delivery_ratio", "mobile_extra_distance_m",
)

log = logging.getLogger("aerocast")


class _Exit(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _setup_logging():
    level = os.environ.get("AEROCAST_LOG", "WARNING").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def _load(path, args=None):
    try:
        sc = load(path)
    except ParseError as exc:
        raise _Exit(EXIT_INVALID, f"parse error: {exc}")
    if args is not None:
        if getattr(args, "seed", None) is not None:
            sc = replace(sc, seed=args.seed)
        if getattr(args, "timestep", None) is not None:
            sc = replace(sc, timestep=args.timestep)
    return sc


def _emit(text: str, out_path):
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fmt(v: float) -> str:
    return "nan" if math.isnan(v) else f"{v:.9g}"


def format_trajectory(mobile, traj) -> str:
    lines = [f"# mobile {mobile} method {traj.method}"
             + (" (fallback)" if traj.fallback else "")
             + f" path {','.join(map(str, traj.path))}",
             "waypoints:"]
    lines += [f"{p.x:.6f},{p.y:.6f},{p.z:.6f}" for p in traj.waypoints]
    lines.append("legs:")
    lines += [f"{i}: {' '.join(map(str, leg))}" for i, leg in enumerate(traj.legs)]
    lines.append(f"total_length: {traj.total_length:.6f}")
    lines.append(f"extra_distance: {traj.extra_distance:.6f}")
    return "\n".join(lines) + "\n"


def trajectory_json(mobile, traj) -> str:
    doc = {
        "mobile": mobile,
        "method": traj.method,
        "fallback": traj.fallback,
        "path": list(traj.path),
        "waypoints": [list(p) for p in traj.waypoints],
        "legs": [list(leg) for leg in traj.legs],
        "total_length": traj.total_length,
        "extra_distance": traj.extra_distance,
    }
    return json.dumps(doc, indent=2) + "\n"


def cmd_plan(args) -> int:
    sc = _load(args.scenario, args)
    mobiles = {m.drone: m for m in sc.mobiles}
    if args.mobile not in mobiles:
        raise _Exit(EXIT_UNKNOWN_DRONE, f"unknown mobile drone {args.mobile}")
    try:
        sc.check()
        tree, nodes = build_tree(sc)
    except InvalidScenario as exc:
        raise _Exit(EXIT_INVALID, f"invalid scenario: {exc}")
    try:
        traj = plan_mobile(sc, mobiles[args.mobile], tree, nodes)
    except (PlanningFailure, InvalidRequest) as exc:
        raise _Exit(EXIT_PLANNING, f"planning failed: {exc}")
    fmt = format_trajectory if args.format == "text" else trajectory_json
    _emit(fmt(args.mobile, traj), args.out)
    return EXIT_OK


def _sim_row(sc):
    try:
        m = run(sc)
    except PlanningFailure as exc:
        log.warning("%s %s @ %s: %s", sc.scenario_id, sc.policy.value, sc.traffic_rate, exc)
        return None
    return m.amd, m.amt, m.mobile_delivery_ratio, m.mobile_extra_distance


def cmd_simulate(args) -> int:
    sc = _load(args.scenario, args)
    policies = [Policy(p) for p in args.policy] if args.policy else [sc.policy]
    if args.rate_sweep:
        try:
            lo, hi, step = (float(x) for x in args.rate_sweep.split(":"))
            rates = sweep_rates(lo, hi, step)
        except ValueError:
            raise _Exit(EXIT_INVALID, f"bad --rate-sweep {args.rate_sweep!r}, want lo:hi:step with lo<=hi, step>0")
    else:
        rates = [sc.traffic_rate]
    jobs = [replace(sc, policy=p, traffic_rate=r) for p in policies for r in rates]
    for job in jobs:
        probs = job.problems()
        if probs:
            raise _Exit(EXIT_INVALID, f"invalid scenario: {'; '.join(probs)}")
    try:
        if args.jobs > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                rows = list(pool.map(_sim_row, jobs))
        else:
            rows = [_sim_row(j) for j in jobs]
    except InvalidScenario as exc:
        raise _Exit(EXIT_INVALID, f"invalid scenario: {exc}")
    except AerocastError as exc:
        raise _Exit(EXIT_SIMULATION, f"simulation failed: {exc}")

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    failed = False
    for job, row in zip(jobs, rows):
        head = [job.scenario_id, job.policy.value, _fmt(job.traffic_rate)]
        if row is None:
            failed = True
            writer.writerow(head + ["FAILED"] * 4)
        else:
            writer.writerow(head + [_fmt(v) for v in row])
    _emit(buf.getvalue(), args.out)
    return EXIT_PLANNING if failed else EXIT_OK


def cmd_overlap_graph(args) -> int:
    sc = _load(args.scenario)
    try:
        sc.check()
        tree, nodes = build_tree(sc)
    except InvalidScenario as exc:
        raise _Exit(EXIT_INVALID, f"invalid scenario: {exc}")
    graph = build_overlap_graph(tree, nodes, sc.radius)
    _emit(to_dot(graph), args.out)
    return EXIT_OK


def validate_scenario(sc) -> list[tuple[str, bool, str]]:
    """(check, passed, detail) triples for invariants, connectivity, plannability."""
    results = []
    probs = sc.problems()
    results.append(("invariants", not probs, "; ".join(probs)))
    if probs:
        return results
    try:
        tree, nodes = build_tree(sc)
    except InvalidScenario as exc:
        results.append(("connectivity", False, str(exc)))
        return results
    results.append(("connectivity", True, f"{len(tree.forwarders)} forwarders"))
    for m in sc.mobiles:
        try:
            traj = plan_mobile(sc, m, tree, nodes)
            results.append((f"plan mobile {m.drone}", True, f"{len(traj.waypoints)} waypoints"))
        except (PlanningFailure, InvalidRequest) as exc:
            results.append((f"plan mobile {m.drone}", False, str(exc)))
    return results


def cmd_validate(args) -> int:
    try:
        sc = load(args.scenario)
    except ParseError as exc:
        _emit(f"FAIL parse: {exc}\n", args.out)
        return EXIT_INVALID
    lines = ["PASS parse"]
    ok = True
    for name, passed, detail in validate_scenario(sc):
        ok &= passed
        lines.append(f"{'PASS' if passed else 'FAIL'} {name}" + (f": {detail}" if detail else ""))
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if ok else EXIT_INVALID


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="aerocast", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("plan", help="plan a mobile drone's transition trajectory")
    sp.add_argument("scenario")
    sp.add_argument("--mobile", type=int, required=True)
    sp.add_argument("--format", choices=("text", "json"), default="text")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--timestep", type=float)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_plan)

    sp = sub.add_parser("simulate", help="run simulations, CSV on stdout")
    sp.add_argument("scenario")
    sp.add_argument("--policy", action="append", choices=[x.value for x in Policy],
                    help="repeatable; defaults to the scenario's policy")
    sp.add_argument("--rate-sweep", metavar="LO:HI:STEP")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--timestep", type=float)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("overlap-graph", help="export the overlap graph as DOT")
    sp.add_argument("scenario")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_overlap_graph)

    sp = sub.add_parser("validate", help="check a scenario file")
    sp.add_argument("scenario")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _Exit as exc:
        print(f"aerocast: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
