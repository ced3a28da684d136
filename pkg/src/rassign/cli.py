"""Command-line interface.

Exit codes: 0 success, 1 internal invariant violation, 2 stuck (certified
infeasible target), 3 validation failure, 4 enumeration guard exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from .config_lp import DEFAULT_LIMIT, lp_feasible, opt_star_result
from .dual_witness import certify
from .errors import GuardExceeded, InvariantViolation, IterationCapExceeded
from .estimate import estimate
from .instance import (
    InstanceError,
    format_rational,
    generate_random,
    parse_instance,
    parse_rational,
    serialize_instance,
    size_grid,
)
from .local_search import CAPACITY, run
from .oracle import brute_force_opt

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_STUCK = 2
EXIT_INVALID = 3
EXIT_GUARD = 4

BENCH_COLUMNS = [
    "instance_path",
    "machines",
    "jobs",
    "opt_star",
    "opt_integral",
    "ls_makespan",
    "ratio",
    "iterations",
    "blockers_added",
]


def _rational(text):
    try:
        return parse_rational(text)
    except InstanceError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _sizes(text):
    return [_rational(s) for s in text.split(",") if s.strip()]


def _emit(obj, out):
    out.write(json.dumps(obj) + "\n")


def _load(path):
    return parse_instance(Path(path).read_text())


def cmd_gen(args, out):
    sizes = args.sizes or size_grid(6)
    inst = generate_random(args.machines, args.jobs, sizes, args.density, args.seed)
    out.write(serialize_instance(inst) + "\n")
    return EXIT_OK


def cmd_lp(args, out):
    inst = _load(args.input)
    if args.T is not None:
        res = lp_feasible(inst, args.T, args.limit)
        _emit(res.to_dict(inst), out)
    else:
        res = opt_star_result(inst, args.limit)
        doc = res.to_dict(inst)
        doc["opt_star"] = format_rational(res.T)
        _emit(doc, out)
    return EXIT_OK


def cmd_schedule(args, out):
    inst = _load(args.input)
    trace_file = open(args.trace, "w") if args.trace else None
    try:
        trace = (lambda ev: trace_file.write(json.dumps(ev) + "\n")) if trace_file else None
        result = run(inst, args.T, args.order, debug=args.debug_invariants, trace=trace)
    finally:
        if trace_file:
            trace_file.close()
    if result.completed:
        _emit(result.to_dict(), out)
        return EXIT_OK
    cert = certify(result.stuck, args.T)
    _emit(cert.to_dict(), out)
    if not cert.ok:
        print("error: stuck state failed certification", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_STUCK


def cmd_estimate(args, out):
    inst = _load(args.input)
    _emit(estimate(inst, args.order, debug=args.debug_invariants).to_dict(), out)
    return EXIT_OK


def verify_schedule(inst, doc, exact=False):
    """Recompute loads of a schedule document; returns a report dict with ``ok``."""
    violations = []
    assignment = doc.get("assignment")
    if not isinstance(assignment, list) or len(assignment) != inst.n:
        return {"ok": False, "violations": [{"error": "assignment must list one machine per job"}]}
    canon = inst.canonical_index()
    loads = [Fraction(0)] * inst.machine_count
    for pos, i in enumerate(assignment):
        job = inst.jobs[canon[pos]]
        if not isinstance(i, int) or isinstance(i, bool) or i not in job.allowed:
            violations.append({"job": pos, "machine": i, "error": "machine not allowed for job"})
            continue
        loads[i] += job.p
    makespan = max(loads)
    report = {"makespan": format_rational(makespan)}
    try:
        stated = parse_rational(doc.get("makespan", ""))
    except InstanceError:
        stated = None
    if stated != makespan:
        violations.append({"error": f"makespan field {doc.get('makespan')!r} does not match"})
    if "T" in doc and "ratio_bound" in doc:
        try:
            bound = parse_rational(doc["ratio_bound"]) * parse_rational(doc["T"])
        except InstanceError:
            bound = None
        if bound is None or makespan > bound:
            violations.append({"error": "makespan exceeds ratio_bound * T"})
    if exact and not violations:
        opt = brute_force_opt(inst).opt
        report["opt"] = format_rational(opt)
        report["ratio_to_opt"] = format_rational(makespan / opt)
        if makespan < opt:
            violations.append({"error": "makespan below the exact optimum"})
    report["ok"] = not violations
    report["violations"] = violations
    return report


def cmd_verify(args, out):
    inst = _load(args.input)
    try:
        doc = json.loads(Path(args.schedule).read_text())
    except json.JSONDecodeError as exc:
        _emit({"ok": False, "violations": [{"error": f"malformed schedule: {exc}"}]}, out)
        return EXIT_INVALID
    report = verify_schedule(inst, doc, args.exact)
    _emit(report, out)
    return EXIT_OK if report["ok"] else EXIT_INVALID


def bench_row(path, order="desc", limit=DEFAULT_LIMIT):
    inst = _load(path)
    row = dict.fromkeys(BENCH_COLUMNS, "")
    row.update(instance_path=str(path), machines=inst.machine_count, jobs=inst.n)
    try:
        o = opt_star_result(inst, limit).T
    except GuardExceeded:
        return row
    row["opt_star"] = format_rational(o)
    try:
        row["opt_integral"] = format_rational(brute_force_opt(inst).opt)
    except GuardExceeded:
        pass
    result = run(inst, o, order)
    if not result.completed:
        raise InvariantViolation(f"{path}: local search got stuck at the LP optimum")
    row["ls_makespan"] = format_rational(result.makespan)
    row["ratio"] = format_rational(result.makespan / o)
    row["iterations"] = result.stats.iterations
    row["blockers_added"] = result.stats.blockers_added
    return row


def cmd_bench(args, out):
    paths = sorted(str(p) for p in Path(args.corpus).glob("*.json"))
    if args.parallel > 1:
        with ProcessPoolExecutor(args.parallel) as pool:
            rows = list(pool.map(bench_row, paths, [args.order] * len(paths)))
    else:
        rows = [bench_row(p, args.order) for p in paths]
    rows.sort(key=lambda r: r["instance_path"])
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=BENCH_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    out.write(buf.getvalue())
    ratios = [Fraction(r["ratio"]) for r in rows if r["ratio"] != ""]
    if ratios:
        worst = max(ratios)
        print(f"max_ratio={format_rational(worst)} bound={format_rational(CAPACITY)}", file=sys.stderr)
        if worst > CAPACITY:
            return EXIT_INTERNAL
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="rassign", description="Restricted Assignment: configuration-LP and blocker-tree local search"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a random instance")
    p.add_argument("--machines", type=int, required=True)
    p.add_argument("--jobs", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--density", type=_rational, default=Fraction(1))
    p.add_argument("--sizes", type=_sizes, help="comma-separated size grid, default 1/6,...,1")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("lp", help="configuration-LP feasibility or optimum")
    p.add_argument("--input", required=True)
    p.add_argument("--T", type=_rational)
    p.add_argument("--limit", type=int, default=DEFAULT_LIMIT, help="max allowed jobs per machine")
    p.set_defaults(func=cmd_lp)

    p = sub.add_parser("schedule", help="run the local search against a target makespan")
    p.add_argument("--input", required=True)
    p.add_argument("--T", type=_rational, required=True)
    p.add_argument("--order", default="desc", help="desc, input or shuffle:SEED")
    p.add_argument("--debug-invariants", action="store_true")
    p.add_argument("--trace", help="write one JSON event per loop iteration to this file")
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("estimate", help="binary search the subset-sum grid for an estimate")
    p.add_argument("--input", required=True)
    p.add_argument("--order", default="desc")
    p.add_argument("--debug-invariants", action="store_true")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("verify", help="check a schedule file against an instance")
    p.add_argument("--input", required=True)
    p.add_argument("--schedule", required=True)
    p.add_argument("--exact", action="store_true", help="also compare with the brute-force optimum")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="run every instance in a corpus directory")
    p.add_argument("--corpus", required=True)
    p.add_argument("--parallel", type=int, default=1)
    p.add_argument("--order", default="desc")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None, out=None):
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except GuardExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (InvariantViolation, IterationCapExceeded) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        dump = getattr(exc, "dump", None)
        if dump:
            print(json.dumps(dump), file=sys.stderr)
        return EXIT_INTERNAL
    except (InstanceError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


def main_entry():
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
