"""``ccr-reduce``: scenario runner, convergence tables and the Gupta-Bleuler demo.

Exit codes: 0 when every check passes, 1 when a check fails, 2 for usage,
parse or scenario errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

from . import __version__
from . import gbmodel as G
from .errors import CCRError, InvalidArgument, UnsupportedScenario
from .report import CheckResult, fmt
from .scenario import SCHEMA_VERSION, bundled, load
from .suites import REGISTRY, SUITES, Context, jsonable, monotone, run_check

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

DEMO_CHECKS = ["net.isotony", "net.reduction_isotony", "net.covariance", "net.functoriality",
               "gb.weak_causality", "gb.two_stage", "gb.krein_positivity", "fock.spectral"]


def thread_cap() -> int:
    raw = os.environ.get("CCR_REDUCE_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise InvalidArgument(f"CCR_REDUCE_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise InvalidArgument(f"CCR_REDUCE_THREADS must be a positive integer, got {raw!r}")
    return n


def _entry(check_id: str, res: CheckResult, runtime: float) -> dict:
    chk = REGISTRY[check_id]
    return {
        "id": check_id,
        "anchor": chk.anchor,
        "suite": chk.suite,
        "status": res.status,
        "residual": float(res.residual),
        "tolerance": float(res.tolerance),
        "runtime": runtime,
        "message": res.message,
        "details": jsonable(res.details),
    }


def _run_one(check_id: str, ctx: Context, timing: bool) -> dict:
    tol = ctx.scenario.get("tolerances", {}).get(check_id)
    start = time.perf_counter()
    try:
        res = run_check(check_id, ctx, tol)
    except UnsupportedScenario:
        raise
    except CCRError as exc:
        res = CheckResult(check_id, False, float("inf"), REGISTRY[check_id].tolerance, [],
                          f"{type(exc).__name__}: {exc}")
    runtime = round(time.perf_counter() - start, 3) if timing else 0.0
    return _entry(check_id, res, runtime)


def run_checks(ctx: Context, groups: list[list[str]], timing: bool = True, threads: int = 1) -> list[dict]:
    """Run groups of checks (in parallel across groups); entries keep the given order."""

    def work(ids):
        return [_run_one(c, ctx, timing) for c in ids]

    if threads <= 1 or len(groups) <= 1:
        results = [work(g) for g in groups]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, groups))
    return [e for group in results for e in group]


def build_report(scenario: dict, entries: list[dict]) -> dict:
    passed = sum(e["status"] == "PASS" for e in entries)
    return {
        "schema_version": SCHEMA_VERSION,
        "build": {"package": "ccr_reduce", "version": __version__},
        "scenario": scenario,
        "entries": entries,
        "summary": {"total": len(entries), "passed": passed, "failed": len(entries) - passed},
    }


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def scenario_groups(scenario: dict) -> list[list[str]]:
    seen, groups = set(), []
    for suite in scenario["suites"]:
        ids = [c for c in SUITES[suite] if c not in seen]
        seen.update(ids)
        if ids:
            groups.append(ids)
    return groups


def _line(e: dict) -> str:
    return f"{e['status']} {e['id']:<26} residual={fmt(e['residual'])} tol={fmt(e['tolerance'])}  [{e['anchor']}]"


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def cmd_run(args) -> int:
    scenario = load(args.scenario)
    ctx = Context(scenario)
    entries = run_checks(ctx, scenario_groups(scenario), not args.no_timing, thread_cap())
    report = build_report(scenario, entries)
    for e in entries:
        print(_line(e))
        if e["status"] == "FAIL" and e["message"]:
            print(f"    {e['message']}")
    s = report["summary"]
    print(f"{s['passed']}/{s['total']} checks passed")
    if args.json:
        _write(args.json, dumps(report))
    return EXIT_OK if s["failed"] == 0 else EXIT_FAIL


CSV_FIELDS = ["level", "n", "spacing", "cauchy_residual", "spacelike_residual", "kernel_gap", "tolQuad"]


def convergence_rows(ctx: Context, k: int) -> list[dict]:
    """One row per quadrature level: Cauchy residual, spacelike ``B`` residual and ``K``-kernel gap."""
    if not ctx.is_grid:
        raise UnsupportedScenario("convergence studies need a momentum grid; the scenario is abstract")
    levels = ctx.quadrature_levels(k)
    probes = G.reference_probes(levels[0].window)
    boxes = ctx.boxes
    rows = []
    for i, grid in enumerate(levels):
        spacelike = 0.0
        for a, b in ctx.spacelike:
            spacelike = max(spacelike, G.spacelike_residual(grid, boxes[a], boxes[b],
                                                            ctx.scenario.get("samples", 11))["observable_B"])
        rows.append({"level": i, "n": grid.n, "spacing": grid.spacing,
                     "cauchy_residual": G.cauchy_self_test(grid, probes),
                     "spacelike_residual": spacelike, "kernel_gap": G.kernel_gap(grid), "tolQuad": grid.tolQuad})
    return rows


def convergence_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: repr(float(r[k])) if isinstance(r[k], float) else r[k] for k in CSV_FIELDS})
    return buf.getvalue()


def cmd_converge(args) -> int:
    scenario = load(args.scenario)
    ctx = Context(scenario)
    if args.levels < 2:
        raise InvalidArgument("a convergence study needs at least 2 levels")
    rows = convergence_rows(ctx, args.levels)
    text = convergence_csv(rows)
    if args.csv:
        _write(args.csv, text)
    else:
        sys.stdout.write(text)
    failures = []
    for col in ("cauchy_residual", "spacelike_residual"):
        series = [r[col] for r in rows]
        if not monotone(series, G.TOLQUAD_FLOOR):
            failures.append(col)
    for col in failures:
        print(f"FAIL {col} does not decrease across levels", file=sys.stderr)
    return EXIT_FAIL if failures else EXIT_OK


def cmd_demo(args) -> int:
    scenario = bundled("gb_small")
    ctx = Context(scenario)
    ids = list(DEMO_CHECKS)
    if args.skip_stage2:
        ids[ids.index("gb.two_stage")] = "gb.stage1_only"
    if args.break_causality:
        ids.insert(ids.index("gb.weak_causality") + 1, "gb.field_noncausality")
    entries = run_checks(ctx, [ids], not args.no_timing, 1)
    grid = ctx.grid
    print(f"Gupta-Bleuler pipeline on {grid!r}, quadrature levels {scenario['quadrature']['levels']}")
    print("net construction -> weak axioms -> two-stage reduction -> Krein positivity -> spectral condition")
    for e in entries:
        print(_line(e))
        if e["id"] == "gb.field_noncausality":
            word = "witnessed" if e["status"] == "PASS" else "not witnessed"
            print(f"    field-level causality violation {word}: max |c(f, h)| = {fmt(e['residual'])}")
        if e["id"] == "gb.stage1_only":
            print(f"    {e['message'] or 'reduced form nondegenerate'}")
    failed = sum(e["status"] == "FAIL" for e in entries)
    print(f"{len(entries) - failed}/{len(entries)} checks passed")
    if args.json:
        _write(args.json, dumps(build_report(scenario, entries)))
    return EXIT_OK if failed == 0 else EXIT_FAIL


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ccr-reduce", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run the suites of a scenario")
    r.add_argument("scenario")
    r.add_argument("--json", metavar="OUT", help="write the report as JSON")
    r.add_argument("--no-timing", action="store_true", help="record runtime 0 for byte-stable reports")
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("converge", help="refinement table over the quadrature levels")
    c.add_argument("scenario")
    c.add_argument("--levels", type=int, required=True)
    c.add_argument("--csv", metavar="OUT", help="write the table here instead of stdout")
    c.set_defaults(func=cmd_converge)

    d = sub.add_parser("demo", help="end-to-end demonstrations")
    dsub = d.add_subparsers(dest="demo", required=True)
    gb = dsub.add_parser("gb", help="Gupta-Bleuler pipeline")
    gb.add_argument("--break-causality", action="store_true",
                    help="also probe field-level pairs across spacelike regions")
    gb.add_argument("--skip-stage2", action="store_true", help="stop after the gradient constraints")
    gb.add_argument("--json", metavar="OUT", help="write the report as JSON")
    gb.add_argument("--no-timing", action="store_true")
    gb.set_defaults(func=cmd_demo)
    return p


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except CCRError as exc:
        print(f"ccr-reduce: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
