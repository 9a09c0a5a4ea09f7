"""Command-line front end.

Subcommands:

* ``solve``       — run the full exhaustion pipeline and write reports
* ``check``       — classify (g, h) against the solvability conditions only
* ``cheeger``     — scan the Dirichlet spectral gaps along the exhaustion
* ``oracle``      — damped-Newton solve of one level, printed
* ``flow-trace``  — flow-relax one level and write its step trace
* ``scenarios``   — list the packaged example configurations

Exit codes: 0 success; 2 hypothesis violation (h > 0 on the flow route);
3 solver non-convergence or numerical breakdown; 4 bad input (graph spec,
config file, probe placement, exhaustion depth).
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .conditions import check_hypotheses, parse_field
from .driver import (
    emit_reports,
    load_config,
    normalize_config,
    solve_config,
)
from .errors import (
    GraphSpecError,
    ExhaustionError,
    HypothesisError,
    IncompleteDataError,
    NonConvergenceError,
    OverflowAbort,
    SolverBreakdownError,
    StiffnessError,
)
from .flow import FlowConfig, relax
from .graphs import ball_exhaustion, build_graph
from .newton import newton_solve
from .scenarios import get_scenario, scenario_names, SCENARIOS
from .spectral import cheeger_scan

_BAD_INPUT = (GraphSpecError, ExhaustionError, IncompleteDataError,
              json.JSONDecodeError, OSError, KeyError, ValueError, TypeError)
_BREAKDOWN = (NonConvergenceError, StiffnessError, OverflowAbort,
              SolverBreakdownError)


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="kwflow",
        description="Heat-flow construction of solutions to Δf + h·e^f = g "
        "on weighted graphs, with oracle and spectral cross-checks.",
    )
    ap.add_argument(
        "--seed", type=int, default=None,
        help="seed numpy's global RNG (randomized utilities only; the solve "
        "pipeline itself is deterministic)",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def add_source(p):
        grp = p.add_mutually_exclusive_group(required=True)
        grp.add_argument("--config", help="path to a JSON config")
        grp.add_argument("--scenario", help="name of a packaged scenario")
        p.add_argument("--depth", type=int, help="override exhaustion depth")

    p = sub.add_parser("solve", help="run the full pipeline and write reports")
    add_source(p)
    p.add_argument("--tol", type=float, help="override flow tolerance")
    p.add_argument("--out", help="output directory (default from config)")
    p.add_argument("--workers", type=int, help="parallel level solves")
    p.add_argument("--no-oracle", action="store_true", help="skip the Newton cross-check")
    p.add_argument("--no-spectral", action="store_true", help="skip the gap scan")
    p.add_argument("--no-figures", action="store_true", help="skip figure rendering")
    p.add_argument("--no-traces", action="store_true", help="skip trace CSVs")

    p = sub.add_parser("check", help="classify (g, h) against the solvability conditions")
    add_source(p)
    p.add_argument("--margin", type=float, default=1e-6, help="spectral floor margin")
    p.add_argument("--json", action="store_true", help="print the full report as JSON")

    p = sub.add_parser("cheeger", help="scan Dirichlet spectral gaps along the exhaustion")
    add_source(p)
    p.add_argument("--margin", type=float, default=1e-6, help="floor margin for the verdict")

    p = sub.add_parser("oracle", help="damped-Newton solve of a single level")
    add_source(p)
    p.add_argument("--level", type=int, required=True, help="level index k")
    p.add_argument("--tol", type=float, default=1e-10)

    p = sub.add_parser("flow-trace", help="flow-relax one level and write its trace")
    add_source(p)
    p.add_argument("--level", type=int, required=True, help="level index k")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--out", default="kwflow_out", help="directory for the trace CSV")

    sub.add_parser("scenarios", help="list packaged scenarios")
    return ap


def _load_base_config(args) -> dict:
    if getattr(args, "scenario", None):
        cfg = get_scenario(args.scenario)
    else:
        cfg = load_config(args.config)
    if getattr(args, "depth", None):
        cfg.setdefault("exhaustion", {})["depth"] = args.depth
    return cfg


def _prepared(args):
    """(graph, exhaustion, g_field, h_field, cfg) for the analysis commands."""
    cfg = normalize_config(_load_base_config(args))
    graph = build_graph(cfg["graph"])
    root = graph.root
    if cfg["exhaustion"]["root"] is not None:
        root = graph.find_vertex(str(cfg["exhaustion"]["root"]))
    exhaustion = ball_exhaustion(graph, root, cfg["exhaustion"]["depth"])
    return graph, exhaustion, parse_field(cfg["g"]), parse_field(cfg["h"]), cfg


def _cmd_solve(args) -> int:
    cfg = _load_base_config(args)
    if args.tol is not None:
        cfg.setdefault("flow", {})["tol"] = args.tol
    if args.workers is not None:
        cfg["workers"] = args.workers
    if args.no_oracle:
        cfg.setdefault("oracle", {})["enabled"] = False
    if args.no_spectral:
        cfg.setdefault("spectral", {})["enabled"] = False
    if args.out is not None:
        cfg.setdefault("output", {})["dir"] = args.out
    if args.no_figures:
        cfg.setdefault("output", {})["figures"] = False
    if args.no_traces:
        cfg.setdefault("output", {})["traces"] = False

    result = solve_config(cfg)
    paths = emit_reports(result)

    print(f"graph: {len(result.graph.vertices)} vertices, "
          f"exhaustion depth {result.exhaustion.depth}")
    print(f"hypotheses: {result.hypotheses.theorem_applicable} "
          f"(ordering route: {result.hypotheses.c1.verdict}, "
          f"spectral route: {result.hypotheses.c2.verdict})")
    if result.cheeger is not None:
        print(f"gap scan: {result.cheeger.verdict} "
              f"(floor {result.cheeger.lambda_floor})")
    for sol in result.levels:
        gap = ("" if sol.flow_newton_gap is None
               else f"  |flow-newton|={sol.flow_newton_gap:.3e}")
        state = "ok " if sol.converged else "FAIL"
        print(f"  level k={sol.k:<2d} [{state}] n={sol.unknowns:<5d} "
              f"residual={sol.residual:.3e} energy={sol.energy:+.6e}{gap}")
    for item in result.failures:
        print(f"  level k={item['k']:<2d} [ABORT] {item['error']}")
    for note in result.notes:
        print(f"  note: {note}")
    if result.limit.probe_vertices:
        print("probes:")
        for key, est, res, st in zip(
            result.limit.probe_vertices, result.limit.limit_estimate,
            result.limit.global_residual_at_probes, result.limit.stabilized,
        ):
            tag = "stabilized" if st else "still moving"
            print(f"  f({key}) -> {est:+.9f}   global residual {res:.3e}   {tag}")
    if result.bound_checks["violations"]:
        for v in result.bound_checks["violations"]:
            print(f"bound violation: {v}")
    else:
        print("a-priori bounds: all verified")
    print("wrote:")
    for p in paths:
        print(f"  {p}")
    if not result.converged:
        print("solve INCOMPLETE: at least one level did not converge")
        return 3
    return 0


def _cmd_check(args) -> int:
    graph, exhaustion, g_field, h_field, cfg = _prepared(args)
    cheeger = cheeger_scan(exhaustion, margin=args.margin)
    report = check_hypotheses(graph, g_field, h_field,
                              cheeger=cheeger, margin=args.margin)
    if args.json:
        print(json.dumps(report.as_dict(), indent=2, sort_keys=True))
        return 0
    c1, c2 = report.c1, report.c2
    print(f"ordering route: {c1.verdict}")
    print(f"  pointwise g <= h < 0 on truncation: {c1.pointwise_ok}")
    if c1.h_l1 is not None:
        print(f"  ∫|h| dμ = {c1.h_l1.best()!r} ({'exact' if c1.h_l1.exact else 'bounded'})")
    if c1.g2_over_h is not None and not c1.g2_over_h.divergent:
        print(f"  ∫ g²/|h| dμ = {c1.g2_over_h.best()!r}")
    if c1.c1_bound is not None:
        print(f"  L² bound 4∫g²/|h| = {c1.c1_bound!r}")
    print(f"spectral route: {c2.verdict} (gap scan: {c2.cheeger_verdict})")
    if c2.l2_mass_bound is not None:
        print(f"  uniform L² mass bound = {c2.l2_mass_bound!r} "
              f"(floor λ = {c2.lambda_floor!r})")
    fired = report.corollaries.fired()
    if fired:
        print(f"constant-source reductions fired: {', '.join(fired)}")
    print(f"theorem applicable: {report.theorem_applicable}")
    for note in (*c1.notes, *c2.notes, *report.corollaries.notes):
        print(f"  note: {note}")
    return 0


def _cmd_cheeger(args) -> int:
    _, exhaustion, _, _, _ = _prepared(args)
    report = cheeger_scan(exhaustion, margin=args.margin)
    print(f"{'k':>3} {'vertices':>9} {'boundary':>9} {'lambda1':>22}")
    for lv in report.levels:
        lam = "boundary-free" if lv.lambda1 is None else repr(lv.lambda1)
        print(f"{lv.k:>3} {lv.vertices:>9} {lv.boundary_size:>9} {lam:>22}")
    print(f"verdict: {report.verdict}   floor: {report.lambda_floor!r}")
    for note in report.notes:
        print(f"  note: {note}")
    return 0


def _cmd_oracle(args) -> int:
    graph, exhaustion, g_field, h_field, _ = _prepared(args)
    level = exhaustion.level(args.level)
    g_fn, h_fn = g_field.evaluate(graph), h_field.evaluate(graph)
    sol = newton_solve(level, g_fn, h_fn, tol=args.tol)
    print(f"level k={args.level}: {sol.unknowns} unknowns, "
          f"method {sol.method}, {sol.iterations} iterations")
    print(f"residual (sup) = {sol.final_residual!r}")
    print(f"residual (μ-weighted l2) = {sol.final_residual_mu!r}")
    print(f"damping: {sol.damping_history}")
    vals = sol.f.values
    print(f"f range: [{float(vals.min())!r}, {float(vals.max())!r}]")
    return 0


def _cmd_flow_trace(args) -> int:
    from pathlib import Path
    import csv as _csv

    graph, exhaustion, g_field, h_field, _ = _prepared(args)
    level = exhaustion.level(args.level)
    g_fn, h_fn = g_field.evaluate(graph), h_field.evaluate(graph)
    sol = relax(level, g_fn, h_fn, FlowConfig(tol=args.tol, trace=True))
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / f"trace_level_{args.level}.csv"
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = _csv.writer(fh)
        w.writerow(["t", "dt", "energy", "residual", "min_f", "max_f"])
        for row in sol.trace:
            w.writerow([repr(float(x)) for x in row])
    state = "converged" if sol.converged else "did not converge"
    print(f"level k={args.level}: {state} in {sol.steps} steps "
          f"(t={sol.t_final:.3e}, residual {sol.residual:.3e})")
    print(f"wrote {path}")
    return 0 if sol.converged else 3


def _cmd_scenarios(_args) -> int:
    width = max(len(n) for n in scenario_names())
    for name in scenario_names():
        print(f"{name:<{width}}  {SCENARIOS[name]['title']}")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.seed is not None:
        np.random.seed(args.seed)
    handlers = {
        "solve": _cmd_solve,
        "check": _cmd_check,
        "cheeger": _cmd_cheeger,
        "oracle": _cmd_oracle,
        "flow-trace": _cmd_flow_trace,
        "scenarios": _cmd_scenarios,
    }
    try:
        return handlers[args.command](args)
    except HypothesisError as exc:
        print(f"hypothesis violation: {exc}", file=sys.stderr)
        return 2
    except _BREAKDOWN as exc:
        print(f"solver breakdown: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except _BAD_INPUT as exc:
        print(f"bad input: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
