"""Pipeline orchestration: specs in, per-level solutions and reports out.

``solve_kw`` runs the whole construction:

1. build the truncated graph and the ball exhaustion,
2. check the hypotheses on (g, h) (ordering/integrability, spectral gap,
   constant-source reductions) and scan the Dirichlet gaps,
3. relax every level problem with the energy-descending flow, cross-check
   each against the damped-Newton oracle,
4. track the solutions at probe vertices across levels and evaluate the
   equation with the *full* graph operator at interior probes — the
   numerical counterpart of splicing the truncated problems into a global
   solution,
5. verify the a-priori bounds the theory promises (stationarity estimate
   ≤ 0; positivity and the L² bound under the ordering route; one uniform
   L² bound under the spectral route).

``emit_reports`` writes the JSON report, a delimited per-level table, the
flow traces, and rendered figures.  Runs are deterministic: identical specs
produce byte-identical outputs up to the timestamp field.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from . import calculus, plots
from .conditions import HypothesisReport, check_hypotheses, parse_field
from .errors import (
    GraphSpecError,
    HypothesisError,
    KwflowError,
    NonConvergenceError,
)
from .flow import FlowConfig, LevelSolution, relax
from .graphs import (
    Exhaustion,
    Level,
    MeasuredGraph,
    VertexFunction,
    ball_exhaustion,
    build_graph,
    vertex_key,
)
from .newton import newton_solve
from .spectral import CheegerReport, cheeger_scan

__all__ = [
    "SCHEMA_VERSION",
    "LimitReport",
    "RunResult",
    "normalize_config",
    "load_config",
    "load_results",
    "solve_kw",
    "solve_config",
    "emit_reports",
]

SCHEMA_VERSION = 1

#: a probe counts as stabilized when its last STABLE_WINDOW level-to-level
#: gaps all fall below STABLE_TOL (a reporting convention, not a claim of
#: convergence of the infinite construction)
STABLE_WINDOW = 3
STABLE_TOL = 1e-6

_TOP_KEYS = {
    "graph", "g", "h", "exhaustion", "flow", "oracle", "spectral",
    "probes", "output", "workers",
}

_DEFAULTS = {
    "exhaustion": {"depth": 6, "root": None},
    "flow": {
        "tol": 1e-9,
        "dt": None,
        "dt_max": None,
        "t_max": 1e7,
        "max_steps": 500_000,
        "trace_stride": 1,
    },
    "oracle": {"enabled": True, "tol": 1e-10, "max_iter": 50},
    "spectral": {"enabled": True, "margin": 1e-6},
    "probes": None,
    "output": {"dir": "kwflow_out", "traces": True, "figures": True},
    "workers": 1,
}


# ---------------------------------------------------------------------------
# config plumbing
# ---------------------------------------------------------------------------


def normalize_config(config: dict) -> dict:
    """Fill defaults and validate the shape of a solve config.

    Returns a fresh dict: {graph, g, h, exhaustion:{root, depth},
    flow:{tol, dt, ...}, oracle:{enabled, tol, ...}, spectral:{enabled,
    margin}, probes, output:{dir, traces, figures}, workers}.  Unknown
    top-level keys are rejected so typos fail loudly instead of silently
    running with defaults.
    """
    if not isinstance(config, dict):
        raise GraphSpecError("config must be a JSON object")
    unknown = set(config) - _TOP_KEYS - {"title", "description"}
    if unknown:
        raise GraphSpecError(f"unknown config keys: {sorted(unknown)}")
    for req in ("graph", "g", "h"):
        if req not in config:
            raise GraphSpecError(f"config is missing required key {req!r}")

    out: dict = {"graph": dict(config["graph"]), "g": config["g"], "h": config["h"]}
    for section in ("exhaustion", "flow", "oracle", "spectral", "output"):
        merged = dict(_DEFAULTS[section])
        given = config.get(section, {})
        if not isinstance(given, dict):
            raise GraphSpecError(f"config section {section!r} must be an object")
        bad = set(given) - set(merged)
        if bad:
            raise GraphSpecError(f"unknown keys in config.{section}: {sorted(bad)}")
        merged.update(given)
        out[section] = merged
    out["probes"] = config.get("probes", _DEFAULTS["probes"])
    out["workers"] = int(config.get("workers", _DEFAULTS["workers"]))
    if out["workers"] < 1:
        raise GraphSpecError("workers must be >= 1")

    depth = out["exhaustion"]["depth"]
    if not isinstance(depth, int) or depth < 1:
        raise GraphSpecError("exhaustion.depth must be a positive integer")
    if "family" in out["graph"] and "truncation_depth" not in out["graph"]:
        # generate two spheres past the scan so every level's boundary data
        # is exact
        out["graph"]["truncation_depth"] = depth + 2
    return out


def load_config(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def load_results(path) -> dict:
    """Reparse an emitted results.json."""
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _flow_config(flow: dict, trace: bool) -> FlowConfig:
    return FlowConfig(
        tol=float(flow["tol"]),
        dt_init=None if flow["dt"] is None else float(flow["dt"]),
        dt_max=math.inf if flow["dt_max"] is None else float(flow["dt_max"]),
        t_max=float(flow["t_max"]),
        max_steps=int(flow["max_steps"]),
        trace=trace,
        trace_stride=int(flow["trace_stride"]),
    )


# ---------------------------------------------------------------------------
# limit extraction
# ---------------------------------------------------------------------------


@dataclass
class LimitReport:
    """The probe-level view of the exhaustion limit.

    Per probe x: the sequence f^k(x) over the solved levels (zero-extension
    values flagged by ``in_domain``), its consecutive gaps, the deepest value,
    whether the last few gaps sit below the stabilization tolerance, and the
    residual of the *global* equation Δf + h·e^f − g at x evaluated with the
    full-graph operator on the deepest solution.  ``splice_exact`` certifies
    that at x the level operator and the full operator coincide exactly
    (boundary potential 0), which is what makes the global residual
    meaningful.  ``sup_gaps`` tracks sup|f^k − f^{k−1}| over the whole
    previous level, a stronger Cauchy diagnostic than the probes alone.
    """

    levels: List[int]
    probe_vertices: List[str]
    probe_distances: List[int]
    per_probe: List[List[float]]
    in_domain: List[List[bool]]
    cauchy_gaps: List[List[float]]
    limit_estimate: List[float]
    global_residual_at_probes: List[float]
    splice_exact: List[bool]
    stabilized: List[bool]
    sup_gaps: List[float]
    stabilized_all: bool = False

    def as_dict(self) -> dict:
        return {
            "levels": list(self.levels),
            "probe_vertices": list(self.probe_vertices),
            "probe_distances": list(self.probe_distances),
            "per_probe": [[float(v) for v in s] for s in self.per_probe],
            "in_domain": [list(map(bool, s)) for s in self.in_domain],
            "cauchy_gaps": [[float(v) for v in s] for s in self.cauchy_gaps],
            "limit_estimate": [float(v) for v in self.limit_estimate],
            "global_residual_at_probes": [float(v) for v in self.global_residual_at_probes],
            "splice_exact": list(map(bool, self.splice_exact)),
            "stabilized": list(map(bool, self.stabilized)),
            "sup_gaps": [float(v) for v in self.sup_gaps],
            "stabilized_all": bool(self.stabilized_all),
        }


def _is_interior(graph: MeasuredGraph, level: Level, p) -> bool:
    if p not in level.vset or not graph.is_complete(p):
        return False
    return level.boundary_potential[level.index[p]] == 0.0


def _resolve_probes(graph: MeasuredGraph, exhaustion: Exhaustion, probes) -> list:
    """Turn configured probe keys into vertices, or pick defaults.

    Defaults: the exhaustion root and its neighbors, filtered to vertices
    that are interior at the deepest level.  Configured probes must be
    interior there — a probe that never sees the full operator cannot speak
    about the global equation, so it is a config error.
    """
    deepest = exhaustion.levels[-1]
    if probes is None:
        cands = [exhaustion.root] + [y for y, _ in graph.neighbors(exhaustion.root)]
        return [p for p in cands if _is_interior(graph, deepest, p)]
    out = []
    for key in probes:
        p = graph.find_vertex(str(key))
        if not _is_interior(graph, deepest, p):
            raise GraphSpecError(
                f"probe {key!r} is not interior at the deepest level "
                f"(k={deepest.k}); the global operator is undefined there"
            )
        out.append(p)
    return out


def build_limit_report(
    graph: MeasuredGraph,
    exhaustion: Exhaustion,
    solutions: Dict[int, LevelSolution],
    probes: list,
    g_fn: VertexFunction,
    h_fn: VertexFunction,
) -> LimitReport:
    ks = sorted(solutions)
    if not ks:
        return LimitReport([], [vertex_key(p) for p in probes], [], [], [], [],
                           [], [], [], [], [], False)
    deepest_level = exhaustion.level(ks[-1])
    f_deep = solutions[ks[-1]].f
    dist = graph.distances_from(exhaustion.root)
    full = calculus.OperatorContext(graph)
    leveled = calculus.OperatorContext(graph, deepest_level)

    per_probe, in_domain, gaps_all, limits = [], [], [], []
    glob_res, splice, stable = [], [], []
    for p in probes:
        series = [float(solutions[k].f(p)) for k in ks]
        flags = [p in exhaustion.level(k).vset for k in ks]
        gaps = [abs(b - a) for a, b in zip(series, series[1:])]
        per_probe.append(series)
        in_domain.append(flags)
        gaps_all.append(gaps)
        limits.append(series[-1])
        lap_full = calculus.laplacian(full, f_deep, p)
        lap_level = calculus.laplacian(leveled, f_deep, p)
        phi = calculus.boundary_potential(leveled, p)
        splice.append(lap_full == lap_level and phi == 0.0)
        glob_res.append(
            abs(lap_full + h_fn(p) * math.exp(f_deep(p)) - g_fn(p))
        )
        stable.append(
            len(gaps) >= STABLE_WINDOW
            and all(gp < STABLE_TOL for gp in gaps[-STABLE_WINDOW:])
        )

    sup_gaps = []
    for ka, kb in zip(ks, ks[1:]):
        prev = exhaustion.level(ka)
        fa, fb = solutions[ka].f, solutions[kb].f
        sup_gaps.append(max((abs(fb(v) - fa(v)) for v in prev.vertices), default=0.0))

    return LimitReport(
        levels=ks,
        probe_vertices=[vertex_key(p) for p in probes],
        probe_distances=[int(dist[p]) for p in probes],
        per_probe=per_probe,
        in_domain=in_domain,
        cauchy_gaps=gaps_all,
        limit_estimate=limits,
        global_residual_at_probes=glob_res,
        splice_exact=splice,
        stabilized=stable,
        sup_gaps=sup_gaps,
        stabilized_all=bool(stable) and all(stable),
    )


# ---------------------------------------------------------------------------
# per-level work
# ---------------------------------------------------------------------------


def _run_level(task):
    """Solve one level (flow, then the Newton cross-check).  Runs in worker
    processes when configured, so it must stay a module-level function and
    only touch its arguments."""
    level, g_fn, h_fn, flow_cfg, oracle = task
    try:
        sol = relax(level, g_fn, h_fn, flow_cfg)
    except KwflowError as exc:
        return level.k, None, f"{type(exc).__name__}: {exc}"
    note = None
    if oracle["enabled"]:
        try:
            rep = newton_solve(
                level, g_fn, h_fn,
                tol=float(oracle["tol"]), max_iter=int(oracle["max_iter"]),
            )
        except KwflowError as exc:
            note = f"oracle failed on level k={level.k}: {exc}"
        else:
            sol.newton = rep
            sol.solver = "both"
            sol.flow_newton_gap = float(
                np.max(np.abs(sol.f.values - rep.f.values), initial=0.0)
            )
    return level.k, sol, note


# ---------------------------------------------------------------------------
# the pipeline
# ---------------------------------------------------------------------------


@dataclass
class RunResult:
    """Everything one solve produced.  Iterates as the documented triple
    (levels, limit, hypotheses) for callers that only want those."""

    config: dict
    graph: MeasuredGraph
    exhaustion: Exhaustion
    hypotheses: HypothesisReport
    cheeger: Optional[CheegerReport]
    levels: List[LevelSolution]
    limit: LimitReport
    bound_checks: dict
    failures: List[dict] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)
    converged: bool = True

    def __iter__(self):
        return iter((self.levels, self.limit, self.hypotheses))

    def as_dict(self) -> dict:
        fam = self.graph.family
        return {
            "schema_version": SCHEMA_VERSION,
            "config": self.config,
            "graph": {
                "vertices": len(self.graph.vertices),
                "edges": sum(len(self.graph.neighbors(v)) for v in self.graph.vertices) // 2,
                "family": None
                if fam is None
                else {
                    "name": fam.family,
                    "params": dict(fam.params),
                    "truncation_depth": fam.truncation_depth,
                },
                "root": vertex_key(self.exhaustion.root),
                "fully_complete": len(self.graph.complete) == len(self.graph.vertices),
            },
            "hypotheses": self.hypotheses.as_dict(),
            "cheeger": None if self.cheeger is None else self.cheeger.as_dict(),
            "levels": [_level_as_dict(s) for s in self.levels],
            "limit": self.limit.as_dict(),
            "bound_checks": self.bound_checks,
            "failures": list(self.failures),
            "notes": list(self.notes),
            "converged": bool(self.converged),
        }


def _level_as_dict(sol: LevelSolution) -> dict:
    return {
        "k": sol.k,
        "unknowns": sol.unknowns,
        "converged": bool(sol.converged),
        "solver": sol.solver,
        "residual": float(sol.residual),
        "energy": float(sol.energy),
        "estimate_lhs": float(sol.estimate_lhs),
        "l2_mass": float(sol.l2_mass),
        "l2_mass_h_weighted": float(sol.l2_mass_h_weighted),
        "positivity_min": float(sol.positivity_min),
        "velocity_ceiling": float(sol.velocity_ceiling),
        "velocity_max": float(sol.velocity_max),
        "steps": sol.steps,
        "t_final": float(sol.t_final),
        "h_zero": bool(sol.h_zero),
        "abort_reason": sol.abort_reason,
        "lambda1": None if sol.lambda1 is None else float(sol.lambda1),
        "c1_bound": None if sol.c1_bound is None else float(sol.c1_bound),
        "flow_newton_gap": None
        if sol.flow_newton_gap is None
        else float(sol.flow_newton_gap),
        "newton": None if sol.newton is None else sol.newton.as_dict(),
        "f": {vertex_key(v): float(x) for v, x in zip(sol.f.domain, sol.f.values)},
    }


def solve_config(config: dict) -> RunResult:
    """One-argument form of :func:`solve_kw` taking the whole config dict."""
    cfg = normalize_config(config)
    run_cfg = {k: v for k, v in cfg.items() if k not in ("graph", "g", "h")}
    return solve_kw(cfg["graph"], cfg["g"], cfg["h"], run_cfg, _normalized=True)


def solve_kw(
    graph_spec: dict,
    g_spec,
    h_spec,
    run_config: Optional[dict] = None,
    _normalized: bool = False,
) -> RunResult:
    """Run the full exhaustion pipeline; returns (levels, limit, hypotheses)
    plus every sub-report on the :class:`RunResult`.

    Raises HypothesisError when h > 0 somewhere on the truncation (the flow
    route requires h ≤ 0; run the `check` path for pure classification).
    Per-level non-convergence and oracle failures are recorded on the result
    (``failures`` / ``notes``), not raised.
    """
    if _normalized:
        cfg = {"graph": graph_spec, "g": g_spec, "h": h_spec, **(run_config or {})}
    else:
        cfg = normalize_config(
            {"graph": graph_spec, "g": g_spec, "h": h_spec, **(run_config or {})}
        )

    graph = build_graph(cfg["graph"])
    g_field, h_field = parse_field(cfg["g"]), parse_field(cfg["h"])
    cfg["g"], cfg["h"] = g_field.as_dict(), h_field.as_dict()

    root = graph.root
    if cfg["exhaustion"]["root"] is not None:
        root = graph.find_vertex(str(cfg["exhaustion"]["root"]))
    depth = cfg["exhaustion"]["depth"]
    exhaustion = ball_exhaustion(graph, root, depth)

    g_fn = g_field.evaluate(graph)
    h_fn = h_field.evaluate(graph)
    n_pos = int(np.sum(h_fn.values > 0.0))
    if n_pos:
        raise HypothesisError(
            f"h > 0 at {n_pos} vertex/vertices of the truncation; the flow "
            "route requires h <= 0 everywhere"
        )

    cheeger = None
    if cfg["spectral"]["enabled"]:
        cheeger = cheeger_scan(exhaustion, margin=float(cfg["spectral"]["margin"]))
    hypotheses = check_hypotheses(
        graph, g_field, h_field, depth=None, cheeger=cheeger,
        margin=float(cfg["spectral"]["margin"]),
    )

    probes = _resolve_probes(graph, exhaustion, cfg["probes"])
    cfg["probes"] = [vertex_key(p) for p in probes]

    want_trace = bool(cfg["output"]["traces"] or cfg["output"]["figures"])
    flow_cfg = _flow_config(cfg["flow"], want_trace)
    tasks = [(lv, g_fn, h_fn, flow_cfg, cfg["oracle"]) for lv in exhaustion.levels]
    if cfg["workers"] > 1:
        with ProcessPoolExecutor(max_workers=cfg["workers"]) as pool:
            outcomes = list(pool.map(_run_level, tasks))
    else:
        outcomes = [_run_level(t) for t in tasks]

    solutions: Dict[int, LevelSolution] = {}
    failures: List[dict] = []
    notes: List[str] = []
    for k, sol, note in outcomes:
        if sol is None:
            failures.append({"k": k, "error": note})
            continue
        if note:
            notes.append(note)
        solutions[k] = sol

    _attach_level_metadata(graph, exhaustion, solutions, g_fn, h_fn, cheeger)
    limit = build_limit_report(graph, exhaustion, solutions, probes, g_fn, h_fn)
    levels = [solutions[k] for k in sorted(solutions)]
    bound_checks = _bound_checks(hypotheses, levels)
    converged = not failures and all(s.converged for s in levels) and bool(levels)

    return RunResult(
        config=cfg,
        graph=graph,
        exhaustion=exhaustion,
        hypotheses=hypotheses,
        cheeger=cheeger,
        levels=levels,
        limit=limit,
        bound_checks=bound_checks,
        failures=failures,
        notes=notes,
        converged=converged,
    )


def _attach_level_metadata(
    graph: MeasuredGraph,
    exhaustion: Exhaustion,
    solutions: Dict[int, LevelSolution],
    g_fn: VertexFunction,
    h_fn: VertexFunction,
    cheeger: Optional[CheegerReport],
) -> None:
    """Fill lambda1 (from the scan) and the level share of the ordering-route
    L² bound, 4·∫_{V_k} g²/|h| dμ, on every solution."""
    lam_by_k = {}
    if cheeger is not None:
        lam_by_k = {lv.k: lv.lambda1 for lv in cheeger.levels}
    for k, sol in solutions.items():
        sol.lambda1 = lam_by_k.get(k)
        level = exhaustion.level(k)
        acc = 0.0
        ok = True
        for v in level.vertices:
            hv = h_fn(v)
            if hv == 0.0:
                ok = False
                break
            acc += graph.mu[v] * g_fn(v) ** 2 / abs(hv)
        sol.c1_bound = 4.0 * acc if ok else None


def _bound_checks(hyp: HypothesisReport, levels: List[LevelSolution]) -> dict:
    """Verify the a-priori bounds the construction promises, per route.

    Tolerances: the stationarity estimate may sit a hair above 0 and the
    L² masses a hair above their bounds from float roundoff, hence the
    1e-12 / 1e-8 slacks; positivity under the ordering route allows -1e-10.
    """
    violations: List[str] = []
    checks: dict = {}

    max_est = max((s.estimate_lhs for s in levels), default=0.0)
    checks["max_estimate_lhs"] = float(max_est)
    checks["estimate_nonpositive"] = bool(max_est <= 1e-12)
    if not checks["estimate_nonpositive"]:
        violations.append(f"stationarity estimate positive: {max_est!r}")

    c1_active = bool(hyp.c1.pointwise_ok)
    checks["c1_active"] = c1_active
    if c1_active and levels:
        pos_min = min(s.positivity_min for s in levels)
        checks["c1_positivity_min"] = float(pos_min)
        checks["c1_positivity_ok"] = bool(pos_min >= -1e-10)
        if not checks["c1_positivity_ok"]:
            violations.append(f"ordering route positivity broken: min f = {pos_min!r}")
        l2_ok = all(
            s.c1_bound is not None and s.l2_mass <= s.c1_bound + 1e-8 for s in levels
        )
        checks["c1_l2_ok"] = bool(l2_ok)
        if not l2_ok:
            violations.append("ordering route L2 bound exceeded on some level")

    c2_bound = hyp.c2.l2_mass_bound
    checks["c2_active"] = c2_bound is not None
    if c2_bound is not None and levels:
        checks["c2_bound"] = float(c2_bound)
        worst = max(s.l2_mass for s in levels)
        checks["c2_worst_l2_mass"] = float(worst)
        checks["c2_uniform_ok"] = bool(worst <= c2_bound + 1e-8)
        if not checks["c2_uniform_ok"]:
            violations.append(
                f"spectral route uniform L2 bound exceeded: {worst!r} > {c2_bound!r}"
            )

    checks["violations"] = violations
    return checks


# ---------------------------------------------------------------------------
# artifacts
# ---------------------------------------------------------------------------


def emit_reports(
    result: RunResult,
    out_dir=None,
    figures: Optional[bool] = None,
    traces: Optional[bool] = None,
) -> List[Path]:
    """Write results.json, plot_data.csv, per-level flow traces, and figures.

    Returns the written paths.  All numeric output is full-precision repr, so
    identical runs emit identical bytes (results.json additionally carries a
    created_at timestamp, the one intentionally varying field).
    """
    out_cfg = result.config["output"]
    outdir = Path(out_dir if out_dir is not None else out_cfg["dir"])
    figures = out_cfg["figures"] if figures is None else figures
    traces = out_cfg["traces"] if traces is None else traces
    outdir.mkdir(parents=True, exist_ok=True)
    written: List[Path] = []

    doc = result.as_dict()
    doc["created_at"] = datetime.now(timezone.utc).isoformat()
    jpath = outdir / "results.json"
    with open(jpath, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    written.append(jpath)

    cpath = outdir / "plot_data.csv"
    probe_cols = [f"f@{key}" for key in result.limit.probe_vertices]
    with open(cpath, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(
            ["k", "unknowns", "residual", "energy", "estimate_lhs", "l2_mass",
             "positivity_min", "lambda1", "flow_newton_gap"] + probe_cols
        )
        for i, sol in enumerate(result.levels):
            row = [
                sol.k, sol.unknowns, repr(sol.residual), repr(sol.energy),
                repr(sol.estimate_lhs), repr(sol.l2_mass),
                repr(sol.positivity_min),
                "" if sol.lambda1 is None else repr(sol.lambda1),
                "" if sol.flow_newton_gap is None else repr(sol.flow_newton_gap),
            ]
            ki = result.limit.levels.index(sol.k) if sol.k in result.limit.levels else None
            for series in result.limit.per_probe:
                row.append(repr(series[ki]) if ki is not None else "")
            w.writerow(row)
    written.append(cpath)

    if traces:
        for sol in result.levels:
            if not sol.trace:
                continue
            tpath = outdir / f"trace_level_{sol.k}.csv"
            with open(tpath, "w", encoding="utf-8", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["t", "dt", "energy", "residual", "min_f", "max_f"])
                for row in sol.trace:
                    w.writerow([repr(float(x)) for x in row])
            written.append(tpath)

    if figures:
        figdir = outdir / "figures"
        if result.limit.probe_vertices:
            written.append(plots.probe_convergence_figure(result.limit, figdir / "probes.png"))
        if result.levels:
            written.append(plots.residual_figure(result.levels, figdir / "residuals.png"))
        if result.cheeger is not None:
            written.append(plots.spectral_figure(result.cheeger, figdir / "spectral.png"))
        deepest_traced = next(
            (s for s in reversed(result.levels) if s.trace), None
        )
        if deepest_traced is not None:
            written.append(
                plots.flow_trace_figure(
                    deepest_traced.trace, deepest_traced.k,
                    figdir / "flow_trace.png",
                )
            )
    return written
