"""Pipeline + CLI: config handling, report schema, exit codes, determinism."""

import json
import re

import numpy as np
import pytest

from kwflow import (
    GraphSpecError,
    HypothesisError,
    emit_reports,
    load_results,
    normalize_config,
    solve_config,
    solve_kw,
)
from kwflow.cli import main as cli_main

Z_CFG = {
    "graph": {"family": "lattice", "params": {"dim": 1}},
    "g": {"preset": "geom", "params": {"amplitude": -2.0, "ratio": 0.5}},
    "h": {"preset": "geom", "params": {"amplitude": -1.0, "ratio": 0.5}},
    "exhaustion": {"depth": 3},
}


def _cfg(tmp_path, **over):
    cfg = json.loads(json.dumps(Z_CFG))  # deep copy
    cfg["output"] = {"dir": str(tmp_path / "out"), "figures": False, "traces": False}
    cfg.update(over)
    return cfg


def test_normalize_config_defaults_and_validation():
    cfg = normalize_config(dict(Z_CFG))
    assert cfg["flow"]["tol"] == 1e-9
    assert cfg["oracle"]["enabled"] is True
    assert cfg["workers"] == 1
    # family specs get a truncation margin of two spheres past the scan
    assert cfg["graph"]["truncation_depth"] == 5
    with pytest.raises(GraphSpecError):
        normalize_config({**Z_CFG, "tYpo": 1})
    with pytest.raises(GraphSpecError):
        normalize_config({**Z_CFG, "flow": {"nope": 1}})
    with pytest.raises(GraphSpecError):
        normalize_config({"graph": Z_CFG["graph"], "g": -1.0})  # missing h
    with pytest.raises(GraphSpecError):
        normalize_config({**Z_CFG, "exhaustion": {"depth": 0}})


def test_solve_result_shape(tmp_path):
    res = solve_config(_cfg(tmp_path))
    assert res.converged
    levels, limit, hyp = res  # iterates as the documented triple
    assert [s.k for s in levels] == [1, 2, 3]
    assert hyp.theorem_applicable == "C-1"
    for sol in levels:
        assert sol.solver == "both"
        assert sol.flow_newton_gap <= 1e-6
        assert sol.lambda1 is not None and sol.c1_bound is not None
    assert limit.levels == [1, 2, 3]
    assert limit.probe_vertices[0] == "0"
    n_levels, n_probes = len(limit.levels), len(limit.probe_vertices)
    assert all(len(s) == n_levels for s in limit.per_probe)
    assert all(len(s) == n_levels - 1 for s in limit.cauchy_gaps)
    assert len(limit.sup_gaps) == n_levels - 1
    assert len(limit.global_residual_at_probes) == n_probes
    assert all(limit.splice_exact)
    assert res.bound_checks["violations"] == []


def test_probe_zero_extension_flagged(tmp_path):
    # a probe two steps out only joins the domain at level 2; before that the
    # recorded value is the zero extension
    cfg = _cfg(tmp_path, probes=["2"])
    res = solve_config(cfg)
    flags = res.limit.in_domain[0]
    series = res.limit.per_probe[0]
    assert flags == [False, True, True]
    assert series[0] == 0.0
    assert series[1] != 0.0


def test_probe_must_be_interior(tmp_path):
    with pytest.raises(GraphSpecError, match="not interior"):
        solve_config(_cfg(tmp_path, probes=["3"]))


def test_positive_h_rejected_before_solving(tmp_path):
    cfg = _cfg(tmp_path, h={"preset": "const", "params": {"value": 0.5}})
    with pytest.raises(HypothesisError):
        solve_config(cfg)


def test_solve_kw_three_argument_form(tmp_path):
    res = solve_kw(
        dict(Z_CFG["graph"]),
        Z_CFG["g"],
        Z_CFG["h"],
        {
            "exhaustion": {"depth": 2},
            "output": {"dir": str(tmp_path), "figures": False, "traces": False},
        },
    )
    assert res.converged and len(res.levels) == 2


def test_failures_recorded_not_raised(tmp_path):
    cfg = _cfg(tmp_path, flow={"max_steps": 3}, oracle={"enabled": False})
    res = solve_config(cfg)
    assert not res.converged
    assert all(not s.converged for s in res.levels)
    assert all(s.abort_reason == "budget" for s in res.levels)
    # reports still write cleanly for the partial run
    paths = emit_reports(res)
    assert any(p.name == "results.json" for p in paths)


def test_report_roundtrip_and_schema(tmp_path):
    res = solve_config(_cfg(tmp_path))
    paths = emit_reports(res)
    names = {p.name for p in paths}
    assert "results.json" in names and "plot_data.csv" in names
    doc = load_results(tmp_path / "out" / "results.json")
    assert doc["schema_version"] == 1
    assert doc["converged"] is True
    assert doc["config"]["graph"]["family"] == "lattice"
    assert [lv["k"] for lv in doc["levels"]] == [1, 2, 3]
    assert doc["levels"][0]["newton"]["converged"] is True
    # vertex values serialize under their string keys
    assert "0" in doc["levels"][0]["f"]
    # reserializing the parsed document reproduces the file byte for byte
    raw = (tmp_path / "out" / "results.json").read_text()
    assert json.dumps(doc, indent=2, sort_keys=True) + "\n" == raw


def test_runs_are_deterministic(tmp_path):
    strip = re.compile(rb'"created_at": "[^"]*"')

    def run():
        res = solve_config(_cfg(tmp_path))
        return {p.name: p.read_bytes() for p in emit_reports(res)}

    a, b = run(), run()
    assert a.keys() == b.keys()
    for name in a:
        da, db = a[name], b[name]
        if name == "results.json":
            da, db = strip.sub(b"", da), strip.sub(b"", db)
        assert da == db, f"{name} differs between identical runs"


def test_workers_match_serial(tmp_path):
    r1 = solve_config(_cfg(tmp_path))
    r2 = solve_config(_cfg(tmp_path, workers=2))
    for a, b in zip(r1.levels, r2.levels):
        assert np.array_equal(a.f.values, b.f.values)


def test_traces_and_figures_toggle(tmp_path):
    cfg = _cfg(tmp_path)
    cfg["output"]["traces"] = True
    cfg["output"]["figures"] = True
    res = solve_config(cfg)
    paths = emit_reports(res)
    names = [p.name for p in paths]
    assert "trace_level_3.csv" in names
    assert "probes.png" in names and "residuals.png" in names


# ---------------------------------------------------------------------------
# CLI surface
# ---------------------------------------------------------------------------


def _write_cfg(tmp_path, cfg, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def test_cli_scenarios_lists_names(capsys):
    assert cli_main(["scenarios"]) == 0
    out = capsys.readouterr().out
    assert "z_c1" in out and "tree_c2" in out


def test_cli_solve_roundtrip(tmp_path, capsys):
    cfgfile = _write_cfg(tmp_path, _cfg(tmp_path))
    rc = cli_main(["solve", "--config", cfgfile, "--no-figures", "--no-traces"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "a-priori bounds: all verified" in out
    assert (tmp_path / "out" / "results.json").exists()


def test_cli_check_and_cheeger(tmp_path, capsys):
    cfgfile = _write_cfg(tmp_path, dict(Z_CFG))
    assert cli_main(["check", "--config", cfgfile, "--depth", "6"]) == 0
    out = capsys.readouterr().out
    assert "ordering route: satisfied" in out
    assert cli_main(["cheeger", "--config", cfgfile, "--depth", "6"]) == 0
    out = capsys.readouterr().out
    assert "empirically-degenerating" in out


def test_cli_check_json_mode(tmp_path, capsys):
    cfgfile = _write_cfg(tmp_path, dict(Z_CFG))
    assert cli_main(["check", "--config", cfgfile, "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["theorem_applicable"] == "C-1"


def test_cli_exit_code_hypothesis_violation(tmp_path):
    cfg = _cfg(tmp_path, h={"preset": "const", "params": {"value": 1.0}})
    assert cli_main(["solve", "--config", _write_cfg(tmp_path, cfg)]) == 2


def test_cli_exit_code_nonconvergence(tmp_path):
    cfg = _cfg(tmp_path, flow={"max_steps": 2}, oracle={"enabled": False})
    assert cli_main(["solve", "--config", _write_cfg(tmp_path, cfg)]) == 3


def test_cli_exit_code_bad_input(tmp_path):
    assert cli_main(["solve", "--scenario", "no_such_thing"]) == 4
    bad = tmp_path / "broken.json"
    bad.write_text("{not json")
    assert cli_main(["solve", "--config", str(bad)]) == 4
    cfg = _cfg(tmp_path, probes=["3"])  # never interior at depth 3
    assert cli_main(["solve", "--config", _write_cfg(tmp_path, cfg)]) == 4


def test_cli_oracle_and_flow_trace(tmp_path, capsys):
    cfgfile = _write_cfg(tmp_path, dict(Z_CFG))
    assert cli_main(["oracle", "--config", cfgfile, "--level", "2"]) == 0
    assert "iterations" in capsys.readouterr().out
    rc = cli_main([
        "flow-trace", "--config", cfgfile, "--level", "2",
        "--out", str(tmp_path / "tr"),
    ])
    assert rc == 0
    assert (tmp_path / "tr" / "trace_level_2.csv").exists()
