"""Dirichlet spectral gaps: closed forms, monotonicity, scan verdicts."""

import math

import numpy as np
import pytest

from kwflow import (
    ball_exhaustion,
    build_graph,
    cheeger_scan,
    dirichlet_lambda1,
    dirichlet_lambda1_dense,
)
from conftest import random_graph


def _z_levels(depth, truncation=None):
    g = build_graph({
        "family": "lattice", "params": {"dim": 1},
        "truncation_depth": truncation or depth + 2,
    })
    return ball_exhaustion(g, g.root, depth)


def test_path_closed_form():
    # the ball of radius k in the unit-weight line is a path on n = 2k+1
    # interior vertices with Dirichlet ends: lambda_1 = 2(1 - cos(pi/(n+1)))
    ex = _z_levels(6)
    for lv in ex.levels:
        n = 2 * lv.k + 1
        ref = 2.0 * (1.0 - math.cos(math.pi / (n + 1)))
        lam = dirichlet_lambda1(lv)
        assert lam == pytest.approx(ref, rel=1e-12)
        assert dirichlet_lambda1_dense(lv) == pytest.approx(ref, rel=1e-10)


def test_tree_gap_stays_above_structural_floor():
    # on the 3-regular tree the Dirichlet gap never drops below 3 - 2*sqrt(2)
    g = build_graph({"family": "tree", "params": {"degree": 3}, "truncation_depth": 8})
    ex = ball_exhaustion(g, g.root, 6)
    floor = 3.0 - 2.0 * math.sqrt(2.0)
    for lv in ex.levels:
        assert dirichlet_lambda1(lv) > floor


def test_domain_monotonicity_randomized():
    # growing the level can only lower the Dirichlet ground state
    rng = np.random.default_rng(41)
    for _ in range(20):
        g = random_graph(rng, n_max=30)
        root = g.vertices[int(rng.integers(0, len(g.vertices)))]
        ex = ball_exhaustion(g, root, 3)
        lams = [dirichlet_lambda1(lv) for lv in ex.levels if lv.boundary]
        for a, b in zip(lams, lams[1:]):
            assert b <= a + 1e-9


def test_rayleigh_quotient_upper_bounds_lambda1():
    # lambda_1 = min over v of <Sv, v>/<Mv, v>; any random v gives an upper bound
    rng = np.random.default_rng(42)
    from kwflow.spectral import _stiffness

    for _ in range(25):
        g = random_graph(rng, n_max=25)
        root = g.vertices[int(rng.integers(0, len(g.vertices)))]
        lv = ball_exhaustion(g, root, 1).level(1)
        if not lv.boundary:
            continue
        lam = dirichlet_lambda1(lv)
        assert lam >= 0.0
        S = _stiffness(lv)
        for _ in range(5):
            v = rng.normal(size=len(lv))
            quot = float(v @ (S @ v)) / float(v @ (lv.mu * v))
            assert lam <= quot + 1e-9 * max(1.0, abs(quot))


def test_dense_and_iterative_agree_randomized():
    rng = np.random.default_rng(43)
    for _ in range(15):
        g = random_graph(rng, n_max=40)
        root = g.vertices[int(rng.integers(0, len(g.vertices)))]
        depth = int(rng.integers(1, 3))
        lv = ball_exhaustion(g, root, depth).level(depth)
        if not lv.boundary:
            continue
        a = dirichlet_lambda1(lv, cross_check=False)
        b = dirichlet_lambda1_dense(lv)
        assert a == pytest.approx(b, rel=1e-8, abs=1e-10)


def test_scan_verdicts_on_model_families():
    # the line degenerates (lambda ~ k^-2); the tree keeps a uniform gap
    z = cheeger_scan(_z_levels(8))
    assert z.verdict == "empirically-degenerating"
    assert z.lambda_floor == pytest.approx(
        2.0 * (1.0 - math.cos(math.pi / 18.0)), rel=1e-12
    )

    g = build_graph({"family": "tree", "params": {"degree": 3}, "truncation_depth": 8})
    t = cheeger_scan(ball_exhaustion(g, g.root, 6))
    assert t.verdict == "empirically-cheeger"
    assert t.lambda_floor > 0.17
    assert t.cheeger_constant == pytest.approx(math.sqrt(t.lambda_floor))


def test_scan_withholds_verdict_on_exhausted_graph():
    # a finite explicit graph saturates; levels with no boundary carry no
    # Dirichlet constraint and the trend is not classifiable
    spec = {
        "vertices": [{"id": str(i), "mu": 1.0} for i in range(5)],
        "edges": [{"u": str(i), "v": str(i + 1), "w": 1.0} for i in range(4)],
    }
    g = build_graph(spec)
    ex = ball_exhaustion(g, g.find_vertex("2"), 4)
    rep = cheeger_scan(ex)
    assert rep.verdict == "inconclusive"
    assert any(lv.lambda1 is None for lv in rep.levels)
    assert rep.lambda_floor is not None  # floor over the constrained levels


def test_two_point_level_exact_value():
    # single interior vertex x with one boundary edge of weight w and measure
    # mu: S = phi*mu = w, M = mu, so lambda_1 = w/mu exactly
    spec = {
        "vertices": [
            {"id": "a", "mu": 4.0},
            {"id": "b", "mu": 1.0},
            {"id": "c", "mu": 1.0},
        ],
        "edges": [
            {"u": "a", "v": "b", "w": 3.0},
            {"u": "b", "v": "c", "w": 1.0},
        ],
    }
    g = build_graph(spec)
    lv = ball_exhaustion(g, g.find_vertex("a"), 1).level(1)
    # level {a, b}: boundary edge b-c only; dense 2x2 answer checked by hand
    lam = dirichlet_lambda1(lv)
    # stiffness: L + phi*mu on {a,b}: [[3,-3],[-3,4]], masses diag(4,1)
    # det(S - lam M) = 0 -> 4 lam^2 - 19 lam + 3 = 0, smaller root:
    ref = (19.0 - math.sqrt(19.0**2 - 4.0 * 4.0 * 3.0)) / (2.0 * 4.0)
    assert lam == pytest.approx(ref, rel=1e-12)
