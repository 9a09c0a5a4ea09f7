"""Solvability conditions: exact integrals, tail bounds, route verdicts.

Frozen reference values, all hand-computable geometric series on the model
families (unit measures unless stated):

* line, h = -(1/2)^|x|:            ∫|h| dμ = 1 + 2·Σ 2^{-n}             = 3
* line, g = -2·(1/2)^|x|:          ∫ g²/|h| dμ = 4 + 8·Σ 2^{-n}         = 12
  → ordering-route budget 4·12                                          = 48
* 3-regular tree, h = -3^{-n}:     ∫|h| dμ = 1 + Σ 3·2^{n-1}·3^{-n}     = 4
* 3-regular tree, g = 2^{-1-n}:    ∫g² dμ = 1/4 + Σ 3·2^{n-1}·4^{-n-1}  = 5/8
* collapsing chain ratio 1/2:      vol = 1 + 2·Σ 2^{-n}                 = 3
"""

import math

import numpy as np
import pytest

from kwflow import (
    GraphSpecError,
    RadialForm,
    ball_exhaustion,
    build_graph,
    check_c1,
    check_c2,
    check_corollary_scenarios,
    check_hypotheses,
    cheeger_scan,
    parse_field,
    tail_sum,
    uniform_l2_bound,
)
from kwflow.conditions import radial_le

Z = {"family": "lattice", "params": {"dim": 1}, "truncation_depth": 10}
TREE = {"family": "tree", "params": {"degree": 3}, "truncation_depth": 8}
CHAIN = {"family": "collapsing_chain", "params": {"ratio": 0.5}, "truncation_depth": 10}

GEOM_H_Z = {"preset": "geom", "params": {"amplitude": -1.0, "ratio": 0.5}}
GEOM_G_Z = {"preset": "geom", "params": {"amplitude": -2.0, "ratio": 0.5}}
GEOM_H_TREE = {"preset": "geom", "params": {"amplitude": -1.0, "ratio": 1.0 / 3.0}}
GEOM_G_TREE = {"preset": "geom", "params": {"amplitude": 0.5, "ratio": 0.5}}


def test_parse_field_forms():
    f = parse_field(-2.5)
    assert f.preset == "const" and f.value_at(7) == -2.5
    f = parse_field(GEOM_H_Z)
    assert f.value_at(3) == -0.125
    f = parse_field({"preset": "power", "params": {"amplitude": 2.0, "exponent": 2.0}})
    assert f.value_at(3) == pytest.approx(2.0 / 16.0)
    f = parse_field({"preset": "table", "params": {"values": [5.0, 1.0], "default": 0.0}})
    assert (f.value_at(0), f.value_at(1), f.value_at(2)) == (5.0, 1.0, 0.0)
    with pytest.raises(GraphSpecError):
        parse_field({"preset": "mystery", "params": {}})
    with pytest.raises(GraphSpecError):
        parse_field({"preset": "table", "params": {"values": [1.0]}})


def test_ordering_route_exact_values_on_line():
    g = build_graph(Z)
    rep = check_c1(g, parse_field(GEOM_G_Z), parse_field(GEOM_H_Z))
    assert rep.verdict == "satisfied"
    assert rep.pointwise_ok and rep.ordering_proven
    assert rep.h_l1.exact and rep.h_l1.total == pytest.approx(3.0, rel=1e-14)
    assert rep.g2_over_h.exact
    assert rep.g2_over_h.total == pytest.approx(12.0, rel=1e-14)
    assert rep.c1_bound == pytest.approx(48.0, rel=1e-14)


def test_ordering_route_divergence_detected():
    g = build_graph(Z)
    rep = check_c1(g, parse_field(GEOM_G_Z), parse_field(-1.0))
    # constant h fails integrability on the infinite line even though the
    # pointwise ordering is fine on the truncation
    assert rep.verdict == "violated"
    assert rep.divergent
    assert rep.h_l1.divergent


def test_ordering_route_pointwise_violation():
    g = build_graph(Z)
    half = {"preset": "geom", "params": {"amplitude": -0.5, "ratio": 0.5}}
    rep = check_c1(g, parse_field(half), parse_field(GEOM_H_Z))
    assert rep.verdict == "violated"
    assert not rep.pointwise_ok


def test_ordering_route_sign_violation():
    g = build_graph(Z)
    rep = check_c1(g, parse_field(GEOM_H_Z), parse_field(0.0))
    assert rep.verdict == "violated"  # h must be strictly negative


def test_spectral_route_on_tree_exact_values():
    g = build_graph(TREE)
    ex = ball_exhaustion(g, g.root, 6)
    cheeger = cheeger_scan(ex)
    rep = check_c2(g, parse_field(GEOM_G_TREE), parse_field(GEOM_H_TREE),
                   cheeger=cheeger)
    assert rep.verdict == "satisfied"
    assert rep.cheeger_verdict == "empirically-cheeger"
    assert rep.h_l1.exact and rep.h_l1.total == pytest.approx(4.0, rel=1e-14)
    assert rep.g_l2_sq.exact and rep.g_l2_sq.total == pytest.approx(0.625, rel=1e-14)
    # the bound is the positive root of lam X^2 <= 2||h||_1 + 2||g||_2 X
    lam = rep.lambda_floor
    x = rep.l2_bound
    assert lam * x * x == pytest.approx(2.0 * 4.0 + 2.0 * math.sqrt(0.625) * x, rel=1e-12)
    assert rep.l2_mass_bound == pytest.approx(x * x, rel=1e-14)
    assert rep.l2_mass_bound == pytest.approx(62.589985218045115, rel=1e-12)


def test_spectral_route_inconclusive_without_gap():
    g = build_graph(Z)
    ex = ball_exhaustion(g, g.root, 8)
    rep = check_c2(g, parse_field(GEOM_G_Z), parse_field(GEOM_H_Z),
                   cheeger=cheeger_scan(ex))
    assert rep.cheeger_verdict == "empirically-degenerating"
    assert rep.verdict == "inconclusive"
    assert rep.l2_mass_bound is None


def test_tail_bounds_are_sound():
    # partial(depth) + tail(depth) must dominate every deeper partial sum
    rng = np.random.default_rng(55)
    g = build_graph({"family": "lattice", "params": {"dim": 1}, "truncation_depth": 24})
    fam = g.family
    for _ in range(40):
        a = float(rng.uniform(0.1, 3.0))
        s = float(rng.uniform(0.2, 0.95))
        p = float(rng.choice([0.0, rng.uniform(0.5, 3.0), -rng.uniform(0.5, 2.0)]))
        form = RadialForm(a, s, p)
        dist = g.distances_from(g.root)

        def partial(d):
            return sum(g.mu[v] * form.value(dist[v]) for v in g.vertices if dist[v] <= d)

        tail = tail_sum(form, fam, beyond=8)
        assert not tail.divergent
        deep = partial(20)
        assert partial(8) + tail.value >= deep - 1e-12 * max(1.0, abs(deep))
        if tail.exact:
            # exact tails: the full series is reproduced to roundoff
            total = partial(8) + tail.value
            inf_sum = a + 2.0 * sum(a * s**n * (1 + n) ** (-p) for n in range(1, 4000))
            assert total == pytest.approx(inf_sum, rel=1e-10)


def test_tail_divergence_flagged():
    g = build_graph(Z)
    fam = g.family
    assert tail_sum(RadialForm(1.0, 1.0, 0.0), fam, beyond=5).divergent
    assert tail_sum(RadialForm(1.0, 1.0, 0.5), fam, beyond=5).divergent  # p <= 1
    assert not tail_sum(RadialForm(1.0, 1.0, 1.5), fam, beyond=5).divergent
    # growing spheres (tree) against too-slow decay
    t = build_graph(TREE)
    assert tail_sum(RadialForm(1.0, 0.5, 0.0), t.family, beyond=5).divergent  # q = 1


def test_radial_ordering_decisions():
    lo = parse_field(GEOM_G_Z).radial
    hi = parse_field(GEOM_H_Z).radial
    assert radial_le(lo, hi) is True
    assert radial_le(hi, lo) is False
    # a slower-decaying negative envelope eventually crosses: genuinely false
    assert radial_le(RadialForm(-1.0, 0.25, 0.0), hi) is False
    # mismatched decay exponents are undecidable by the algebra alone
    assert radial_le(RadialForm(-1.0, 0.5, 1.0), hi) is None


def test_partial_sums_monotone_in_depth():
    g = build_graph(Z)
    gf, hf = parse_field(GEOM_G_Z), parse_field(GEOM_H_Z)
    prev = 0.0
    for d in range(1, 9):
        rep = check_c1(g, gf, hf, depth=d)
        cur = rep.h_l1.partial
        assert cur >= prev - 1e-15
        prev = cur
        # partial + tail equals the same exact total at every depth
        assert rep.h_l1.total == pytest.approx(3.0, rel=1e-13)


def test_corollaries_on_collapsing_chain():
    g = build_graph(CHAIN)
    rep = check_corollary_scenarios(g, -2.0, parse_field(-1.0))
    fired = rep.fired()
    assert "integrable_reciprocal" in fired
    assert "finite_volume" in fired
    ir = rep.entries["integrable_reciprocal"]
    # volume 3: both ∫|h| and ∫1/|h| equal 3; implied budget 4c²·3 = 48
    assert ir["h_l1"]["total"] == pytest.approx(3.0, rel=1e-14)
    assert ir["h_recip_l1"]["total"] == pytest.approx(3.0, rel=1e-14)
    assert ir["implied_c1_bound"] == pytest.approx(48.0, rel=1e-14)
    assert ir["cross_check"]["agrees"]
    fv = rep.entries["finite_volume"]
    assert fv["volume"]["total"] == pytest.approx(3.0, rel=1e-14)
    assert fv["eps"] == pytest.approx(1.0)
    assert fv["cross_check"]["agrees"]


def test_zero_source_reduction_on_tree():
    g = build_graph(TREE)
    ex = ball_exhaustion(g, g.root, 6)
    cheeger = cheeger_scan(ex)
    rep = check_corollary_scenarios(g, 0.0, parse_field(GEOM_H_TREE), cheeger=cheeger)
    assert rep.fired() == ["zero_source"]
    zs = rep.entries["zero_source"]
    # with g = 0 the quadratic degenerates: X = sqrt(2||h||_1 / lambda)
    lam = cheeger.lambda_floor
    assert zs["implied_l2_bound"] == pytest.approx(math.sqrt(8.0 / lam), rel=1e-12)
    assert zs["cross_check"]["agrees"]


def test_corollaries_need_constant_g():
    g = build_graph(Z)
    rep = check_corollary_scenarios(g, parse_field(GEOM_G_Z), parse_field(GEOM_H_Z))
    assert rep.fired() == []
    assert not rep.constant_g


def test_hypothesis_summary_verdicts():
    # line with geometric data: ordering route only (the gap degenerates)
    g = build_graph(Z)
    ex = ball_exhaustion(g, g.root, 8)
    rep = check_hypotheses(g, parse_field(GEOM_G_Z), parse_field(GEOM_H_Z),
                           cheeger=cheeger_scan(ex))
    assert rep.theorem_applicable == "C-1"

    # tree with g = h: both routes at once
    t = build_graph(TREE)
    tex = ball_exhaustion(t, t.root, 6)
    rep = check_hypotheses(t, parse_field(GEOM_H_TREE), parse_field(GEOM_H_TREE),
                           cheeger=cheeger_scan(tex))
    assert rep.theorem_applicable == "both"

    # constant negative h on the line: neither route
    rep = check_hypotheses(g, parse_field(-1.0), parse_field(-1.0),
                           cheeger=cheeger_scan(ex))
    assert rep.theorem_applicable == "neither"


def test_explicit_finite_graph_is_exact():
    # fully complete data: verdicts come from exact finite sums, no tails
    spec = {
        "vertices": [{"id": str(i), "mu": float(i + 1)} for i in range(4)],
        "edges": [{"u": str(i), "v": str(i + 1), "w": 1.0} for i in range(3)],
    }
    g = build_graph(spec)
    hf = parse_field(-2.0)
    gf = parse_field(-3.0)
    rep = check_c1(g, gf, hf)
    assert rep.verdict == "satisfied"
    assert rep.h_l1.exact
    # mu total = 1+2+3+4 = 10, so ∫|h| = 20 and ∫g²/|h| = 9/2·10 = 45
    assert rep.h_l1.total == pytest.approx(20.0)
    assert rep.c1_bound == pytest.approx(180.0)


def test_uniform_l2_bound_solves_the_quadratic():
    rng = np.random.default_rng(56)
    for _ in range(50):
        a = float(rng.uniform(0.01, 20.0))
        b = float(rng.uniform(0.0, 10.0))
        lam = float(rng.uniform(0.01, 3.0))
        x = uniform_l2_bound(a, b, lam)
        # x is a root of lam x^2 - 2 b x - 2 a = 0 and any larger X fails
        assert lam * x * x == pytest.approx(2.0 * a + 2.0 * b * x, rel=1e-10)
        worse = x * 1.01
        assert lam * worse * worse > 2.0 * a + 2.0 * b * worse
